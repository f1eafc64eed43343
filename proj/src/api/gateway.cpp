#include "consent/api/gateway.hpp"

#include <algorithm>

#include "consent/common/error.hpp"
#include "consent/ledger/ledger.hpp"

namespace consent::api {

using identity::Role;
using identity::Session;

ApiResponse apiError(int status, std::string_view code, std::string_view message) {
  return ApiResponse{status, Json{{"code", code}, {"message", message}, {"status", status}}};
}

namespace {

// Thrown inside handlers to short-circuit with a specific response.
struct ApiFailure {
  int status;
  std::string code;
  std::string message;
};

[[noreturn]] void failWith(int status, std::string code, std::string message) {
  throw ApiFailure{status, std::move(code), std::move(message)};
}

const Json& requireObject(const Json& body) {
  if (!body.is_object()) failWith(400, "bad-request", "request body must be a JSON object");
  return body;
}

std::string requireString(const Json& body, const char* key, bool allowEmpty = false) {
  auto it = requireObject(body).find(key);
  if (it == body.end() || !it->is_string()) {
    failWith(400, "missing-field", std::string("field '") + key + "' is required");
  }
  auto value = it->get<std::string>();
  if (!allowEmpty && value.empty()) {
    failWith(400, "missing-field", std::string("field '") + key + "' must not be empty");
  }
  return value;
}

bool requireBool(const Json& body, const char* key) {
  auto it = requireObject(body).find(key);
  if (it == body.end() || !it->is_boolean()) {
    failWith(400, "missing-field", std::string("field '") + key + "' must be a boolean");
  }
  return it->get<bool>();
}

Json companyView(const ledger::CompanyAsset& c) { return ledger::toJson(c); }

std::vector<ledger::CompanyAsset> allCompanies(const ledger::WorldState& state) {
  std::vector<ledger::CompanyAsset> out;
  for (const auto& [key, asset] : state.assets()) {
    if (const auto* c = std::get_if<ledger::CompanyAsset>(&asset)) out.push_back(*c);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.name != b.name ? a.name < b.name : a.companyId < b.companyId;
  });
  return out;
}

}  // namespace

Gateway::Gateway(GatewayConfig config, crypto::RandomSource& rng, Clock clock)
    : config_(std::move(config)), rng_(rng), clock_(std::move(clock)) {
  if (config_.dataDir) {
    std::filesystem::create_directories(*config_.dataDir);
    store_ = std::make_unique<piistore::DocumentStore>(*config_.dataDir / kStoreFileName);
  } else {
    store_ = std::make_unique<piistore::DocumentStore>();
  }
  pii_ = std::make_unique<piistore::PiiStore>(*store_, rng_, clock_);
  identity_ = std::make_unique<identity::IdentityService>(store_.get(), config_.identity, rng_, clock_);

  auto netConfig = config_.network;
  if (config_.followWallClock) netConfig.startUs = clock_() * network::kMicrosPerMs;
  network_ = std::make_unique<network::Network>(netConfig, config_.dataDir);

  if (config_.admin) identity_->bootstrapAdmin(config_.admin->id, config_.admin->password);
}

Gateway::~Gateway() = default;

template <typename F>
ApiResponse Gateway::guarded(F&& handler) {
  try {
    return handler();
  } catch (const ApiFailure& f) {
    return apiError(f.status, f.code, f.message);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::InvalidArgument: return apiError(400, "bad-request", e.what());
      case ErrorCode::Conflict: return apiError(409, "conflict", e.what());
      case ErrorCode::NotFound: return apiError(404, "not-found", e.what());
      case ErrorCode::InvalidCredentials: return apiError(401, "invalid-credentials", "invalid credentials");
      case ErrorCode::Denied: return apiError(401, "unauthorized", e.what());
      default: return apiError(500, "internal", "internal error");
    }
  } catch (const std::exception&) {
    return apiError(500, "internal", "internal error");
  }
}

Session Gateway::requireSession(std::string_view token) {
  try {
    return identity_->authenticate(token);
  } catch (const Error&) {
    failWith(401, "unauthorized", "missing, invalid or expired session");
  }
}

Session Gateway::requireRole(std::string_view token, Role role) {
  requireSession(token);
  try {
    return identity_->authorize(token, role);
  } catch (const Error&) {
    failWith(403, "forbidden", "this endpoint requires a " + std::string(identity::roleName(role)) +
                                   " session");
  }
}

std::string Gateway::newTxId() { return crypto::uuidV4(rng_); }

void Gateway::commit(ledger::Transaction tx) {
  std::lock_guard lock(ledgerMutex_);
  if (config_.followWallClock) {
    network_->advanceTo(std::max(network_->now(), clock_() * network::kMicrosPerMs));
  }
  auto outcome = network_->submitAndWait(std::move(tx));
  if (!outcome.committed) throw Error(ErrorCode::Internal, "ledger rejected transaction: " + outcome.reason);
  if (!outcome.valid) throw Error(ErrorCode::Internal, "transaction failed to apply: " + outcome.reason);
}

std::optional<ledger::CompanyAsset> Gateway::companyAsset(std::string_view companyId) {
  std::lock_guard lock(ledgerMutex_);
  const auto* asset = network_->peer(0).state().find(ledger::companyKey(companyId));
  if (asset == nullptr) return std::nullopt;
  return std::get<ledger::CompanyAsset>(*asset);
}

std::optional<std::string> Gateway::companyIdByName(std::string_view name) const {
  for (const auto& [id, doc] : store_->list(kCompanyNamespace)) {
    if (doc.value("name", "") == name) return id;
  }
  return std::nullopt;
}

ApiResponse Gateway::registerUser(const Json& body) {
  return guarded([&] {
    auto name = requireString(body, "name");
    auto email = requireString(body, "email");
    auto phone = requireString(body, "phone");
    auto location = requireString(body, "location");
    auto password = requireString(body, "password");
    // Privacy by default: registration touches only the off-chain store.
    auto userId = pii_->createUser(name, email, phone, location);
    try {
      identity_->registerPrincipal(userId, Role::User, password);
    } catch (...) {
      pii_->deleteUser(userId);
      pii_->compact();
      throw;
    }
    return ApiResponse{201, Json{{"userId", userId}}};
  });
}

ApiResponse Gateway::registerCompany(const Json& body) {
  return guarded([&] {
    auto name = requireString(body, "name");
    auto password = requireString(body, "password");
    std::lock_guard lock(directoryMutex_);
    if (companyIdByName(name)) failWith(409, "conflict", "company name already registered");
    auto companyId = crypto::uuidV4(rng_);
    identity_->registerPrincipal(companyId, Role::Company, password);
    store_->put(kCompanyNamespace, companyId, Json{{"companyId", companyId}, {"name", name}});
    return ApiResponse{201, Json{{"companyId", companyId}}};
  });
}

ApiResponse Gateway::login(const Json& body) {
  return guarded([&] {
    auto principal = requireString(body, "principal");
    auto password = requireString(body, "password");
    // Users log in by email, companies by name, the admin by id.
    std::string principalId = principal;
    if (!(config_.admin && config_.admin->id == principal)) {
      if (auto userId = pii_->findByEmail(principal)) {
        principalId = *userId;
      } else if (auto companyId = companyIdByName(principal)) {
        principalId = *companyId;
      }
    }
    auto session = identity_->login(principalId, password);
    Json out{{"expiresAtMs", session.expiresAtMs},
             {"principalId", session.principalId},
             {"role", identity::roleName(session.role)},
             {"token", session.token}};
    if (session.role == Role::Company) {
      out["profileComplete"] = companyAsset(session.principalId).has_value();
    }
    return ApiResponse{200, std::move(out)};
  });
}

ApiResponse Gateway::logout(std::string_view token) {
  return guarded([&] {
    requireSession(token);
    identity_->logout(token);
    return ApiResponse{200, Json{{"loggedOut", true}}};
  });
}

ApiResponse Gateway::me(std::string_view token) {
  return guarded([&] {
    auto s = requireSession(token);
    Json out{{"principalId", s.principalId}, {"role", identity::roleName(s.role)}};
    if (s.role == Role::Company) {
      auto asset = companyAsset(s.principalId);
      out["profileComplete"] = asset.has_value();
      if (auto doc = store_->get(kCompanyNamespace, s.principalId)) out["name"] = (*doc)["name"];
    }
    return ApiResponse{200, std::move(out)};
  });
}

ApiResponse Gateway::putCompanyProfile(std::string_view token, const Json& body) {
  return guarded([&] {
    auto s = requireRole(token, Role::Company);
    auto description = requireString(body, "description", true);
    auto contactEmail = requireString(body, "contactEmail");
    auto directory = store_->get(kCompanyNamespace, s.principalId);
    if (!directory) failWith(404, "not-found", "no company registered for this session");

    ledger::CompanyAsset asset;
    asset.companyId = s.principalId;
    asset.name = (*directory)["name"].get<std::string>();
    asset.description = description;
    asset.contactEmail = contactEmail;
    if (auto existing = companyAsset(s.principalId)) asset.accredited = existing->accredited;
    commit(ledger::Transaction::putCompany(newTxId(), asset, s.principalId, nowMs()));
    return ApiResponse{200, companyView(asset)};
  });
}

ApiResponse Gateway::accredit(std::string_view token, std::string_view companyId, const Json& body) {
  return guarded([&] {
    auto s = requireSession(token);
    if (s.role != Role::Admin) failWith(403, "forbidden", "accreditation requires an admin session");
    bool accredited = requireBool(body, "accredited");
    auto asset = companyAsset(companyId);
    if (!asset) failWith(404, "not-found", "unknown company");
    commit(ledger::Transaction::setAccreditation(
        newTxId(), ledger::Accreditation{std::string(companyId), accredited}, s.principalId, nowMs()));
    asset->accredited = accredited;
    return ApiResponse{200, companyView(*asset)};
  });
}

ApiResponse Gateway::adminListCompanies(std::string_view token) {
  return guarded([&] {
    auto s = requireSession(token);
    if (s.role != Role::Admin) failWith(403, "forbidden", "requires an admin session");
    Json out = Json::array();
    std::lock_guard lock(ledgerMutex_);
    for (const auto& c : allCompanies(network_->peer(0).state())) out.push_back(companyView(c));
    return ApiResponse{200, std::move(out)};
  });
}

ApiResponse Gateway::listCompanies(std::string_view token) {
  return guarded([&] {
    requireRole(token, Role::User);
    Json out = Json::array();
    std::lock_guard lock(ledgerMutex_);
    for (const auto& c : allCompanies(network_->peer(0).state())) {
      if (c.accredited) out.push_back(companyView(c));
    }
    return ApiResponse{200, std::move(out)};
  });
}

ApiResponse Gateway::putPermission(std::string_view token, std::string_view companyId,
                                   const Json& body) {
  return guarded([&] {
    auto s = requireRole(token, Role::User);
    requireObject(body);
    ledger::PermissionFlags flags{requireBool(body, "name"), requireBool(body, "email"),
                                  requireBool(body, "phone"), requireBool(body, "location")};
    if (body.size() != 4) failWith(400, "bad-request", "permission body takes exactly name, email, phone, location");
    auto company = companyAsset(companyId);
    if (!company || !company->accredited) failWith(404, "not-found", "unknown or unaccredited company");

    ledger::PermissionAsset asset{ledger::computePairKey(s.principalId, companyId),
                                  std::string(companyId), flags};
    commit(ledger::Transaction::putPermission(newTxId(), asset, std::string(kGatewaySubmitter), nowMs()));
    return ApiResponse{200, Json{{"flags", ledger::toJson(flags)}, {"pairKey", asset.pairKey.hex()}}};
  });
}

ApiResponse Gateway::listPermissions(std::string_view token) {
  return guarded([&] {
    auto s = requireRole(token, Role::User);
    Json out = Json::array();
    std::lock_guard lock(ledgerMutex_);
    const auto& state = network_->peer(0).state();
    for (const auto& c : allCompanies(state)) {
      auto key = ledger::computePairKey(s.principalId, c.companyId);
      const auto* asset = state.find(ledger::permissionKey(key));
      if (asset == nullptr) continue;
      const auto& perm = std::get<ledger::PermissionAsset>(*asset);
      out.push_back(Json{{"companyId", c.companyId},
                         {"companyName", c.name},
                         {"flags", ledger::toJson(perm.flags)},
                         {"pairKey", key.hex()}});
    }
    return ApiResponse{200, std::move(out)};
  });
}

ApiResponse Gateway::permissionHistory(std::string_view token, std::string_view companyId) {
  return guarded([&] {
    auto s = requireRole(token, Role::User);
    auto key = ledger::computePairKey(s.principalId, companyId);
    Json entries = Json::array();
    std::lock_guard lock(ledgerMutex_);
    for (const auto& e : ledger::queryHistory(network_->peer(0).chain().blocks(),
                                              ledger::permissionKey(key))) {
      entries.push_back(Json{{"height", e.height}, {"txId", e.txId}, {"value", e.value}});
    }
    return ApiResponse{200, Json{{"history", std::move(entries)}, {"pairKey", key.hex()}}};
  });
}

ApiResponse Gateway::companyData(std::string_view token) {
  return guarded([&] {
    auto s = requireSession(token);
    if (s.role != Role::Company) failWith(403, "forbidden", "requires a company session");
    std::vector<ledger::PermissionAsset> grants;
    {
      std::lock_guard lock(ledgerMutex_);
      for (const auto& [key, asset] : network_->peer(0).state().assets()) {
        if (const auto* p = std::get_if<ledger::PermissionAsset>(&asset); p && p->companyId == s.principalId) {
          grants.push_back(*p);
        }
      }
    }
    // Pair keys resolve to people only through the off-chain store.
    std::map<std::string, std::string> owners;
    if (!grants.empty()) {
      for (const auto& user : pii_->users()) {
        owners.emplace(ledger::computePairKey(user.userId, s.principalId).hex(), user.userId);
      }
    }
    Json out = Json::array();
    for (const auto& grant : grants) {
      Json row{{"pairKey", grant.pairKey.hex()}};
      std::optional<piistore::FieldProjection> fields;
      if (!grant.flags.allFalse()) {
        if (auto owner = owners.find(grant.pairKey.hex()); owner != owners.end()) {
          fields = pii_->getFields(owner->second, grant.flags);
        }
      }
      row["deleted"] = !fields.has_value();
      if (fields) {
        for (const auto& [field, value] : *fields) row[field] = value;
      }
      out.push_back(std::move(row));
    }
    return ApiResponse{200, std::move(out)};
  });
}

ApiResponse Gateway::deleteAccount(std::string_view token, const Json& body) {
  return guarded([&] {
    auto s = requireRole(token, Role::User);
    if (!body.is_object() || !body.contains("confirm") || !body["confirm"].is_string() ||
        body["confirm"].get<std::string>() != "DELETE") {
      failWith(400, "confirmation-required", "type DELETE to confirm account deletion");
    }
    std::lock_guard accountLock(accountMutex_);

    std::vector<ledger::PermissionAsset> entries;
    {
      std::lock_guard lock(ledgerMutex_);
      const auto& state = network_->peer(0).state();
      for (const auto& c : allCompanies(state)) {
        auto key = ledger::computePairKey(s.principalId, c.companyId);
        if (const auto* asset = state.find(ledger::permissionKey(key))) {
          entries.push_back(std::get<ledger::PermissionAsset>(*asset));
        }
      }
    }
    // Revoke on chain first; PII is untouched if any of these fail.
    for (auto entry : entries) {
      entry.flags = ledger::PermissionFlags{};
      commit(ledger::Transaction::putPermission(newTxId(), entry, std::string(kGatewaySubmitter), nowMs()));
    }
    try {
      pii_->deleteUser(s.principalId);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotFound) throw;
    }
    identity_->deleteCredential(s.principalId);
    store_->compact();
    return ApiResponse{200, Json{{"deleted", true}, {"permissionsRevoked", entries.size()}}};
  });
}

}  // namespace consent::api
