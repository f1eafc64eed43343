#include "consent/identity/identity.hpp"

#include "consent/common/error.hpp"

namespace consent::identity {

std::string_view roleName(Role role) {
  switch (role) {
    case Role::User: return "user";
    case Role::Company: return "company";
    case Role::Admin: return "admin";
  }
  return "user";
}

std::optional<Role> parseRole(std::string_view name) {
  if (name == "user") return Role::User;
  if (name == "company") return Role::Company;
  if (name == "admin") return Role::Admin;
  return std::nullopt;
}

std::string hashPassword(std::span<const std::uint8_t> salt, std::string_view password,
                         int iterations) {
  if (iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be at least 1");
  std::vector<std::uint8_t> input(salt.begin(), salt.end());
  input.insert(input.end(), password.begin(), password.end());
  crypto::Digest digest = crypto::sha256(input);
  for (int i = 1; i < iterations; ++i) digest = crypto::sha256(digest);
  return crypto::toHex(digest);
}

namespace {

Json toJson(const Credential& c) {
  return Json{{"createdAtMs", c.createdAtMs}, {"iterations", c.iterations},
              {"passwordHash", c.passwordHash}, {"principalId", c.principalId},
              {"role", roleName(c.role)},     {"salt", c.salt}};
}

Credential credentialFromJson(const Json& j) {
  try {
    Credential c;
    c.principalId = j.at("principalId").get<std::string>();
    auto role = parseRole(j.at("role").get<std::string>());
    if (!role) throw Error(ErrorCode::Parse, "unknown role in credential");
    c.role = *role;
    c.salt = j.at("salt").get<std::string>();
    c.passwordHash = j.at("passwordHash").get<std::string>();
    c.iterations = j.at("iterations").get<int>();
    c.createdAtMs = j.at("createdAtMs").get<std::int64_t>();
    return c;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed credential: ") + e.what());
  }
}

[[noreturn]] void invalidCredentials() {
  throw Error(ErrorCode::InvalidCredentials, "invalid credentials");
}

}  // namespace

IdentityService::IdentityService(piistore::DocumentStore* store, IdentityConfig config,
                                 crypto::RandomSource& rng, Clock clock)
    : store_(store), config_(config), rng_(rng), clock_(std::move(clock)) {
  if (config_.iterations < 1) throw Error(ErrorCode::InvalidArgument, "iterations must be at least 1");
}

std::optional<Credential> IdentityService::loadLocked(std::string_view principalId) const {
  if (store_ != nullptr) {
    auto doc = store_->get(kCredentialNamespace, principalId);
    if (!doc) return std::nullopt;
    return credentialFromJson(*doc);
  }
  auto it = memory_.find(principalId);
  if (it == memory_.end()) return std::nullopt;
  return it->second;
}

Credential IdentityService::registerPrincipal(std::string principalId, Role role,
                                              std::string_view password,
                                              std::optional<std::vector<std::uint8_t>> salt) {
  if (principalId.empty()) throw Error(ErrorCode::InvalidArgument, "principal id must not be empty");
  if (password.empty()) throw Error(ErrorCode::InvalidArgument, "password must not be empty");
  std::vector<std::uint8_t> saltBytes = salt ? std::move(*salt) : rng_.bytes(kSaltBytes);
  if (saltBytes.size() != kSaltBytes) throw Error(ErrorCode::InvalidArgument, "salt must be 16 bytes");

  Credential cred;
  cred.principalId = std::move(principalId);
  cred.role = role;
  cred.salt = crypto::toHex(saltBytes);
  cred.iterations = config_.iterations;
  cred.passwordHash = hashPassword(saltBytes, password, cred.iterations);
  cred.createdAtMs = clock_();

  std::lock_guard lock(mutex_);
  if (loadLocked(cred.principalId)) throw Error(ErrorCode::Conflict, "principal already registered");
  if (store_ != nullptr) {
    store_->put(kCredentialNamespace, cred.principalId, toJson(cred));
  } else {
    memory_.emplace(cred.principalId, cred);
  }
  return cred;
}

Session IdentityService::login(std::string_view principalId, std::string_view password) {
  std::optional<Credential> cred;
  {
    std::lock_guard lock(mutex_);
    cred = loadLocked(principalId);
  }
  if (!cred) {
    // Same amount of hashing as a real check, so timing does not reveal
    // which principals exist.
    std::array<std::uint8_t, kSaltBytes> dummy{};
    hashPassword(dummy, password, config_.iterations);
    invalidCredentials();
  }
  auto computed = hashPassword(crypto::fromHex(cred->salt), password, cred->iterations);
  if (!crypto::constantTimeEqual(computed, cred->passwordHash)) invalidCredentials();

  Session session;
  session.token = crypto::toHex(rng_.bytes(kTokenBytes));
  session.principalId = cred->principalId;
  session.role = cred->role;
  session.expiresAtMs = clock_() + config_.sessionTtlMs;

  std::lock_guard lock(mutex_);
  // The credential may have been deleted while hashing.
  if (!loadLocked(principalId)) invalidCredentials();
  sessions_.emplace(session.token, session);
  return session;
}

Session IdentityService::authenticateLocked(std::string_view token) {
  auto it = sessions_.find(token);
  if (it == sessions_.end()) throw Error(ErrorCode::Denied, "invalid or expired session");
  if (clock_() >= it->second.expiresAtMs) {
    sessions_.erase(it);
    throw Error(ErrorCode::Denied, "invalid or expired session");
  }
  return it->second;
}

Session IdentityService::authenticate(std::string_view token) {
  std::lock_guard lock(mutex_);
  return authenticateLocked(token);
}

Session IdentityService::authorize(std::string_view token, Role required,
                                   std::optional<std::string_view> resourceOwner) {
  std::lock_guard lock(mutex_);
  Session s = authenticateLocked(token);
  if (s.role == Role::Admin) return s;
  if (s.role != required) throw Error(ErrorCode::Denied, "role not permitted");
  if (resourceOwner && *resourceOwner != s.principalId) {
    throw Error(ErrorCode::Denied, "resource belongs to another principal");
  }
  return s;
}

void IdentityService::deleteCredential(std::string_view principalId) {
  std::lock_guard lock(mutex_);
  bool removed = store_ != nullptr ? store_->erase(kCredentialNamespace, principalId)
                                   : memory_.erase(std::string(principalId)) > 0;
  if (!removed) throw Error(ErrorCode::NotFound, "no such principal");
  std::erase_if(sessions_, [&](const auto& kv) { return kv.second.principalId == principalId; });
}

bool IdentityService::exists(std::string_view principalId) const {
  std::lock_guard lock(mutex_);
  return loadLocked(principalId).has_value();
}

std::optional<Credential> IdentityService::credential(std::string_view principalId) const {
  std::lock_guard lock(mutex_);
  return loadLocked(principalId);
}

void IdentityService::bootstrapAdmin(const std::string& adminId, std::string_view password) {
  if (exists(adminId)) return;
  registerPrincipal(adminId, Role::Admin, password);
}

void IdentityService::logout(std::string_view token) {
  std::lock_guard lock(mutex_);
  if (auto it = sessions_.find(token); it != sessions_.end()) sessions_.erase(it);
}

}  // namespace consent::identity
