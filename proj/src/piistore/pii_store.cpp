#include "consent/piistore/pii_store.hpp"

#include "consent/common/error.hpp"

namespace consent::piistore {

Json toJson(const UserRecord& u) {
  return Json{{"createdAtMs", u.createdAtMs}, {"email", u.email},       {"location", u.location},
              {"name", u.name},               {"phone", u.phone},       {"userId", u.userId}};
}

UserRecord userFromJson(const Json& j) {
  try {
    return UserRecord{j.at("userId").get<std::string>(),  j.at("name").get<std::string>(),
                      j.at("email").get<std::string>(),   j.at("phone").get<std::string>(),
                      j.at("location").get<std::string>(), j.at("createdAtMs").get<std::int64_t>()};
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::Parse, std::string("malformed user record: ") + e.what());
  }
}

FieldProjection project(const UserRecord& user, const ledger::PermissionFlags& flags) {
  FieldProjection out;
  if (flags.name) out.emplace("name", user.name);
  if (flags.email) out.emplace("email", user.email);
  if (flags.phone) out.emplace("phone", user.phone);
  if (flags.location) out.emplace("location", user.location);
  return out;
}

PiiStore::PiiStore(DocumentStore& store, crypto::RandomSource& rng, Clock clock)
    : store_(store), rng_(rng), clock_(std::move(clock)) {}

std::string PiiStore::createUser(std::string name, std::string email, std::string phone,
                                 std::string location) {
  if (email.empty()) throw Error(ErrorCode::InvalidArgument, "email must not be empty");
  std::lock_guard lock(writeMutex_);
  if (findByEmail(email)) throw Error(ErrorCode::Conflict, "email already registered");
  std::string id;
  do {
    id = crypto::uuidV4(rng_);
  } while (store_.get(kUserNamespace, id));
  UserRecord user{id, std::move(name), std::move(email), std::move(phone), std::move(location),
                  clock_()};
  store_.put(kUserNamespace, id, toJson(user));
  return id;
}

std::optional<UserRecord> PiiStore::getUser(std::string_view userId) const {
  auto doc = store_.get(kUserNamespace, userId);
  if (!doc) return std::nullopt;
  return userFromJson(*doc);
}

std::optional<FieldProjection> PiiStore::getFields(std::string_view userId,
                                                   const ledger::PermissionFlags& flags) const {
  auto user = getUser(userId);
  if (!user) return std::nullopt;
  return project(*user, flags);
}

std::optional<std::string> PiiStore::findByEmail(std::string_view email) const {
  for (const auto& [id, doc] : store_.list(kUserNamespace)) {
    if (doc.value("email", "") == email) return id;
  }
  return std::nullopt;
}

std::vector<UserRecord> PiiStore::users() const {
  std::vector<UserRecord> out;
  for (const auto& [id, doc] : store_.list(kUserNamespace)) out.push_back(userFromJson(doc));
  return out;
}

void PiiStore::deleteUser(std::string_view userId) {
  std::lock_guard lock(writeMutex_);
  if (!store_.erase(kUserNamespace, userId)) {
    throw Error(ErrorCode::NotFound, "no such user");
  }
}

}  // namespace consent::piistore
