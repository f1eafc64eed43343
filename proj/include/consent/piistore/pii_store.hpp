#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "consent/common/clock.hpp"
#include "consent/common/crypto.hpp"
#include "consent/ledger/types.hpp"
#include "consent/piistore/document_store.hpp"

namespace consent::piistore {

struct UserRecord {
  std::string userId;
  std::string name;
  std::string email;
  std::string phone;
  std::string location;
  std::int64_t createdAtMs = 0;

  bool operator==(const UserRecord&) const = default;
};

Json toJson(const UserRecord& user);
UserRecord userFromJson(const Json& j);

// Field name -> value, holding only the fields a permission allows.
using FieldProjection = std::map<std::string, std::string>;

FieldProjection project(const UserRecord& user, const ledger::PermissionFlags& flags);

inline constexpr std::string_view kUserNamespace = "user";

/// The off-chain home of user PII, and the only place a pair key can be
/// traced back to a person.
class PiiStore {
 public:
  explicit PiiStore(DocumentStore& store, crypto::RandomSource& rng = crypto::osRandom(),
                    Clock clock = systemNowMs);

  // Generates the user ID. Throws Error(Conflict) on a duplicate email and
  // Error(InvalidArgument) on an empty one.
  std::string createUser(std::string name, std::string email, std::string phone,
                         std::string location);

  std::optional<UserRecord> getUser(std::string_view userId) const;
  std::optional<FieldProjection> getFields(std::string_view userId,
                                           const ledger::PermissionFlags& flags) const;
  std::optional<std::string> findByEmail(std::string_view email) const;
  std::vector<UserRecord> users() const;

  // Throws Error(NotFound).
  void deleteUser(std::string_view userId);
  void compact() { store_.compact(); }

 private:
  DocumentStore& store_;
  crypto::RandomSource& rng_;
  Clock clock_;
  std::mutex writeMutex_;
};

}  // namespace consent::piistore
