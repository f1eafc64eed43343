#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "consent/common/clock.hpp"
#include "consent/common/crypto.hpp"
#include "consent/piistore/document_store.hpp"

namespace consent::identity {

enum class Role { User, Company, Admin };

std::string_view roleName(Role role);
std::optional<Role> parseRole(std::string_view name);

struct Credential {
  std::string principalId;
  Role role = Role::User;
  std::string salt;          // 16 bytes, hex
  std::string passwordHash;  // hex
  int iterations = 0;
  std::int64_t createdAtMs = 0;
};

struct Session {
  std::string token;  // 32 bytes, hex
  std::string principalId;
  Role role = Role::User;
  std::int64_t expiresAtMs = 0;
};

struct IdentityConfig {
  int iterations = 100000;
  std::int64_t sessionTtlMs = 24LL * 60 * 60 * 1000;
};

inline constexpr std::size_t kSaltBytes = 16;
inline constexpr std::size_t kTokenBytes = 32;
inline constexpr std::string_view kCredentialNamespace = "credential";

/// SHA-256 over salt || password, then re-hashed iterations-1 more times
/// over the previous raw digest. Returns lowercase hex.
std::string hashPassword(std::span<const std::uint8_t> salt, std::string_view password,
                         int iterations);

/// Credentials and bearer sessions. Credentials persist in the document
/// store under their own namespace; sessions live in memory only. All
/// operations are atomic with respect to each other.
class IdentityService {
 public:
  explicit IdentityService(piistore::DocumentStore* store, IdentityConfig config = {},
                           crypto::RandomSource& rng = crypto::osRandom(),
                           Clock clock = systemNowMs);

  // Throws Error(Conflict) if the principal exists, Error(InvalidArgument)
  // on an empty id or password. A fixed salt makes the result deterministic.
  Credential registerPrincipal(std::string principalId, Role role, std::string_view password,
                               std::optional<std::vector<std::uint8_t>> salt = std::nullopt);

  // Throws Error(InvalidCredentials) for an unknown principal or a wrong
  // password alike.
  Session login(std::string_view principalId, std::string_view password);

  /// Returns the session behind a valid token. Grants when the role matches
  /// (admin always matches) and, for non-admins, when resourceOwner is unset
  /// or equals the principal. Throws Error(Denied) otherwise.
  Session authorize(std::string_view token, Role required,
                    std::optional<std::string_view> resourceOwner = std::nullopt);

  // Session for a valid unexpired token regardless of role.
  Session authenticate(std::string_view token);

  // Removes the credential and every session of the principal.
  // Throws Error(NotFound).
  void deleteCredential(std::string_view principalId);

  bool exists(std::string_view principalId) const;
  std::optional<Credential> credential(std::string_view principalId) const;

  // Creates the admin credential unless one with this id already exists.
  void bootstrapAdmin(const std::string& adminId, std::string_view password);

  void logout(std::string_view token);

 private:
  std::optional<Credential> loadLocked(std::string_view principalId) const;
  Session authenticateLocked(std::string_view token);

  piistore::DocumentStore* store_;
  IdentityConfig config_;
  crypto::RandomSource& rng_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::map<std::string, Credential, std::less<>> memory_;  // used when store_ is null
  std::map<std::string, Session, std::less<>> sessions_;
};

}  // namespace consent::identity
