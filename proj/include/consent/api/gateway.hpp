#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "consent/common/canonical.hpp"
#include "consent/common/clock.hpp"
#include "consent/common/crypto.hpp"
#include "consent/identity/identity.hpp"
#include "consent/network/network.hpp"
#include "consent/piistore/document_store.hpp"
#include "consent/piistore/pii_store.hpp"

namespace consent::api {

struct ApiResponse {
  int status = 200;
  Json body = Json::object();
};

// {"code":...,"message":...,"status":...}
ApiResponse apiError(int status, std::string_view code, std::string_view message);

struct AdminBootstrap {
  std::string id;
  std::string password;
};

struct GatewayConfig {
  std::optional<std::filesystem::path> dataDir;  // memory only when unset
  network::NetworkConfig network = [] {
    network::NetworkConfig c;
    c.peerCount = 4;
    return c;
  }();
  identity::IdentityConfig identity;
  std::optional<AdminBootstrap> admin;
  // Moves the simulated clock up to wall time before each submission so
  // block timestamps track real time.
  bool followWallClock = true;
};

inline constexpr std::string_view kStoreFileName = "store.jsonl";
inline constexpr std::string_view kCompanyNamespace = "company";
inline constexpr std::string_view kGatewaySubmitter = "gateway";

/// The REST surface, independent of transport. Each method takes the bearer
/// token (empty when absent) and the decoded request body, and returns the
/// status and body to send. Ledger writes go through one serialized submit
/// path and return only after the block is committed on every peer.
class Gateway {
 public:
  explicit Gateway(GatewayConfig config, crypto::RandomSource& rng = crypto::osRandom(),
                   Clock clock = systemNowMs);
  ~Gateway();

  ApiResponse registerUser(const Json& body);
  ApiResponse registerCompany(const Json& body);
  ApiResponse login(const Json& body);
  ApiResponse logout(std::string_view token);
  ApiResponse me(std::string_view token);

  ApiResponse putCompanyProfile(std::string_view token, const Json& body);
  ApiResponse accredit(std::string_view token, std::string_view companyId, const Json& body);
  ApiResponse adminListCompanies(std::string_view token);
  ApiResponse listCompanies(std::string_view token);

  ApiResponse putPermission(std::string_view token, std::string_view companyId, const Json& body);
  ApiResponse listPermissions(std::string_view token);
  ApiResponse permissionHistory(std::string_view token, std::string_view companyId);
  ApiResponse companyData(std::string_view token);
  ApiResponse deleteAccount(std::string_view token, const Json& body);

  // Read access for tests and tooling. Not synchronized with requests.
  const network::Network& network() const { return *network_; }
  piistore::DocumentStore& store() { return *store_; }
  piistore::PiiStore& pii() { return *pii_; }
  identity::IdentityService& identity() { return *identity_; }
  const GatewayConfig& config() const noexcept { return config_; }

 private:
  template <typename F>
  ApiResponse guarded(F&& handler);

  identity::Session requireSession(std::string_view token);
  identity::Session requireRole(std::string_view token, identity::Role role);
  std::optional<ledger::CompanyAsset> companyAsset(std::string_view companyId);
  std::optional<std::string> companyIdByName(std::string_view name) const;
  void commit(ledger::Transaction tx);
  std::string newTxId();
  std::int64_t nowMs() const { return clock_(); }

  GatewayConfig config_;
  crypto::RandomSource& rng_;
  Clock clock_;
  std::unique_ptr<piistore::DocumentStore> store_;
  std::unique_ptr<piistore::PiiStore> pii_;
  std::unique_ptr<identity::IdentityService> identity_;
  std::unique_ptr<network::Network> network_;
  std::mutex ledgerMutex_;     // network access, reads and writes
  std::mutex directoryMutex_;  // company name uniqueness
  std::mutex accountMutex_;    // account deletion sequence
};

}  // namespace consent::api
