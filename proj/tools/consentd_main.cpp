// consentd: REST gateway over the simulated ledger network and the
// off-chain store.

#include <csignal>
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "consent/api/http_server.hpp"
#include "consent/common/error.hpp"

using namespace consent;

namespace {
api::HttpServer* g_server = nullptr;

void onSignal(int) {
  if (g_server != nullptr) g_server->stop();
}
}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Consent management API server"};
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string dataDir;
  std::string staticDir;
  int peers = 4;
  int quorum = 0;
  std::int64_t blockTimeoutMs = 250;
  std::uint64_t seed = 0;
  int iterations = 100000;
  app.add_option("--port", port)->default_val(8080);
  app.add_option("--host", host)->default_val("127.0.0.1");
  app.add_option("--data-dir", dataDir, "Directory for store.jsonl and chain-<peer>.log")->required();
  app.add_option("--peers", peers)->default_val(4);
  app.add_option("--quorum", quorum, "Endorsement quorum (0 = majority)")->default_val(0);
  app.add_option("--block-timeout-ms", blockTimeoutMs)->default_val(250);
  app.add_option("--seed", seed, "Seed for the simulated transport")->default_val(0);
  app.add_option("--hash-iterations", iterations, "Password hash iterations")->default_val(100000);
  app.add_option("--static-dir", staticDir, "Serve web UI assets from this directory");
  CLI11_PARSE(app, argc, argv);

  api::GatewayConfig config;
  config.dataDir = dataDir;
  config.network.peerCount = peers;
  if (quorum > 0) config.network.quorum = quorum;
  config.network.blockTimeoutMs = blockTimeoutMs;
  config.network.seed = seed;
  config.identity.iterations = iterations;
  const char* adminId = std::getenv("CONSENT_ADMIN_ID");
  const char* adminPassword = std::getenv("CONSENT_ADMIN_PASSWORD");
  if (adminId != nullptr && adminPassword != nullptr && *adminId != '\0' && *adminPassword != '\0') {
    config.admin = api::AdminBootstrap{adminId, adminPassword};
  } else {
    std::cerr << "consentd: CONSENT_ADMIN_ID / CONSENT_ADMIN_PASSWORD not set; no admin account\n";
  }

  try {
    api::Gateway gateway(config);
    std::optional<std::filesystem::path> assets;
    if (!staticDir.empty()) assets = staticDir;
    api::HttpServer server(gateway, assets);
    g_server = &server;
    std::signal(SIGINT, onSignal);
    std::signal(SIGTERM, onSignal);
    std::cerr << "consentd: listening on " << host << ":" << port << " with " << peers << " peers\n";
    if (!server.listen(host, port)) {
      std::cerr << "consentd: cannot bind " << host << ":" << port << "\n";
      return 1;
    }
    g_server = nullptr;
  } catch (const Error& e) {
    std::cerr << "consentd: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
