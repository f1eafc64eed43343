// audit: checks persisted chain and store files.
//   audit verify-chain --chain chain-0.log
//   audit scan-pii --chain chain-0.log [--chain chain-1.log ...] --pii store.jsonl
//   audit replay --chain chain-0.log
//   audit forget-check --chain chain-0.log --pii store.jsonl --pairkey <hex>
// Exit status: 0 pass, 1 violation, 2 usage or I/O error.

#include <iostream>

#include <CLI11.hpp>

#include "consent/audit/audit.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Consent ledger audit tool"};
  app.require_subcommand(1);

  std::string chain;
  std::vector<std::string> chains;
  std::string pii;
  std::string pairKey;

  auto* verify = app.add_subcommand("verify-chain", "Re-verify every block hash and link");
  verify->add_option("--chain", chain, "Chain log file")->required();

  auto* scan = app.add_subcommand("scan-pii", "Scan chain bytes for PII from the store");
  scan->add_option("--chain", chains, "Chain log file (repeatable)")->required();
  scan->add_option("--pii", pii, "Store file")->required();

  auto* replay = app.add_subcommand("replay", "Replay a chain and print its state hash");
  replay->add_option("--chain", chain, "Chain log file")->required();

  auto* forget = app.add_subcommand("forget-check", "Check erasure for one pair key");
  forget->add_option("--chain", chain, "Chain log file")->required();
  forget->add_option("--pii", pii, "Store file")->required();
  forget->add_option("--pairkey", pairKey, "Pair key, 64 hex characters")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  consent::audit::Report report;
  if (*verify) {
    report = consent::audit::verifyChain(chain);
  } else if (*scan) {
    std::vector<std::filesystem::path> paths(chains.begin(), chains.end());
    report = consent::audit::scanPii(paths, pii);
  } else if (*replay) {
    report = consent::audit::replay(chain);
  } else {
    report = consent::audit::forgetCheck(chain, pii, pairKey);
  }
  std::cout << report.text();
  return report.exitCode();
}
