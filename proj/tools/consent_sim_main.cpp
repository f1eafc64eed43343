// consent-sim: drive the simulated ledger network from scenario files.
//   consent-sim generate --seed 42 --txs 1000 --peers 4 --quorum 3 --out scenario.json
//   consent-sim run --scenario scenario.json --out-dir run/ [--transcript run/transcript.jsonl]

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "consent/common/error.hpp"
#include "consent/network/scenario.hpp"

using namespace consent;

int main(int argc, char** argv) {
  CLI::App app{"Simulated consent ledger network"};
  app.require_subcommand(1);

  network::WorkloadSpec spec;
  network::NetworkConfig config;
  int quorum = 0;
  int latencyMinUs = 0;
  int latencyMaxUs = 0;
  int partitionPeer = -1;
  std::string out;
  auto* gen = app.add_subcommand("generate", "Write a generated mixed workload scenario");
  gen->add_option("--seed", spec.seed, "Seed for ids, workload and transport")->default_val(42);
  gen->add_option("--txs", spec.txCount, "Number of transactions")->default_val(1000);
  gen->add_option("--companies", spec.companies)->default_val(10);
  gen->add_option("--users", spec.users)->default_val(200);
  gen->add_option("--peers", config.peerCount)->default_val(4);
  gen->add_option("--quorum", quorum, "Endorsement quorum (0 = majority)")->default_val(0);
  gen->add_option("--max-block-txs", config.maxBlockTxs)->default_val(10);
  gen->add_option("--block-timeout-ms", config.blockTimeoutMs)->default_val(250);
  gen->add_option("--latency-min-us", latencyMinUs)->default_val(0);
  gen->add_option("--latency-max-us", latencyMaxUs)->default_val(0);
  gen->add_option("--drop-ppm", config.dropPpm, "Message drop rate, parts per million")->default_val(0);
  gen->add_option("--partition-peer", partitionPeer, "Isolate this peer for the middle third")->default_val(-1);
  gen->add_option("--out", out, "Scenario file")->required();

  std::string scenarioPath;
  std::string outDir;
  std::string transcriptPath;
  auto* run = app.add_subcommand("run", "Run a scenario and persist peer chains");
  run->add_option("--scenario", scenarioPath)->required();
  run->add_option("--out-dir", outDir, "Directory for chain-<peer>.log files");
  run->add_option("--transcript", transcriptPath, "Transcript output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) {
      if (quorum > 0) config.quorum = quorum;
      config.latency = {latencyMinUs, latencyMaxUs};
      config.seed = spec.seed;
      if (partitionPeer >= 0) spec.partitionPeer = partitionPeer;
      network::Scenario scenario{config, network::generateWorkload(spec)};
      if (auto violations = config.validate(); !violations.empty()) {
        for (const auto& v : violations) std::cerr << v << "\n";
        return 2;
      }
      network::saveScenario(out, scenario);
      return 0;
    }
    auto scenario = network::loadScenario(scenarioPath);
    std::optional<std::filesystem::path> dir;
    if (!outDir.empty()) dir = outDir;
    auto transcript = network::runScenario(scenario, dir);
    if (transcriptPath.empty()) {
      std::cout << transcript.text();
    } else {
      std::ofstream(transcriptPath, std::ios::binary) << transcript.text();
    }
    std::cerr << "submitted " << transcript.submitted << ", committed " << transcript.committed
              << ", rejected " << transcript.rejected << ", converged "
              << (transcript.converged() ? "yes" : "no") << "\n";
    return transcript.converged() ? 0 : 1;
  } catch (const Error& e) {
    std::cerr << "consent-sim: " << e.what() << "\n";
    return 2;
  }
}
