#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "consent/network/network.hpp"

namespace consent::network {

struct SubmitStep {
  ledger::Transaction tx;
};
struct PartitionStep {
  int peer = 0;
};
struct HealStep {
  int peer = 0;
};
struct AdvanceStep {
  SimTime us = 0;
};
using ScenarioStep = std::variant<SubmitStep, PartitionStep, HealStep, AdvanceStep>;

/// Declarative workload for the simulator. Stored as one canonical JSON
/// document:
///   {"config":{...},"steps":[{"op":"submit","tx":{...}},
///                            {"op":"advance-clock","us":500},
///                            {"op":"partition","peer":2},{"op":"heal","peer":2}]}
struct Scenario {
  NetworkConfig config;
  std::vector<ScenarioStep> steps;
};

Json toJson(const Scenario& scenario);
Scenario scenarioFromJson(const Json& j);
Scenario loadScenario(const std::filesystem::path& path);
void saveScenario(const std::filesystem::path& path, const Scenario& scenario);

struct PeerSummary {
  int peerId = 0;
  std::uint64_t height = 0;
  std::string tipHash;
  std::string stateHash;
};

struct Transcript {
  std::vector<std::string> lines;
  std::vector<PeerSummary> peers;
  std::vector<std::vector<ledger::Block>> chains;
  std::vector<SimTime> commitLatenciesUs;  // submission order, committed txs only
  std::size_t submitted = 0;
  std::size_t committed = 0;
  std::size_t rejected = 0;

  double meanCommitLatencyUs() const;
  bool converged() const;
  std::string text() const;  // lines joined with '\n', trailing newline
};

/// Runs every step, then lets the network quiesce. With outDir set, each
/// peer persists its chain there as chain-<peerId>.log.
Transcript runScenario(const Scenario& scenario,
                       const std::optional<std::filesystem::path>& outDir = std::nullopt);

struct WorkloadSpec {
  std::uint64_t seed = 0;
  int txCount = 1000;
  int companies = 10;
  int users = 200;
  SimTime maxGapUs = 2000;
  // Isolates this peer for the middle third of the workload.
  std::optional<int> partitionPeer;
};

/// Mixed PutCompany / SetAccreditation / PutPermission traffic with random
/// gaps. Identifiers derive from the seed only.
std::vector<ScenarioStep> generateWorkload(const WorkloadSpec& spec);

}  // namespace consent::network
