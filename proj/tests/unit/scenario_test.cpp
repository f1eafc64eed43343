#include <gtest/gtest.h>

#include "consent/common/error.hpp"
#include "consent/network/scenario.hpp"
#include "test_support.hpp"

using namespace consent;
using namespace consent::network;

namespace {

Scenario workload(std::uint64_t seed, int peers, int txs) {
  Scenario s;
  s.config.peerCount = peers;
  s.config.seed = seed;
  s.config.latency = LatencyModel::uniformMs(1, 5);
  WorkloadSpec w;
  w.seed = seed;
  w.txCount = txs;
  w.companies = 4;
  w.users = 30;
  s.steps = generateWorkload(w);
  return s;
}

}  // namespace

TEST(Scenario, SameSeedGivesIdenticalTranscript) {
  auto s = workload(42, 4, 150);
  auto a = runScenario(s);
  auto b = runScenario(s);
  EXPECT_EQ(a.text(), b.text());
  EXPECT_TRUE(a.converged());
  EXPECT_EQ(a.committed, a.submitted);
}

TEST(Scenario, DifferentSeedGivesDifferentTranscript) {
  EXPECT_NE(runScenario(workload(1, 2, 40)).text(), runScenario(workload(2, 2, 40)).text());
}

TEST(Scenario, PeerCountDoesNotChangeFinalState) {
  auto one = workload(7, 1, 120);
  auto four = one;
  one.config.latency = LatencyModel{};
  four.config.latency = LatencyModel{};
  four.config.peerCount = 4;
  auto a = runScenario(one);
  auto b = runScenario(four);
  ASSERT_TRUE(b.converged());
  EXPECT_EQ(a.peers[0].stateHash, b.peers[0].stateHash);
}

TEST(Scenario, LossyLinksWithRetriesStillCommitEverything) {
  auto s = workload(9, 4, 100);
  s.config.setDropProbability(0.2);
  s.config.retryBudget = 20;
  auto t = runScenario(s);
  EXPECT_EQ(t.committed, t.submitted);
  EXPECT_TRUE(t.converged());
}

TEST(Scenario, PartitionedPeerCatchesUpAfterHeal) {
  auto s = workload(11, 4, 120);
  WorkloadSpec w;
  w.seed = 11;
  w.txCount = 120;
  w.companies = 4;
  w.users = 30;
  w.partitionPeer = 2;
  s.steps = generateWorkload(w);
  auto t = runScenario(s);
  EXPECT_TRUE(t.converged());
  EXPECT_EQ(t.committed, t.submitted);
  bool sawPartition = false;
  for (const auto& line : t.lines) sawPartition |= line.find("\"partition\"") != std::string::npos;
  EXPECT_TRUE(sawPartition);
}

TEST(Scenario, JsonRoundTripAndFilePersistence) {
  testutil::TempDir dir;
  auto s = workload(3, 2, 20);
  s.steps.push_back(PartitionStep{1});
  s.steps.push_back(AdvanceStep{500});
  s.steps.push_back(HealStep{1});
  saveScenario(dir.path() / "s.json", s);
  auto loaded = loadScenario(dir.path() / "s.json");
  EXPECT_EQ(canonicalSerialize(toJson(loaded)), canonicalSerialize(toJson(s)));

  auto t = runScenario(loaded, dir.path());
  for (int p = 0; p < 2; ++p) {
    auto file = ledger::readChainFile(dir.path() / ledger::chainFileName(p));
    ASSERT_FALSE(file.failure.has_value());
    EXPECT_EQ(file.blocks.back().blockHash, t.peers[static_cast<std::size_t>(p)].tipHash);
  }
}

TEST(Scenario, RejectsUnknownStep) {
  Json j = toJson(workload(3, 1, 5));
  j["steps"].push_back(Json{{"op", "explode"}});
  EXPECT_THROW(scenarioFromJson(j), Error);
}

TEST(Scenario, WorkloadIsDeterministic) {
  WorkloadSpec w;
  w.seed = 5;
  w.txCount = 50;
  Scenario a, b;
  a.steps = generateWorkload(w);
  b.steps = generateWorkload(w);
  EXPECT_EQ(canonicalSerialize(toJson(a)), canonicalSerialize(toJson(b)));
  w.txCount = 0;
  EXPECT_THROW(generateWorkload(w), Error);
}
