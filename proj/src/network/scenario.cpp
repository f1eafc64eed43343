#include "consent/network/scenario.hpp"

#include <fstream>
#include <numeric>
#include <random>

#include "consent/common/crypto.hpp"
#include "consent/common/error.hpp"

namespace consent::network {

Json toJson(const Scenario& scenario) {
  Json steps = Json::array();
  for (const auto& step : scenario.steps) {
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, SubmitStep>) {
            steps.push_back(Json{{"op", "submit"}, {"tx", ledger::toJson(s.tx)}});
          } else if constexpr (std::is_same_v<S, PartitionStep>) {
            steps.push_back(Json{{"op", "partition"}, {"peer", s.peer}});
          } else if constexpr (std::is_same_v<S, HealStep>) {
            steps.push_back(Json{{"op", "heal"}, {"peer", s.peer}});
          } else {
            steps.push_back(Json{{"op", "advance-clock"}, {"us", s.us}});
          }
        },
        step);
  }
  return Json{{"config", toJson(scenario.config)}, {"steps", std::move(steps)}};
}

Scenario scenarioFromJson(const Json& j) {
  if (!j.is_object() || !j.contains("config") || !j.contains("steps") || !j["steps"].is_array()) {
    throw Error(ErrorCode::Parse, "scenario needs 'config' and a 'steps' array");
  }
  Scenario scenario;
  scenario.config = configFromJson(j["config"]);
  auto intOf = [](const Json& step, const char* key) {
    if (!step.contains(key) || !step[key].is_number_integer()) {
      throw Error(ErrorCode::Parse, std::string("step needs integer '") + key + "'");
    }
    return step[key].get<std::int64_t>();
  };
  for (const auto& step : j["steps"]) {
    if (!step.is_object() || !step.contains("op") || !step["op"].is_string()) {
      throw Error(ErrorCode::Parse, "step needs an 'op' string");
    }
    auto op = step["op"].get<std::string>();
    if (op == "submit") {
      if (!step.contains("tx")) throw Error(ErrorCode::Parse, "submit step needs 'tx'");
      scenario.steps.emplace_back(SubmitStep{ledger::transactionFromJson(step["tx"])});
    } else if (op == "partition") {
      scenario.steps.emplace_back(PartitionStep{static_cast<int>(intOf(step, "peer"))});
    } else if (op == "heal") {
      scenario.steps.emplace_back(HealStep{static_cast<int>(intOf(step, "peer"))});
    } else if (op == "advance-clock") {
      scenario.steps.emplace_back(AdvanceStep{intOf(step, "us")});
    } else {
      throw Error(ErrorCode::Parse, "unknown step op '" + op + "'");
    }
  }
  return scenario;
}

Scenario loadScenario(const std::filesystem::path& path) {
  return scenarioFromJson(parseCanonical(ledger::readFileBytes(path)));
}

void saveScenario(const std::filesystem::path& path, const Scenario& scenario) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << canonicalSerialize(toJson(scenario)) << '\n';
}

double Transcript::meanCommitLatencyUs() const {
  if (commitLatenciesUs.empty()) return 0.0;
  double sum = std::accumulate(commitLatenciesUs.begin(), commitLatenciesUs.end(), 0.0);
  return sum / static_cast<double>(commitLatenciesUs.size());
}

bool Transcript::converged() const {
  for (const auto& p : peers) {
    if (p.stateHash != peers.front().stateHash || p.tipHash != peers.front().tipHash) return false;
  }
  return true;
}

std::string Transcript::text() const {
  std::string out;
  for (const auto& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

Transcript runScenario(const Scenario& scenario,
                       const std::optional<std::filesystem::path>& outDir) {
  Network net(scenario.config, outDir);
  for (const auto& step : scenario.steps) {
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, SubmitStep>) {
            net.submit(s.tx);
          } else if constexpr (std::is_same_v<S, PartitionStep>) {
            net.partition(s.peer);
          } else if constexpr (std::is_same_v<S, HealStep>) {
            net.heal(s.peer);
          } else {
            net.advance(s.us);
          }
        },
        step);
  }
  net.quiesce();

  Transcript t;
  for (int p = 0; p < static_cast<int>(net.peerCount()); ++p) {
    const Peer& peer = net.peer(p);
    PeerSummary summary{p, peer.height(), peer.chain().tip().blockHash, peer.stateHash()};
    net.note(Json{{"event", "final"},
                  {"height", summary.height},
                  {"peer", p},
                  {"stateHash", summary.stateHash},
                  {"tipHash", summary.tipHash}});
    t.peers.push_back(std::move(summary));
    t.chains.push_back(peer.chain().blocks());
  }
  for (const auto& txId : net.submissionOrder()) {
    const TxRecord* rec = net.record(txId);
    ++t.submitted;
    if (rec->status == TxStatus::Committed) {
      ++t.committed;
      t.commitLatenciesUs.push_back(*rec->committedAt - rec->submittedAt);
    } else if (rec->status == TxStatus::Rejected) {
      ++t.rejected;
    }
  }
  SimTime total = std::accumulate(t.commitLatenciesUs.begin(), t.commitLatenciesUs.end(), SimTime{0});
  SimTime mean = t.commitLatenciesUs.empty() ? 0 : total / static_cast<SimTime>(t.commitLatenciesUs.size());
  net.note(Json{{"event", "summary"},
                {"committed", t.committed},
                {"meanCommitLatencyUs", mean},
                {"rejected", t.rejected},
                {"submitted", t.submitted}});
  t.lines = net.transcript();
  return t;
}

std::vector<ScenarioStep> generateWorkload(const WorkloadSpec& spec) {
  if (spec.txCount < 1 || spec.companies < 1 || spec.users < 1) {
    throw Error(ErrorCode::InvalidArgument, "workload sizes must be positive");
  }
  crypto::SeededRandom ids(spec.seed ^ 0x9e3779b97f4a7c15ULL);
  std::mt19937_64 rng(spec.seed);
  auto below = [&](std::uint64_t n) { return static_cast<int>(rng() % n); };

  std::vector<ScenarioStep> steps;
  SimTime clock = 0;
  auto submit = [&](ledger::Transaction tx) { steps.emplace_back(SubmitStep{std::move(tx)}); };
  auto gap = [&] {
    SimTime us = static_cast<SimTime>(rng() % static_cast<std::uint64_t>(spec.maxGapUs + 1));
    if (us > 0) {
      steps.emplace_back(AdvanceStep{us});
      clock += us;
    }
  };

  std::vector<ledger::CompanyAsset> companies;
  int seeded = std::min(spec.companies, spec.txCount);
  for (int i = 0; i < seeded; ++i) {
    ledger::CompanyAsset c;
    c.companyId = crypto::uuidV4(ids);
    c.name = "Company " + std::to_string(i);
    c.description = "Synthetic company number " + std::to_string(i);
    c.contactEmail = "contact" + std::to_string(i) + "@company.example";
    c.accredited = false;
    companies.push_back(c);
    submit(ledger::Transaction::putCompany(crypto::uuidV4(ids), c, c.companyId, clock / kMicrosPerMs));
    gap();
  }
  // Let the company records commit before traffic refers to them.
  steps.emplace_back(AdvanceStep{300 * kMicrosPerMs});
  clock += 300 * kMicrosPerMs;

  std::vector<std::string> users;
  for (int i = 0; i < spec.users; ++i) users.push_back(crypto::uuidV4(ids));

  int remaining = spec.txCount - seeded;
  int partitionAt = remaining / 3;
  int healAt = 2 * remaining / 3;
  for (int i = 0; i < remaining; ++i) {
    if (spec.partitionPeer && i == partitionAt) steps.emplace_back(PartitionStep{*spec.partitionPeer});
    if (spec.partitionPeer && i == healAt) steps.emplace_back(HealStep{*spec.partitionPeer});

    int roll = below(100);
    std::int64_t ts = clock / kMicrosPerMs;
    if (roll < 70) {
      const auto& company = companies[static_cast<std::size_t>(below(companies.size()))];
      const auto& user = users[static_cast<std::size_t>(below(users.size()))];
      ledger::PermissionAsset asset{ledger::computePairKey(user, company.companyId),
                                    company.companyId,
                                    ledger::PermissionFlags::fromMask(static_cast<unsigned>(below(16)))};
      submit(ledger::Transaction::putPermission(crypto::uuidV4(ids), asset, "gateway", ts));
    } else if (roll < 85) {
      const auto& company = companies[static_cast<std::size_t>(below(companies.size()))];
      submit(ledger::Transaction::setAccreditation(
          crypto::uuidV4(ids), ledger::Accreditation{company.companyId, below(2) == 1}, "admin", ts));
    } else {
      auto& company = companies[static_cast<std::size_t>(below(companies.size()))];
      company.description = "Revision " + std::to_string(i) + " of " + company.name;
      submit(ledger::Transaction::putCompany(crypto::uuidV4(ids), company, company.companyId, ts));
    }
    gap();
  }
  if (spec.partitionPeer && healAt >= remaining) steps.emplace_back(HealStep{*spec.partitionPeer});
  return steps;
}

}  // namespace consent::network
