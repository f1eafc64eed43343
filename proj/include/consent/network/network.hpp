#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "consent/ledger/chain_log.hpp"
#include "consent/ledger/ledger.hpp"
#include "consent/network/simulator.hpp"

namespace consent::network {

// Per-link delay, drawn uniformly from [minUs, maxUs]. Equal bounds give a
// fixed delay.
struct LatencyModel {
  SimTime minUs = 0;
  SimTime maxUs = 0;

  static LatencyModel fixedMs(std::int64_t ms) { return {ms * kMicrosPerMs, ms * kMicrosPerMs}; }
  static LatencyModel uniformMs(std::int64_t lo, std::int64_t hi) {
    return {lo * kMicrosPerMs, hi * kMicrosPerMs};
  }
};

struct NetworkConfig {
  int peerCount = 1;
  std::optional<int> quorum;  // unset means simple majority
  int maxBlockTxs = 10;
  std::int64_t blockTimeoutMs = 250;
  LatencyModel latency;
  std::uint32_t dropPpm = 0;  // per-message drop probability, parts per million
  int retryBudget = 8;
  std::int64_t retryTimeoutMs = 50;
  std::uint64_t seed = 0;
  SimTime startUs = 0;

  int effectiveQuorum() const { return quorum.value_or(peerCount / 2 + 1); }
  void setDropProbability(double p) {
    dropPpm = static_cast<std::uint32_t>(p * 1'000'000.0 + 0.5);
  }
  std::vector<std::string> validate() const;
};

Json toJson(const NetworkConfig& config);
// Missing keys keep their defaults. Throws Error(Parse) on mistyped values.
NetworkConfig configFromJson(const Json& j);

struct Endorsement {
  std::string txId;
  int peerId = 0;
  bool ok = false;
  std::string resultHash;  // empty when !ok
  std::string reason;
};

/// A validating peer: full chain copy plus the world state derived from it.
class Peer {
 public:
  enum class DeliverStatus { Committed, Buffered, Duplicate, Rejected };

  struct DeliverResult {
    DeliverStatus status = DeliverStatus::Committed;
    std::vector<std::uint64_t> committed;  // heights, ascending
    std::string reason;
  };

  // With a log path the peer reloads any existing chain from it and appends
  // every commit; an absent file is created holding the genesis block.
  explicit Peer(int id, std::optional<std::filesystem::path> logPath = std::nullopt);

  int id() const noexcept { return id_; }
  const ledger::Chain& chain() const noexcept { return chain_; }
  const ledger::WorldState& state() const noexcept { return state_; }
  std::uint64_t height() const { return chain_.height(); }
  std::string stateHash() const { return state_.stateHash(); }

  Endorsement endorse(const ledger::Transaction& tx) const;
  DeliverResult deliver(ledger::Block block);

  bool alarmed() const noexcept { return !alarms_.empty(); }
  const std::vector<std::string>& alarms() const noexcept { return alarms_; }
  std::size_t buffered() const noexcept { return buffer_.size(); }

  // Transactions on the committed chain that failed to apply, by txId.
  const std::map<std::string, std::string>& invalidTxs() const noexcept { return invalid_; }

 private:
  void commit(ledger::Block block);

  int id_;
  ledger::Chain chain_;
  ledger::WorldState state_;
  std::map<std::uint64_t, ledger::Block> buffer_;
  std::vector<std::string> alarms_;
  std::map<std::string, std::string> invalid_;
  std::optional<ledger::ChainLog> log_;
};

/// The single ordering node. Sequences endorsed transactions and cuts blocks
/// by size or by age of the oldest pending transaction.
class Orderer {
 public:
  Orderer(std::vector<ledger::Block> history, int maxBlockTxs, SimTime blockTimeoutUs);

  // False when the txId was already accepted.
  bool enqueue(ledger::Transaction tx, SimTime now);

  /// Emits a block if the queue holds maxBlockTxs transactions or the oldest
  /// has waited blockTimeout; otherwise nothing.
  std::optional<ledger::Block> cutBlock(SimTime now);

  std::size_t pendingCount() const noexcept { return pending_.size(); }
  std::optional<SimTime> oldestPendingAt() const;
  SimTime blockTimeoutUs() const noexcept { return blockTimeoutUs_; }
  const std::vector<ledger::Block>& blocks() const noexcept { return blocks_; }
  std::uint64_t nextHeight() const { return blocks_.back().height + 1; }

 private:
  struct Pending {
    ledger::Transaction tx;
    SimTime enqueuedAt;
  };
  std::vector<ledger::Block> blocks_;
  std::vector<Pending> pending_;
  std::set<std::string> seen_;
  int maxBlockTxs_;
  SimTime blockTimeoutUs_;
};

enum class TxStatus { Pending, Endorsed, Ordered, Committed, Rejected };

std::string_view txStatusName(TxStatus status);

struct TxRecord {
  ledger::Transaction tx;
  TxStatus status = TxStatus::Pending;
  std::string reason;  // rejection reason, or apply failure when !valid
  bool valid = true;
  SimTime submittedAt = 0;
  std::optional<SimTime> committedAt;  // committed on every peer
  std::uint64_t height = 0;
  int peersCommitted = 0;
};

struct SubmitOutcome {
  bool accepted = false;   // endorsed by quorum and ordered
  bool committed = false;  // on every peer
  bool valid = false;      // applied without error
  std::string reason;
  std::uint64_t height = 0;
};

/// Orderer, N peers and the submitting gateway wired through a seeded
/// simulated transport. Every observable result is a function of
/// (config, seed, sequence of calls).
class Network {
 public:
  explicit Network(NetworkConfig config,
                   std::optional<std::filesystem::path> dataDir = std::nullopt);
  ~Network();
  Network(const Network&) = delete;
  Network& operator=(const Network&) = delete;

  const NetworkConfig& config() const noexcept { return config_; }
  SimTime now() const noexcept { return sched_.now(); }

  // Starts endorsement; the outcome is tracked in record(txId).
  void submit(ledger::Transaction tx);
  // Submits and drives the simulation until the tx is committed on every
  // peer or rejected.
  SubmitOutcome submitAndWait(ledger::Transaction tx);

  void partition(int peerId);
  void heal(int peerId);
  bool partitioned(int peerId) const { return isolated_.contains(peerId); }

  void advance(SimTime us);
  void advanceTo(SimTime t);
  // Runs until no events remain.
  void quiesce();

  std::size_t peerCount() const noexcept { return peers_.size(); }
  const Peer& peer(int id) const { return *peers_.at(static_cast<std::size_t>(id)); }
  const Orderer& orderer() const noexcept { return *orderer_; }

  // Out-of-band delivery for tests; bypasses the transport.
  Peer::DeliverResult deliverDirect(int peerId, ledger::Block block);

  const TxRecord* record(const std::string& txId) const;
  const std::vector<std::string>& submissionOrder() const noexcept { return order_; }

  // Line-delimited canonical records of everything that happened.
  const std::vector<std::string>& transcript() const noexcept { return transcript_; }
  void note(Json record);

 private:
  enum class Node { Gateway, Orderer, Peer };
  struct Address {
    Node node;
    int peer = -1;
  };

  struct EndorseRequest { ledger::Transaction tx; };
  struct EndorseResponse { Endorsement endorsement; };
  struct Broadcast { ledger::Transaction tx; };
  struct BroadcastAck { std::string txId; };
  struct Deliver { ledger::Block block; };
  struct DeliverAck { int peerId; std::uint64_t height; };
  using Message = std::variant<EndorseRequest, EndorseResponse, Broadcast, BroadcastAck, Deliver,
                               DeliverAck>;

  struct ClientState {
    std::map<int, Endorsement> responses;
    int attempts = 0;
  };

  void send(Address from, Address to, Message msg);
  void receive(Address to, Message msg);
  SimTime drawLatency();
  bool drawDrop();

  void onEndorseRequest(int peerId, const ledger::Transaction& tx);
  void onEndorseResponse(const Endorsement& e);
  void onBroadcast(ledger::Transaction tx);
  void onBroadcastAck(const std::string& txId);
  void onDeliver(int peerId, ledger::Block block);
  void onDeliverAck(int peerId, std::uint64_t height);

  void endorsementTimer(std::string txId);
  void broadcastTimer(std::string txId, int attempt);
  void deliveryTimer(int peerId, std::uint64_t height, int attempt);
  void sendBlock(int peerId, std::uint64_t height, int attempt);
  void armBlockTimer();
  void tryCut();
  void recordCommits(int peerId, const std::vector<std::uint64_t>& heights);
  void reject(TxRecord& rec, std::string reason);

  NetworkConfig config_;
  Scheduler sched_;
  std::mt19937_64 rng_;
  std::vector<std::unique_ptr<Peer>> peers_;
  std::unique_ptr<Orderer> orderer_;
  std::vector<std::uint64_t> ackedHeight_;
  std::set<int> isolated_;
  std::optional<SimTime> blockTimerAt_;

  std::unordered_map<std::string, TxRecord> records_;
  std::unordered_map<std::string, ClientState> clients_;
  std::vector<std::string> order_;
  std::vector<std::string> transcript_;
};

}  // namespace consent::network
