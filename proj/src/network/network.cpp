#include "consent/network/network.hpp"

#include <algorithm>

#include "consent/common/error.hpp"

namespace consent::network {

using ledger::Block;
using ledger::Transaction;

std::vector<std::string> NetworkConfig::validate() const {
  std::vector<std::string> out;
  if (peerCount < 1) out.push_back("peerCount must be at least 1");
  int k = effectiveQuorum();
  if (k < 1 || k > peerCount) out.push_back("quorum must be between 1 and peerCount");
  if (maxBlockTxs < 1) out.push_back("maxBlockTxs must be at least 1");
  if (blockTimeoutMs < 1) out.push_back("blockTimeoutMs must be at least 1");
  if (latency.minUs < 0 || latency.maxUs < latency.minUs) {
    out.push_back("latency bounds must satisfy 0 <= min <= max");
  }
  if (dropPpm > 1'000'000) out.push_back("drop probability must be within [0, 1]");
  if (retryBudget < 0) out.push_back("retryBudget must be non-negative");
  if (retryTimeoutMs < 1) out.push_back("retryTimeoutMs must be at least 1");
  return out;
}

Json toJson(const NetworkConfig& c) {
  Json j{{"peerCount", c.peerCount},
         {"maxBlockTxs", c.maxBlockTxs},
         {"blockTimeoutMs", c.blockTimeoutMs},
         {"latencyMinUs", c.latency.minUs},
         {"latencyMaxUs", c.latency.maxUs},
         {"dropPpm", c.dropPpm},
         {"retryBudget", c.retryBudget},
         {"retryTimeoutMs", c.retryTimeoutMs},
         {"seed", c.seed}};
  if (c.quorum) j["quorum"] = *c.quorum;
  return j;
}

NetworkConfig configFromJson(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::Parse, "network config must be an object");
  NetworkConfig c;
  auto get = [&](const char* key, auto& target) {
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_number_integer()) {
      throw Error(ErrorCode::Parse, std::string("config field '") + key + "' must be an integer");
    }
    target = it->get<std::remove_reference_t<decltype(target)>>();
  };
  get("peerCount", c.peerCount);
  if (j.contains("quorum")) {
    int q = 0;
    get("quorum", q);
    c.quorum = q;
  }
  get("maxBlockTxs", c.maxBlockTxs);
  get("blockTimeoutMs", c.blockTimeoutMs);
  get("latencyMinUs", c.latency.minUs);
  get("latencyMaxUs", c.latency.maxUs);
  get("dropPpm", c.dropPpm);
  get("retryBudget", c.retryBudget);
  get("retryTimeoutMs", c.retryTimeoutMs);
  get("seed", c.seed);
  return c;
}

std::string_view txStatusName(TxStatus status) {
  switch (status) {
    case TxStatus::Pending: return "pending";
    case TxStatus::Endorsed: return "endorsed";
    case TxStatus::Ordered: return "ordered";
    case TxStatus::Committed: return "committed";
    case TxStatus::Rejected: return "rejected";
  }
  return "unknown";
}

// ---------- Peer ----------

Peer::Peer(int id, std::optional<std::filesystem::path> logPath) : id_(id) {
  if (!logPath) return;
  std::error_code ec;
  if (std::filesystem::exists(*logPath, ec) && std::filesystem::file_size(*logPath, ec) > 0) {
    auto file = ledger::readChainFile(*logPath);
    if (file.failure) {
      throw Error(ErrorCode::Parse, logPath->string() + ": " + file.failure->reason);
    }
    auto check = ledger::checkLinkage(file.blocks);
    if (!check.ok) throw Error(ErrorCode::Parse, logPath->string() + ": " + check.reason);
    if (file.blocks.front().blockHash != chain_.tip().blockHash) {
      throw Error(ErrorCode::Parse, logPath->string() + ": unexpected genesis block");
    }
    for (std::size_t i = 1; i < file.blocks.size(); ++i) commit(std::move(file.blocks[i]));
    log_.emplace(*logPath);
  } else {
    log_.emplace(*logPath);
    log_->append(chain_.tip());
  }
}

Endorsement Peer::endorse(const Transaction& tx) const {
  Endorsement e;
  e.txId = tx.txId;
  e.peerId = id_;
  if (auto ws = ledger::simulateWrite(state_, tx, &e.reason)) {
    e.ok = true;
    e.resultHash = ledger::writeSetHash(*ws);
  }
  return e;
}

void Peer::commit(Block block) {
  auto appended = chain_.appendBlock(std::move(block));
  if (!appended.ok) throw Error(ErrorCode::Internal, "commit of unverified block: " + appended.reason);
  const Block& b = chain_.tip();
  for (const auto& tx : b.transactions) {
    std::string why;
    if (!ledger::applyInPlace(state_, tx, &why)) invalid_[tx.txId] = why;
  }
  if (log_) log_->append(b);
}

Peer::DeliverResult Peer::deliver(Block block) {
  DeliverResult result;
  auto rejectWith = [&](std::string reason) {
    alarms_.push_back("height " + std::to_string(block.height) + ": " + reason);
    result.status = DeliverStatus::Rejected;
    result.reason = std::move(reason);
    return result;
  };

  if (ledger::hashBlock(block) != block.blockHash) return rejectWith("blockHash does not verify");
  if (block.height <= height()) {
    if (chain_.blocks()[block.height].blockHash != block.blockHash) {
      return rejectWith("conflicts with committed block");
    }
    result.status = DeliverStatus::Duplicate;
    return result;
  }
  if (block.height > height() + 1) {
    buffer_.try_emplace(block.height, std::move(block));
    result.status = DeliverStatus::Buffered;
    return result;
  }

  if (block.prevHash != chain_.tip().blockHash) {
    return rejectWith("prevHash does not match predecessor hash");
  }
  commit(std::move(block));
  result.committed.push_back(height());

  while (!buffer_.empty()) {
    auto it = buffer_.begin();
    if (it->first <= height()) {
      buffer_.erase(it);
      continue;
    }
    if (it->first != height() + 1) break;
    Block next = std::move(it->second);
    buffer_.erase(it);
    if (next.prevHash != chain_.tip().blockHash) {
      alarms_.push_back("height " + std::to_string(next.height) + ": prevHash does not match predecessor hash");
      break;
    }
    commit(std::move(next));
    result.committed.push_back(height());
  }
  return result;
}

// ---------- Orderer ----------

Orderer::Orderer(std::vector<Block> history, int maxBlockTxs, SimTime blockTimeoutUs)
    : blocks_(std::move(history)), maxBlockTxs_(maxBlockTxs), blockTimeoutUs_(blockTimeoutUs) {
  if (blocks_.empty()) blocks_.push_back(ledger::genesisBlock());
  for (const auto& b : blocks_) {
    for (const auto& tx : b.transactions) seen_.insert(tx.txId);
  }
}

bool Orderer::enqueue(Transaction tx, SimTime now) {
  if (!seen_.insert(tx.txId).second) return false;
  pending_.push_back(Pending{std::move(tx), now});
  return true;
}

std::optional<SimTime> Orderer::oldestPendingAt() const {
  if (pending_.empty()) return std::nullopt;
  return pending_.front().enqueuedAt;
}

std::optional<Block> Orderer::cutBlock(SimTime now) {
  if (pending_.empty()) return std::nullopt;
  bool full = pending_.size() >= static_cast<std::size_t>(maxBlockTxs_);
  bool aged = now - pending_.front().enqueuedAt >= blockTimeoutUs_;
  if (!full && !aged) return std::nullopt;

  std::size_t take = std::min(pending_.size(), static_cast<std::size_t>(maxBlockTxs_));
  std::vector<Transaction> txs;
  txs.reserve(take);
  for (std::size_t i = 0; i < take; ++i) txs.push_back(std::move(pending_[i].tx));
  pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(take));

  blocks_.push_back(ledger::makeBlock(blocks_.back(), now / kMicrosPerMs, std::move(txs)));
  return blocks_.back();
}

// ---------- Network ----------

Network::Network(NetworkConfig config, std::optional<std::filesystem::path> dataDir)
    : config_(std::move(config)), sched_(config_.startUs), rng_(config_.seed) {
  if (auto violations = config_.validate(); !violations.empty()) {
    std::string msg = "invalid network config:";
    for (const auto& v : violations) msg += " " + v + ";";
    throw Error(ErrorCode::InvalidArgument, msg);
  }
  if (dataDir) std::filesystem::create_directories(*dataDir);

  for (int i = 0; i < config_.peerCount; ++i) {
    std::optional<std::filesystem::path> logPath;
    if (dataDir) logPath = *dataDir / ledger::chainFileName(i);
    peers_.push_back(std::make_unique<Peer>(i, logPath));
  }

  const Peer* longest = peers_.front().get();
  for (const auto& p : peers_) {
    if (p->height() > longest->height()) longest = p.get();
  }
  orderer_ = std::make_unique<Orderer>(longest->chain().blocks(), config_.maxBlockTxs,
                                       config_.blockTimeoutMs * kMicrosPerMs);
  for (const auto& p : peers_) {
    if (p->chain().blocks()[p->height()].blockHash !=
        longest->chain().blocks()[p->height()].blockHash) {
      throw Error(ErrorCode::Parse, "peer " + std::to_string(p->id()) + " log has diverged");
    }
    ackedHeight_.push_back(p->height());
  }
  for (const auto& p : peers_) {
    for (std::uint64_t h = p->height() + 1; h <= longest->height(); ++h) sendBlock(p->id(), h, 0);
  }
}

Network::~Network() = default;

void Network::note(Json record) {
  record["t"] = sched_.now();
  transcript_.push_back(canonicalSerialize(record));
}

SimTime Network::drawLatency() {
  const auto& l = config_.latency;
  if (l.maxUs == l.minUs) return l.minUs;
  auto span = static_cast<std::uint64_t>(l.maxUs - l.minUs) + 1;
  return l.minUs + static_cast<SimTime>(rng_() % span);
}

bool Network::drawDrop() {
  if (config_.dropPpm == 0) return false;
  return rng_() % 1'000'000u < config_.dropPpm;
}

void Network::send(Address from, Address to, Message msg) {
  auto cutOff = [&](const Address& a) { return a.node == Node::Peer && isolated_.contains(a.peer); };
  if (cutOff(from) || cutOff(to)) return;
  if (drawDrop()) return;
  sched_.after(drawLatency(), [this, to, m = std::move(msg)]() mutable {
    if (to.node == Node::Peer && isolated_.contains(to.peer)) return;
    receive(to, std::move(m));
  });
}

void Network::receive(Address to, Message msg) {
  std::visit(
      [&](auto&& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, EndorseRequest>) {
          onEndorseRequest(to.peer, m.tx);
        } else if constexpr (std::is_same_v<M, EndorseResponse>) {
          onEndorseResponse(m.endorsement);
        } else if constexpr (std::is_same_v<M, Broadcast>) {
          onBroadcast(std::move(m.tx));
        } else if constexpr (std::is_same_v<M, BroadcastAck>) {
          onBroadcastAck(m.txId);
        } else if constexpr (std::is_same_v<M, Deliver>) {
          onDeliver(to.peer, std::move(m.block));
        } else {
          onDeliverAck(m.peerId, m.height);
        }
      },
      msg);
}

void Network::submit(Transaction tx) {
  if (records_.contains(tx.txId)) {
    throw Error(ErrorCode::Conflict, "transaction " + tx.txId + " already submitted");
  }
  std::string txId = tx.txId;
  note(Json{{"event", "submit"}, {"kind", tx.kindName}, {"txId", txId}});
  TxRecord rec;
  rec.tx = std::move(tx);
  rec.submittedAt = sched_.now();
  records_.emplace(txId, std::move(rec));
  clients_.emplace(txId, ClientState{});
  order_.push_back(txId);

  const Transaction& stored = records_.at(txId).tx;
  for (int p = 0; p < config_.peerCount; ++p) {
    send({Node::Gateway}, {Node::Peer, p}, EndorseRequest{stored});
  }
  sched_.after(config_.retryTimeoutMs * kMicrosPerMs, [this, txId] { endorsementTimer(txId); });
}

SubmitOutcome Network::submitAndWait(Transaction tx) {
  std::string txId = tx.txId;
  submit(std::move(tx));
  const TxRecord& rec = records_.at(txId);
  auto unresolved = [&] {
    return rec.status != TxStatus::Committed && rec.status != TxStatus::Rejected;
  };
  sched_.runWhile(unresolved);

  SubmitOutcome out;
  out.accepted = rec.status == TxStatus::Committed || rec.status == TxStatus::Ordered;
  out.committed = rec.status == TxStatus::Committed;
  out.valid = out.committed && rec.valid;
  out.height = rec.height;
  out.reason = unresolved() ? "stalled before commit on every peer" : rec.reason;
  return out;
}

void Network::reject(TxRecord& rec, std::string reason) {
  rec.status = TxStatus::Rejected;
  rec.reason = std::move(reason);
  note(Json{{"event", "rejected"}, {"reason", rec.reason}, {"txId", rec.tx.txId}});
}

void Network::onEndorseRequest(int peerId, const Transaction& tx) {
  send({Node::Peer, peerId}, {Node::Gateway}, EndorseResponse{peers_[peerId]->endorse(tx)});
}

void Network::onEndorseResponse(const Endorsement& e) {
  auto it = records_.find(e.txId);
  if (it == records_.end() || it->second.status != TxStatus::Pending) return;
  TxRecord& rec = it->second;
  ClientState& cs = clients_[e.txId];
  if (!cs.responses.emplace(e.peerId, e).second) return;

  std::map<std::string, int> byHash;
  int rejections = 0;
  std::string firstReason;
  for (const auto& [peer, resp] : cs.responses) {
    if (resp.ok) {
      ++byHash[resp.resultHash];
    } else {
      if (rejections++ == 0) firstReason = resp.reason;
    }
  }
  const int k = config_.effectiveQuorum();
  if (byHash.size() > 1) {
    reject(rec, "endorsement-mismatch");
    return;
  }
  if (!byHash.empty() && byHash.begin()->second >= k) {
    rec.status = TxStatus::Endorsed;
    note(Json{{"event", "endorsed"}, {"txId", e.txId}});
    send({Node::Gateway}, {Node::Orderer}, Broadcast{rec.tx});
    std::string txId = e.txId;
    sched_.after(config_.retryTimeoutMs * kMicrosPerMs, [this, txId] { broadcastTimer(txId, 1); });
    return;
  }
  if (rejections > config_.peerCount - k) reject(rec, "endorsement-rejected: " + firstReason);
}

void Network::endorsementTimer(std::string txId) {
  auto it = records_.find(txId);
  if (it == records_.end() || it->second.status != TxStatus::Pending) return;
  ClientState& cs = clients_[txId];
  if (cs.attempts >= config_.retryBudget) {
    reject(it->second, "quorum-timeout");
    return;
  }
  ++cs.attempts;
  for (int p = 0; p < config_.peerCount; ++p) {
    if (!cs.responses.contains(p)) {
      send({Node::Gateway}, {Node::Peer, p}, EndorseRequest{it->second.tx});
    }
  }
  sched_.after(config_.retryTimeoutMs * kMicrosPerMs, [this, txId] { endorsementTimer(txId); });
}

void Network::broadcastTimer(std::string txId, int attempt) {
  auto it = records_.find(txId);
  if (it == records_.end() || it->second.status != TxStatus::Endorsed) return;
  if (attempt > config_.retryBudget) {
    reject(it->second, "ordering-timeout");
    return;
  }
  send({Node::Gateway}, {Node::Orderer}, Broadcast{it->second.tx});
  sched_.after(config_.retryTimeoutMs * kMicrosPerMs,
               [this, txId, attempt] { broadcastTimer(txId, attempt + 1); });
}

void Network::onBroadcast(Transaction tx) {
  std::string txId = tx.txId;
  bool fresh = orderer_->enqueue(std::move(tx), sched_.now());
  send({Node::Orderer}, {Node::Gateway}, BroadcastAck{txId});
  if (fresh) {
    tryCut();
    armBlockTimer();
  }
}

void Network::onBroadcastAck(const std::string& txId) {
  auto it = records_.find(txId);
  if (it != records_.end() && it->second.status == TxStatus::Endorsed) {
    it->second.status = TxStatus::Ordered;
  }
}

void Network::tryCut() {
  while (auto block = orderer_->cutBlock(sched_.now())) {
    note(Json{{"event", "block"},
              {"hash", block->blockHash},
              {"height", block->height},
              {"txs", block->transactions.size()}});
    for (int p = 0; p < config_.peerCount; ++p) sendBlock(p, block->height, 0);
  }
}

void Network::armBlockTimer() {
  auto oldest = orderer_->oldestPendingAt();
  if (!oldest) return;
  SimTime deadline = *oldest + orderer_->blockTimeoutUs();
  if (blockTimerAt_ && *blockTimerAt_ <= deadline) return;
  blockTimerAt_ = deadline;
  sched_.at(deadline, [this, deadline] {
    if (blockTimerAt_ != deadline) return;
    blockTimerAt_.reset();
    tryCut();
    armBlockTimer();
  });
}

void Network::sendBlock(int peerId, std::uint64_t height, int attempt) {
  send({Node::Orderer}, {Node::Peer, peerId}, Deliver{orderer_->blocks().at(height)});
  sched_.after(config_.retryTimeoutMs * kMicrosPerMs,
               [this, peerId, height, attempt] { deliveryTimer(peerId, height, attempt); });
}

void Network::deliveryTimer(int peerId, std::uint64_t height, int attempt) {
  if (ackedHeight_[peerId] >= height || attempt >= config_.retryBudget) return;
  sendBlock(peerId, height, attempt + 1);
}

void Network::onDeliver(int peerId, Block block) {
  std::uint64_t h = block.height;
  auto result = peers_[peerId]->deliver(std::move(block));
  if (result.status == Peer::DeliverStatus::Rejected) {
    note(Json{{"event", "alarm"}, {"height", h}, {"peer", peerId}, {"reason", result.reason}});
  }
  recordCommits(peerId, result.committed);
  send({Node::Peer, peerId}, {Node::Orderer}, DeliverAck{peerId, peers_[peerId]->height()});
}

void Network::onDeliverAck(int peerId, std::uint64_t height) {
  ackedHeight_[peerId] = std::max(ackedHeight_[peerId], height);
}

Peer::DeliverResult Network::deliverDirect(int peerId, Block block) {
  std::uint64_t h = block.height;
  auto result = peers_.at(static_cast<std::size_t>(peerId))->deliver(std::move(block));
  if (result.status == Peer::DeliverStatus::Rejected) {
    note(Json{{"event", "alarm"}, {"height", h}, {"peer", peerId}, {"reason", result.reason}});
  }
  recordCommits(peerId, result.committed);
  return result;
}

void Network::recordCommits(int peerId, const std::vector<std::uint64_t>& heights) {
  const Peer& peer = *peers_[peerId];
  for (std::uint64_t h : heights) {
    note(Json{{"event", "commit"}, {"height", h}, {"peer", peerId}});
    for (const auto& tx : peer.chain().blocks()[h].transactions) {
      auto it = records_.find(tx.txId);
      if (it == records_.end()) continue;
      TxRecord& rec = it->second;
      rec.height = h;
      if (auto bad = peer.invalidTxs().find(tx.txId); bad != peer.invalidTxs().end()) {
        rec.valid = false;
        rec.reason = bad->second;
      }
      if (++rec.peersCommitted == config_.peerCount) {
        rec.status = TxStatus::Committed;
        rec.committedAt = sched_.now();
        note(Json{{"event", "committed"},
                  {"latencyUs", *rec.committedAt - rec.submittedAt},
                  {"txId", tx.txId},
                  {"valid", rec.valid}});
      }
    }
  }
}

void Network::partition(int peerId) {
  if (peerId < 0 || peerId >= config_.peerCount) {
    throw Error(ErrorCode::InvalidArgument, "no such peer " + std::to_string(peerId));
  }
  isolated_.insert(peerId);
  note(Json{{"event", "partition"}, {"peer", peerId}});
}

void Network::heal(int peerId) {
  if (!isolated_.erase(peerId)) return;
  note(Json{{"event", "heal"}, {"peer", peerId}});
  // Link restored: resend whatever the peer has not acknowledged.
  std::uint64_t from = std::min(ackedHeight_[peerId], peers_[peerId]->height()) + 1;
  for (std::uint64_t h = from; h < orderer_->nextHeight(); ++h) sendBlock(peerId, h, 0);
}

void Network::advance(SimTime us) { sched_.runUntil(sched_.now() + us); }

void Network::advanceTo(SimTime t) { sched_.runUntil(t); }

void Network::quiesce() {
  while (sched_.step()) {
  }
}

const TxRecord* Network::record(const std::string& txId) const {
  auto it = records_.find(txId);
  return it == records_.end() ? nullptr : &it->second;
}

}  // namespace consent::network
