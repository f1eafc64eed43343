#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "consent/ledger/types.hpp"

namespace consent::ledger {

PairKey computePairKey(std::string_view userId, std::string_view companyId);

std::string permissionKey(const PairKey& key);
std::string companyKey(std::string_view companyId);

std::string hashBlock(const Block& block);

// Height 0, all-zero prevHash, no transactions, timestamp 0.
Block genesisBlock();
std::string zeroHash();

/// Builds the next block on top of `tip` and fills in its hash.
Block makeBlock(const Block& tip, std::int64_t timestampMs, std::vector<Transaction> txs);

/// Empty result means the transaction is structurally valid.
std::vector<std::string> validateTransaction(const Transaction& tx);

/// Materialized latest version of every asset, keyed by "perm:<pairKey>" or
/// "company:<companyId>".
class WorldState {
 public:
  const Asset* find(std::string_view key) const;
  void put(std::string key, Asset asset);
  std::size_t size() const noexcept { return assets_.size(); }
  const std::map<std::string, Asset, std::less<>>& assets() const noexcept { return assets_; }

  Json toJson() const;
  // Hex SHA-256 of the canonical serialization of toJson().
  std::string stateHash() const;

  bool operator==(const WorldState&) const = default;

 private:
  std::map<std::string, Asset, std::less<>> assets_;
};

struct ApplyResult {
  WorldState state;
  bool valid = true;
  std::string reason;
};

/// Functional transition. An invalid transaction leaves the state unchanged
/// and is reported through ApplyResult::valid.
ApplyResult applyTransaction(const WorldState& state, const Transaction& tx);

// In-place variant used on the commit path; same semantics.
bool applyInPlace(WorldState& state, const Transaction& tx, std::string* reason = nullptr);

/// The state key and new value a transaction would write, if valid against
/// `state`. Used for endorsement result hashes.
struct WriteSet {
  std::string key;
  Json value;
};
std::optional<WriteSet> simulateWrite(const WorldState& state, const Transaction& tx,
                                      std::string* reason = nullptr);
std::string writeSetHash(const WriteSet& ws);

std::optional<Asset> queryState(const WorldState& state, std::string_view key);

struct AppendResult {
  bool ok = true;
  std::string reason;
};

class Chain {
 public:
  Chain();  // starts at genesis
  explicit Chain(Block genesis);

  const std::vector<Block>& blocks() const noexcept { return blocks_; }
  const Block& tip() const { return blocks_.back(); }
  std::uint64_t height() const { return blocks_.back().height; }

  /// Checks linkage, height and hash before extending. On failure the chain
  /// is left unchanged.
  AppendResult appendBlock(Block block);

 private:
  std::vector<Block> blocks_;
};

/// Checks a standalone chain, failing at the first bad block.
struct ChainCheck {
  bool ok = true;
  std::optional<std::uint64_t> badHeight;
  std::size_t badIndex = 0;
  std::string reason;
};
ChainCheck checkLinkage(const std::vector<Block>& blocks);

WorldState replay(const std::vector<Block>& blocks);

struct HistoryEntry {
  std::uint64_t height = 0;
  std::string txId;
  Json value;
};
std::vector<HistoryEntry> queryHistory(const std::vector<Block>& blocks, std::string_view key);

}  // namespace consent::ledger
