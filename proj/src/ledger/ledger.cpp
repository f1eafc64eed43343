#include "consent/ledger/ledger.hpp"

#include <set>

#include "consent/common/crypto.hpp"
#include "consent/common/error.hpp"

namespace consent::ledger {

PairKey computePairKey(std::string_view userId, std::string_view companyId) {
  std::string input;
  input.reserve(userId.size() + 1 + companyId.size());
  input.append(userId);
  input.push_back(':');
  input.append(companyId);
  return PairKey::fromHex(crypto::sha256Hex(input));
}

std::string permissionKey(const PairKey& key) { return "perm:" + key.hex(); }

std::string companyKey(std::string_view companyId) {
  return "company:" + std::string(companyId);
}

std::string hashBlock(const Block& block) {
  return crypto::sha256Hex(canonicalSerialize(headerJson(block)));
}

std::string zeroHash() { return std::string(kHashHexLength, '0'); }

Block genesisBlock() {
  Block genesis;
  genesis.height = 0;
  genesis.prevHash = zeroHash();
  genesis.timestampMs = 0;
  genesis.blockHash = hashBlock(genesis);
  return genesis;
}

Block makeBlock(const Block& tip, std::int64_t timestampMs, std::vector<Transaction> txs) {
  Block block;
  block.height = tip.height + 1;
  block.prevHash = tip.blockHash;
  block.timestampMs = timestampMs;
  block.transactions = std::move(txs);
  block.blockHash = hashBlock(block);
  return block;
}

namespace {

void checkClosedObject(const Json& obj, const std::set<std::string>& allowed,
                       const std::string& extraMessage, std::vector<std::string>& out) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) out.push_back(extraMessage + ": '" + it.key() + "'");
  }
  for (const auto& name : allowed) {
    if (!obj.contains(name)) out.push_back("missing field '" + name + "'");
  }
}

void checkCompanyId(const Json& payload, std::vector<std::string>& out) {
  auto it = payload.find("companyId");
  if (it == payload.end()) return;
  if (!it->is_string() || !crypto::isUuidV4(it->get<std::string>())) {
    out.push_back("companyId is not a version-4 UUID");
  }
}

void checkType(const Json& payload, const char* name, bool (Json::*pred)() const noexcept,
               const char* typeName, std::vector<std::string>& out) {
  auto it = payload.find(name);
  if (it != payload.end() && !((*it).*pred)()) {
    out.push_back(std::string("field '") + name + "' must be " + typeName);
  }
}

constexpr const char* kPiiViolation = "PII-bearing field on chain";

void validatePermissionPayload(const Json& p, std::vector<std::string>& out) {
  checkClosedObject(p, {"pairKey", "companyId", "flags"}, kPiiViolation, out);
  checkCompanyId(p, out);
  if (auto it = p.find("pairKey"); it != p.end()) {
    if (!it->is_string() || !crypto::isLowerHex(it->get<std::string>(), kHashHexLength)) {
      out.push_back("pairKey is not a 64-character lowercase hex digest");
    }
  }
  if (auto it = p.find("flags"); it != p.end()) {
    if (!it->is_object()) {
      out.push_back("field 'flags' must be an object");
      return;
    }
    checkClosedObject(*it, {"name", "email", "phone", "location"}, kPiiViolation, out);
    for (const char* f : {"name", "email", "phone", "location"}) {
      checkType(*it, f, &Json::is_boolean, "a boolean", out);
    }
  }
}

void validateCompanyPayload(const Json& p, std::vector<std::string>& out) {
  checkClosedObject(p, {"companyId", "name", "description", "contactEmail", "accredited"},
                    "unexpected field", out);
  checkCompanyId(p, out);
  for (const char* f : {"name", "description", "contactEmail"}) {
    checkType(p, f, &Json::is_string, "a string", out);
  }
  checkType(p, "accredited", &Json::is_boolean, "a boolean", out);
  if (auto it = p.find("name"); it != p.end() && it->is_string() && it->get<std::string>().empty()) {
    out.push_back("company name must not be empty");
  }
}

void validateAccreditationPayload(const Json& p, std::vector<std::string>& out) {
  checkClosedObject(p, {"companyId", "accredited"}, "unexpected field", out);
  checkCompanyId(p, out);
  checkType(p, "accredited", &Json::is_boolean, "a boolean", out);
}

}  // namespace

std::vector<std::string> validateTransaction(const Transaction& tx) {
  std::vector<std::string> out;
  if (!crypto::isUuidV4(tx.txId)) out.push_back("txId is not a version-4 UUID");
  if (!tx.payload.is_object()) {
    out.push_back("payload must be an object");
    return out;
  }
  switch (tx.kind) {
    case TxKind::PutPermission: validatePermissionPayload(tx.payload, out); break;
    case TxKind::PutCompany: validateCompanyPayload(tx.payload, out); break;
    case TxKind::SetAccreditation: validateAccreditationPayload(tx.payload, out); break;
    case TxKind::Unknown: out.push_back("unknown transaction kind '" + tx.kindName + "'"); break;
  }
  return out;
}

const Asset* WorldState::find(std::string_view key) const {
  auto it = assets_.find(key);
  return it == assets_.end() ? nullptr : &it->second;
}

void WorldState::put(std::string key, Asset asset) {
  assets_.insert_or_assign(std::move(key), std::move(asset));
}

Json WorldState::toJson() const {
  Json out = Json::object();
  for (const auto& [key, asset] : assets_) out[key] = ledger::toJson(asset);
  return out;
}

std::string WorldState::stateHash() const { return crypto::sha256Hex(canonicalSerialize(toJson())); }

namespace {

bool fail(std::string* reason, std::string text) {
  if (reason) *reason = std::move(text);
  return false;
}

std::string joined(const std::vector<std::string>& violations) {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v;
  }
  return out;
}

}  // namespace

std::optional<WriteSet> simulateWrite(const WorldState& state, const Transaction& tx,
                                      std::string* reason) {
  if (auto violations = validateTransaction(tx); !violations.empty()) {
    fail(reason, joined(violations));
    return std::nullopt;
  }
  switch (tx.kind) {
    case TxKind::PutPermission: {
      auto asset = permissionFromJson(tx.payload);
      return WriteSet{permissionKey(asset.pairKey), toJson(asset)};
    }
    case TxKind::PutCompany: {
      auto asset = companyFromJson(tx.payload);
      return WriteSet{companyKey(asset.companyId), toJson(asset)};
    }
    case TxKind::SetAccreditation: {
      auto change = accreditationFromJson(tx.payload);
      std::string key = companyKey(change.companyId);
      const Asset* existing = state.find(key);
      if (existing == nullptr || !std::holds_alternative<CompanyAsset>(*existing)) {
        fail(reason, "unknown company " + change.companyId);
        return std::nullopt;
      }
      // Only the accreditation field is written; the rest of the asset is
      // whatever the committed state holds at apply time.
      return WriteSet{key, Json{{"accredited", change.accredited}}};
    }
    case TxKind::Unknown: break;
  }
  fail(reason, "unknown transaction kind");
  return std::nullopt;
}

std::string writeSetHash(const WriteSet& ws) {
  return crypto::sha256Hex(canonicalSerialize(Json{{"key", ws.key}, {"value", ws.value}}));
}

bool applyInPlace(WorldState& state, const Transaction& tx, std::string* reason) {
  if (auto violations = validateTransaction(tx); !violations.empty()) {
    return fail(reason, joined(violations));
  }
  switch (tx.kind) {
    case TxKind::PutPermission: {
      auto asset = permissionFromJson(tx.payload);
      auto key = permissionKey(asset.pairKey);
      state.put(std::move(key), std::move(asset));
      return true;
    }
    case TxKind::PutCompany: {
      auto asset = companyFromJson(tx.payload);
      auto key = companyKey(asset.companyId);
      state.put(std::move(key), std::move(asset));
      return true;
    }
    case TxKind::SetAccreditation: {
      auto change = accreditationFromJson(tx.payload);
      std::string key = companyKey(change.companyId);
      const Asset* existing = state.find(key);
      if (existing == nullptr || !std::holds_alternative<CompanyAsset>(*existing)) {
        return fail(reason, "unknown company " + change.companyId);
      }
      CompanyAsset updated = std::get<CompanyAsset>(*existing);
      updated.accredited = change.accredited;
      state.put(std::move(key), std::move(updated));
      return true;
    }
    case TxKind::Unknown: break;
  }
  return fail(reason, "unknown transaction kind");
}

ApplyResult applyTransaction(const WorldState& state, const Transaction& tx) {
  ApplyResult result{state, true, {}};
  result.valid = applyInPlace(result.state, tx, &result.reason);
  return result;
}

std::optional<Asset> queryState(const WorldState& state, std::string_view key) {
  if (const Asset* a = state.find(key)) return *a;
  return std::nullopt;
}

Chain::Chain() : Chain(genesisBlock()) {}

Chain::Chain(Block genesis) {
  auto check = checkLinkage({genesis});
  if (!check.ok) throw Error(ErrorCode::InvalidArgument, "invalid genesis block: " + check.reason);
  blocks_.push_back(std::move(genesis));
}

namespace {

std::optional<std::string> linkError(const Block& prev, const Block& next) {
  if (next.height != prev.height + 1) {
    return "height " + std::to_string(next.height) + " does not follow " +
           std::to_string(prev.height);
  }
  if (next.prevHash != prev.blockHash) return "prevHash does not match predecessor hash";
  return std::nullopt;
}

std::optional<std::string> selfError(const Block& block) {
  if (!crypto::isLowerHex(block.blockHash, kHashHexLength)) return "malformed blockHash";
  if (hashBlock(block) != block.blockHash) return "blockHash does not verify";
  return std::nullopt;
}

}  // namespace

AppendResult Chain::appendBlock(Block block) {
  if (auto err = linkError(tip(), block)) return {false, *err};
  if (auto err = selfError(block)) return {false, *err};
  blocks_.push_back(std::move(block));
  return {};
}

ChainCheck checkLinkage(const std::vector<Block>& blocks) {
  ChainCheck check;
  auto failAt = [&](std::size_t index, std::string reason) {
    check.ok = false;
    check.badIndex = index;
    check.badHeight = blocks[index].height;
    check.reason = std::move(reason);
    return check;
  };
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const Block& b = blocks[i];
    if (i == 0) {
      if (b.height != 0 || b.prevHash != zeroHash() || !b.transactions.empty()) {
        return failAt(i, "first block is not a genesis block");
      }
    } else if (auto err = linkError(blocks[i - 1], b)) {
      return failAt(i, *err);
    }
    if (auto err = selfError(b)) return failAt(i, *err);
  }
  return check;
}

WorldState replay(const std::vector<Block>& blocks) {
  WorldState state;
  for (const auto& block : blocks) {
    for (const auto& tx : block.transactions) applyInPlace(state, tx);
  }
  return state;
}

std::vector<HistoryEntry> queryHistory(const std::vector<Block>& blocks, std::string_view key) {
  std::vector<HistoryEntry> out;
  WorldState state;
  for (const auto& block : blocks) {
    for (const auto& tx : block.transactions) {
      auto write = simulateWrite(state, tx);
      if (!applyInPlace(state, tx)) continue;
      if (write && write->key == key) {
        out.push_back({block.height, tx.txId, toJson(*state.find(key))});
      }
    }
  }
  return out;
}

}  // namespace consent::ledger
