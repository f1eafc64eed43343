#include "consent/audit/audit.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "consent/common/canonical.hpp"
#include "consent/common/crypto.hpp"
#include "consent/common/error.hpp"
#include "consent/ledger/chain_log.hpp"
#include "consent/ledger/ledger.hpp"
#include "consent/piistore/pii_store.hpp"

namespace consent::audit {

std::string Report::summaryLine() const {
  std::string out = "AUDIT " + check + (verdict == Verdict::Pass ? " PASS" : " FAIL");
  if (!details.empty()) out += " " + details;
  return out;
}

std::string Report::text() const {
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  out += summaryLine() + "\n";
  return out;
}

namespace {

Report ioError(std::string check, const std::exception& e) {
  Report r;
  r.check = std::move(check);
  r.verdict = Verdict::Error;
  r.details = std::string("io-error: ") + e.what();
  return r;
}

// Blocks from a chain file, or a failure description naming the bad height.
struct LoadedChain {
  std::vector<ledger::Block> blocks;
  std::optional<std::string> failure;
};

LoadedChain loadVerified(const std::string& bytes) {
  LoadedChain out;
  auto file = ledger::parseChainBytes(bytes);
  if (file.failure) {
    out.failure = "parse error in record " + std::to_string(file.failure->recordIndex) +
                  " (height " + std::to_string(file.failure->recordIndex) + ") at offset " +
                  std::to_string(file.failure->offset) + ": " + file.failure->reason;
    return out;
  }
  auto check = ledger::checkLinkage(file.blocks);
  if (!check.ok) {
    out.failure = "block at height " + std::to_string(check.badIndex) + ": " + check.reason;
    return out;
  }
  out.blocks = std::move(file.blocks);
  return out;
}

struct PiiDocuments {
  std::map<std::string, piistore::UserRecord> everSeen;  // every user put, by id
  std::set<std::string> live;
  std::set<std::string> deleted;
};

PiiDocuments readPiiFile(const std::filesystem::path& path) {
  PiiDocuments docs;
  std::string content = ledger::readFileBytes(path);
  std::size_t pos = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    std::string_view line(content.data() + pos, (nl == std::string::npos ? content.size() : nl) - pos);
    pos = nl == std::string::npos ? content.size() : nl + 1;
    if (line.empty()) continue;
    Json rec;
    try {
      rec = parseCanonical(line);
    } catch (const Error&) {
      continue;  // torn trailing write
    }
    if (!rec.is_object() || rec.value("ns", "") != piistore::kUserNamespace) continue;
    auto id = rec.value("id", "");
    if (rec.value("op", "") == "put" && rec.contains("doc")) {
      docs.everSeen.insert_or_assign(id, piistore::userFromJson(rec["doc"]));
      docs.live.insert(id);
      docs.deleted.erase(id);
    } else if (rec.value("op", "") == "del") {
      docs.live.erase(id);
      docs.deleted.insert(id);
    }
  }
  return docs;
}

}  // namespace

Report verifyChain(const std::filesystem::path& chainPath) {
  Report r;
  r.check = "verify-chain";
  std::string bytes;
  try {
    bytes = ledger::readFileBytes(chainPath);
  } catch (const std::exception& e) {
    return ioError(r.check, e);
  }
  if (bytes.empty()) {
    r.verdict = Verdict::Fail;
    r.details = "empty chain file has no genesis block";
    return r;
  }
  auto chain = loadVerified(bytes);
  if (chain.failure) {
    r.verdict = Verdict::Fail;
    r.details = *chain.failure;
    return r;
  }
  std::size_t txs = 0;
  for (const auto& b : chain.blocks) txs += b.transactions.size();
  r.lines.push_back("blocks: " + std::to_string(chain.blocks.size()));
  r.lines.push_back("transactions: " + std::to_string(txs));
  r.lines.push_back("tip: " + chain.blocks.back().blockHash);
  r.details = "height=" + std::to_string(chain.blocks.back().height) + " tip=" + chain.blocks.back().blockHash;
  return r;
}

Report scanPii(const std::vector<std::filesystem::path>& chains, const std::filesystem::path& pii) {
  Report r;
  r.check = "scan-pii";
  PiiDocuments docs;
  std::vector<std::pair<std::string, std::string>> chainBytes;
  try {
    docs = readPiiFile(pii);
    for (const auto& c : chains) chainBytes.emplace_back(c.string(), ledger::readFileBytes(c));
  } catch (const std::exception& e) {
    return ioError(r.check, e);
  }

  std::map<std::string, std::string> needles;  // value -> label
  auto addNeedle = [&](const std::string& value, const std::string& label) {
    if (value.size() >= kMinScanLength) needles.emplace(value, label);
  };
  for (const auto& [id, user] : docs.everSeen) {
    addNeedle(id, "userId");
    addNeedle(user.name, "name");
    addNeedle(user.email, "email");
    addNeedle(user.phone, "phone");
    addNeedle(user.location, "location");
  }
  for (const auto& id : docs.deleted) addNeedle(id, "userId");

  std::size_t hits = 0;
  for (const auto& [name, bytes] : chainBytes) {
    auto parsed = ledger::parseChainBytes(bytes);
    for (const auto& [needle, label] : needles) {
      for (auto at = bytes.find(needle); at != std::string::npos; at = bytes.find(needle, at + 1)) {
        ++hits;
        auto rec = std::upper_bound(parsed.offsets.begin(), parsed.offsets.end(), at);
        std::string where = rec == parsed.offsets.begin()
                                ? std::string("?")
                                : std::to_string(rec - parsed.offsets.begin() - 1);
        r.lines.push_back(name + ": " + label + " found at offset " + std::to_string(at) +
                          " (block " + where + ")");
      }
    }
  }
  r.lines.insert(r.lines.begin(), "values scanned: " + std::to_string(needles.size()) +
                                      " across " + std::to_string(chainBytes.size()) + " chain file(s)");
  r.details = "hits=" + std::to_string(hits);
  if (hits > 0) r.verdict = Verdict::Fail;
  return r;
}

Report replay(const std::filesystem::path& chainPath) {
  Report r;
  r.check = "replay";
  std::string bytes;
  try {
    bytes = ledger::readFileBytes(chainPath);
  } catch (const std::exception& e) {
    return ioError(r.check, e);
  }
  auto chain = loadVerified(bytes);
  if (chain.failure) {
    r.verdict = Verdict::Fail;
    r.details = *chain.failure;
    return r;
  }
  auto state = ledger::replay(chain.blocks);
  r.lines.push_back("blocks: " + std::to_string(chain.blocks.size()));
  r.lines.push_back("assets: " + std::to_string(state.size()));
  r.lines.push_back(state.stateHash());
  r.details = "stateHash=" + state.stateHash();
  return r;
}

Report forgetCheck(const std::filesystem::path& chainPath, const std::filesystem::path& pii,
                   const std::string& pairKey) {
  Report r;
  r.check = "forget-check";
  if (!crypto::isLowerHex(pairKey, ledger::kHashHexLength)) {
    r.verdict = Verdict::Error;
    r.details = "usage: pair key must be 64 lowercase hex characters";
    return r;
  }
  std::string bytes;
  PiiDocuments docs;
  try {
    bytes = ledger::readFileBytes(chainPath);
    docs = readPiiFile(pii);
  } catch (const std::exception& e) {
    return ioError(r.check, e);
  }
  auto chain = loadVerified(bytes);
  if (chain.failure) {
    r.verdict = Verdict::Fail;
    r.details = *chain.failure;
    return r;
  }

  auto key = ledger::PairKey::fromHex(pairKey);
  auto stateKey = ledger::permissionKey(key);
  auto history = ledger::queryHistory(chain.blocks, stateKey);
  for (const auto& e : history) {
    r.lines.push_back("height " + std::to_string(e.height) + " tx " + e.txId + " " +
                      canonicalSerialize(e.value["flags"]));
  }
  auto state = ledger::replay(chain.blocks);
  const auto* asset = state.find(stateKey);
  if (asset == nullptr) {
    r.verdict = Verdict::Fail;
    r.details = "not-found: no permission asset for pair key";
    return r;
  }
  const auto& perm = std::get<ledger::PermissionAsset>(*asset);
  if (!perm.flags.allFalse()) {
    r.verdict = Verdict::Fail;
    r.details = "still granted: latest flags " + canonicalSerialize(ledger::toJson(perm.flags));
    return r;
  }
  for (const auto& id : docs.live) {
    if (ledger::computePairKey(id, perm.companyId) == key) {
      r.verdict = Verdict::Fail;
      r.details = "pair key still resolves to a live user record";
      return r;
    }
  }
  std::size_t residue = 0;
  for (const auto& id : docs.deleted) residue += docs.everSeen.contains(id) ? 1 : 0;
  if (residue > 0) {
    r.verdict = Verdict::Fail;
    r.details = "store file still holds PII of " + std::to_string(residue) + " deleted user(s)";
    return r;
  }
  r.details = "history=" + std::to_string(history.size());
  return r;
}

}  // namespace consent::audit
