#include "consent/ledger/types.hpp"

#include "consent/common/crypto.hpp"
#include "consent/common/error.hpp"

namespace consent::ledger {

namespace {

[[noreturn]] void parseFail(const std::string& what) { throw Error(ErrorCode::Parse, what); }

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) parseFail(std::string("expected object containing '") + name + "'");
  auto it = j.find(name);
  if (it == j.end()) parseFail(std::string("missing field '") + name + "'");
  return *it;
}

std::string stringField(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_string()) parseFail(std::string("field '") + name + "' is not a string");
  return v.get<std::string>();
}

bool boolField(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_boolean()) parseFail(std::string("field '") + name + "' is not a boolean");
  return v.get<bool>();
}

std::int64_t intField(const Json& j, const char* name) {
  const Json& v = field(j, name);
  if (!v.is_number_integer()) parseFail(std::string("field '") + name + "' is not an integer");
  return v.get<std::int64_t>();
}

}  // namespace

PairKey PairKey::fromHex(std::string hex) {
  if (!crypto::isLowerHex(hex, kHashHexLength)) {
    throw Error(ErrorCode::InvalidArgument, "pair key must be 64 lowercase hex characters");
  }
  return PairKey(std::move(hex));
}

PermissionFlags PermissionFlags::fromMask(unsigned mask) {
  return PermissionFlags{(mask & 1u) != 0, (mask & 2u) != 0, (mask & 4u) != 0,
                         (mask & 8u) != 0};
}

unsigned PermissionFlags::mask() const noexcept {
  return (name ? 1u : 0u) | (email ? 2u : 0u) | (phone ? 4u : 0u) | (location ? 8u : 0u);
}

std::string_view txKindName(TxKind kind) {
  switch (kind) {
    case TxKind::PutPermission: return "PutPermission";
    case TxKind::PutCompany: return "PutCompany";
    case TxKind::SetAccreditation: return "SetAccreditation";
    case TxKind::Unknown: break;
  }
  return "Unknown";
}

TxKind parseTxKind(std::string_view name) {
  if (name == "PutPermission") return TxKind::PutPermission;
  if (name == "PutCompany") return TxKind::PutCompany;
  if (name == "SetAccreditation") return TxKind::SetAccreditation;
  return TxKind::Unknown;
}

namespace {

Transaction envelope(std::string txId, TxKind kind, Json payload, std::string submitter,
                     std::int64_t timestampMs) {
  Transaction tx;
  tx.txId = std::move(txId);
  tx.kind = kind;
  tx.kindName = std::string(txKindName(kind));
  tx.payload = std::move(payload);
  tx.submitter = std::move(submitter);
  tx.timestampMs = timestampMs;
  return tx;
}

}  // namespace

Transaction Transaction::putPermission(std::string txId, const PermissionAsset& asset,
                                       std::string submitter, std::int64_t timestampMs) {
  return envelope(std::move(txId), TxKind::PutPermission, toJson(asset), std::move(submitter),
                  timestampMs);
}

Transaction Transaction::putCompany(std::string txId, const CompanyAsset& asset,
                                    std::string submitter, std::int64_t timestampMs) {
  return envelope(std::move(txId), TxKind::PutCompany, toJson(asset), std::move(submitter),
                  timestampMs);
}

Transaction Transaction::setAccreditation(std::string txId, const Accreditation& change,
                                          std::string submitter, std::int64_t timestampMs) {
  return envelope(std::move(txId), TxKind::SetAccreditation, toJson(change),
                  std::move(submitter), timestampMs);
}

bool Transaction::operator==(const Transaction& other) const {
  return txId == other.txId && kindName == other.kindName && payload == other.payload &&
         submitter == other.submitter && timestampMs == other.timestampMs;
}

Json toJson(const PermissionFlags& flags) {
  return Json{{"email", flags.email},
              {"location", flags.location},
              {"name", flags.name},
              {"phone", flags.phone}};
}

Json toJson(const PermissionAsset& asset) {
  return Json{{"companyId", asset.companyId},
              {"flags", toJson(asset.flags)},
              {"pairKey", asset.pairKey.hex()}};
}

Json toJson(const CompanyAsset& asset) {
  return Json{{"accredited", asset.accredited},
              {"companyId", asset.companyId},
              {"contactEmail", asset.contactEmail},
              {"description", asset.description},
              {"name", asset.name}};
}

Json toJson(const Accreditation& change) {
  return Json{{"accredited", change.accredited}, {"companyId", change.companyId}};
}

Json toJson(const Asset& asset) {
  return std::visit([](const auto& a) { return toJson(a); }, asset);
}

Json toJson(const Transaction& tx) {
  return Json{{"kind", tx.kindName},
              {"payload", tx.payload},
              {"submitter", tx.submitter},
              {"timestampMs", tx.timestampMs},
              {"txId", tx.txId}};
}

Json headerJson(const Block& block) {
  Json txs = Json::array();
  for (const auto& tx : block.transactions) txs.push_back(toJson(tx));
  return Json{{"height", block.height},
              {"prevHash", block.prevHash},
              {"timestampMs", block.timestampMs},
              {"transactions", std::move(txs)}};
}

Json toJson(const Block& block) {
  Json j = headerJson(block);
  j["blockHash"] = block.blockHash;
  return j;
}

PermissionFlags flagsFromJson(const Json& j) {
  return PermissionFlags{boolField(j, "name"), boolField(j, "email"), boolField(j, "phone"),
                         boolField(j, "location")};
}

PermissionAsset permissionFromJson(const Json& j) {
  PermissionAsset asset;
  try {
    asset.pairKey = PairKey::fromHex(stringField(j, "pairKey"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::InvalidArgument) parseFail(e.what());
    throw;
  }
  asset.companyId = stringField(j, "companyId");
  asset.flags = flagsFromJson(field(j, "flags"));
  return asset;
}

CompanyAsset companyFromJson(const Json& j) {
  CompanyAsset asset;
  asset.companyId = stringField(j, "companyId");
  asset.name = stringField(j, "name");
  asset.description = stringField(j, "description");
  asset.contactEmail = stringField(j, "contactEmail");
  asset.accredited = boolField(j, "accredited");
  return asset;
}

Accreditation accreditationFromJson(const Json& j) {
  return Accreditation{stringField(j, "companyId"), boolField(j, "accredited")};
}

Transaction transactionFromJson(const Json& j) {
  if (!j.is_object() || j.size() != 5) parseFail("transaction must have exactly 5 fields");
  Transaction tx;
  tx.txId = stringField(j, "txId");
  tx.kindName = stringField(j, "kind");
  tx.kind = parseTxKind(tx.kindName);
  tx.payload = field(j, "payload");
  tx.submitter = stringField(j, "submitter");
  tx.timestampMs = intField(j, "timestampMs");
  return tx;
}

Block blockFromJson(const Json& j) {
  if (!j.is_object() || j.size() != 5) parseFail("block must have exactly 5 fields");
  Block block;
  const Json& height = field(j, "height");
  if (!height.is_number_unsigned() && !(height.is_number_integer() && height.get<std::int64_t>() >= 0)) {
    parseFail("field 'height' is not a non-negative integer");
  }
  block.height = height.get<std::uint64_t>();
  block.prevHash = stringField(j, "prevHash");
  block.timestampMs = intField(j, "timestampMs");
  const Json& txs = field(j, "transactions");
  if (!txs.is_array()) parseFail("field 'transactions' is not an array");
  block.transactions.reserve(txs.size());
  for (const auto& t : txs) block.transactions.push_back(transactionFromJson(t));
  block.blockHash = stringField(j, "blockHash");
  return block;
}

}  // namespace consent::ledger
