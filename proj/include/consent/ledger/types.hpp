#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "consent/common/canonical.hpp"

namespace consent::ledger {

inline constexpr std::size_t kHashHexLength = 64;

/// Anonymous on-chain identifier of one user/company consent relationship.
/// Holds the lowercase hex SHA-256 of userId ":" companyId.
class PairKey {
 public:
  PairKey() = default;
  // Throws Error(InvalidArgument) unless hex is 64 lowercase hex chars.
  static PairKey fromHex(std::string hex);

  const std::string& hex() const noexcept { return hex_; }
  bool operator==(const PairKey&) const = default;
  auto operator<=>(const PairKey&) const = default;

 private:
  explicit PairKey(std::string hex) : hex_(std::move(hex)) {}
  std::string hex_;
};

struct PermissionFlags {
  bool name = false;
  bool email = false;
  bool phone = false;
  bool location = false;

  bool allFalse() const noexcept { return !name && !email && !phone && !location; }
  // Bit 0 name, 1 email, 2 phone, 3 location.
  static PermissionFlags fromMask(unsigned mask);
  unsigned mask() const noexcept;

  bool operator==(const PermissionFlags&) const = default;
};

struct PermissionAsset {
  PairKey pairKey;
  std::string companyId;
  PermissionFlags flags;

  bool operator==(const PermissionAsset&) const = default;
};

struct CompanyAsset {
  std::string companyId;
  std::string name;
  std::string description;
  std::string contactEmail;
  bool accredited = false;

  bool operator==(const CompanyAsset&) const = default;
};

struct Accreditation {
  std::string companyId;
  bool accredited = false;

  bool operator==(const Accreditation&) const = default;
};

using Asset = std::variant<PermissionAsset, CompanyAsset>;

enum class TxKind { PutPermission, PutCompany, SetAccreditation, Unknown };

std::string_view txKindName(TxKind kind);
TxKind parseTxKind(std::string_view name);

/// Transaction envelope. The payload is kept in its wire form so that
/// validation can inspect exactly what would be committed, including any
/// fields a typed decoder would silently drop.
struct Transaction {
  std::string txId;
  TxKind kind = TxKind::Unknown;
  std::string kindName;  // as received; differs from txKindName only for Unknown
  Json payload = Json::object();
  std::string submitter;
  std::int64_t timestampMs = 0;

  static Transaction putPermission(std::string txId, const PermissionAsset& asset,
                                   std::string submitter, std::int64_t timestampMs);
  static Transaction putCompany(std::string txId, const CompanyAsset& asset,
                                std::string submitter, std::int64_t timestampMs);
  static Transaction setAccreditation(std::string txId, const Accreditation& change,
                                      std::string submitter, std::int64_t timestampMs);

  bool operator==(const Transaction& other) const;
};

struct Block {
  std::uint64_t height = 0;
  std::string prevHash;
  std::int64_t timestampMs = 0;
  std::vector<Transaction> transactions;
  std::string blockHash;
};

// JSON mapping. Decoders throw Error(Parse) on missing or mistyped fields.
Json toJson(const PermissionFlags& flags);
Json toJson(const PermissionAsset& asset);
Json toJson(const CompanyAsset& asset);
Json toJson(const Accreditation& change);
Json toJson(const Asset& asset);
Json toJson(const Transaction& tx);
Json toJson(const Block& block);
Json headerJson(const Block& block);  // everything except blockHash

PermissionFlags flagsFromJson(const Json& j);
PermissionAsset permissionFromJson(const Json& j);
CompanyAsset companyFromJson(const Json& j);
Accreditation accreditationFromJson(const Json& j);
Transaction transactionFromJson(const Json& j);
Block blockFromJson(const Json& j);

}  // namespace consent::ledger
