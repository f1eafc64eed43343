#include <gtest/gtest.h>

#include "consent/common/canonical.hpp"
#include "consent/common/error.hpp"
#include "consent/ledger/types.hpp"
#include "test_support.hpp"

using namespace consent;

TEST(Canonical, SortsKeysAndDropsWhitespace) {
  EXPECT_EQ(canonicalSerialize(Json::parse(R"({ "b": 1, "a": 2 })")), R"({"a":2,"b":1})");
  EXPECT_EQ(canonicalSerialize(Json::object()), "{}");
  EXPECT_EQ(canonicalSerialize(Json::parse(R"({"z":[3, {"y":true,"x":false}],"a":"s"})")),
            R"({"a":"s","z":[3,{"x":false,"y":true}]})");
}

TEST(Canonical, IntegersAndStrings) {
  EXPECT_EQ(canonicalSerialize(Json(-17)), "-17");
  EXPECT_EQ(canonicalSerialize(Json(std::uint64_t{18446744073709551615ULL})), "18446744073709551615");
  EXPECT_EQ(canonicalSerialize(Json("q\"b\\n\n")), R"("q\"b\\n\n")");
  EXPECT_EQ(canonicalSerialize(Json("\x01")), R"("\u0001")");
  EXPECT_EQ(canonicalSerialize(Json("é/")), "\"é/\"");
}

TEST(Canonical, RejectsFloats) {
  EXPECT_THROW(canonicalSerialize(Json(1.5)), Error);
  EXPECT_THROW(canonicalSerialize(Json{{"a", {1, 2.0}}}), Error);
}

TEST(Canonical, RejectsInvalidUtf8) {
  EXPECT_THROW(canonicalSerialize(Json(std::string("\xff\xfe"))), Error);
}

// Golden files were produced by Python's json.dumps(sort_keys=True,
// separators=(',', ':'), ensure_ascii=False).
TEST(Canonical, MatchesGoldenTransaction) {
  const auto golden = testutil::testdata("permission_tx.canonical");
  ledger::PermissionAsset asset{
      ledger::PairKey::fromHex("11c8a3eca8f1c26104a7c62dfea573439d94eb3a08c0e7155d46adab24e719d0"),
      "0b1e5c36-7a2d-4c1f-8e3b-9d4a6f2c1e05",
      ledger::PermissionFlags{.name = true}};
  auto tx = ledger::Transaction::putPermission("3f1c2b4a-8d9e-4f00-9a1b-2c3d4e5f6a7b", asset,
                                               "gateway", 1700000000000);
  EXPECT_EQ(canonicalSerialize(ledger::toJson(tx)), golden);
}

TEST(Canonical, MatchesGoldenCompanyWithEscapes) {
  const auto golden = testutil::testdata("company_asset.canonical");
  ledger::CompanyAsset company{"0b1e5c36-7a2d-4c1f-8e3b-9d4a6f2c1e05", "Acme \"Data\" Ltd",
                               "line1\nline2\ttab \\ back é \x01 ctl", "privacy@acme.example", true};
  EXPECT_EQ(canonicalSerialize(ledger::toJson(company)), golden);
  EXPECT_EQ(canonicalSerialize(parseCanonical(golden)), golden);
}
