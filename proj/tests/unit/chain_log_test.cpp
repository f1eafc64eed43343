#include <gtest/gtest.h>

#include "consent/common/crypto.hpp"
#include "consent/common/error.hpp"
#include "consent/ledger/chain_log.hpp"
#include "consent/ledger/ledger.hpp"
#include "test_support.hpp"

using namespace consent;
using namespace consent::ledger;

namespace {

std::vector<Block> sampleChain(int blocks) {
  crypto::SeededRandom ids(21);
  std::string company = crypto::uuidV4(ids);
  Chain chain;
  for (int h = 1; h <= blocks; ++h) {
    auto tx = Transaction::putPermission(
        crypto::uuidV4(ids),
        {computePairKey("user-" + std::to_string(h), company), company, PermissionFlags::fromMask(h % 16)},
        "gateway", 1000 + h);
    EXPECT_TRUE(chain.appendBlock(makeBlock(chain.tip(), 2000 + h, {tx})).ok);
  }
  return chain.blocks();
}

}  // namespace

TEST(ChainLog, FileNameUsesPeerId) { EXPECT_EQ(chainFileName(3), "chain-3.log"); }

TEST(ChainLog, RecordHasBigEndianLengthPrefix) {
  auto rec = encodeRecord(genesisBlock());
  std::string body = canonicalSerialize(toJson(genesisBlock()));
  ASSERT_EQ(rec.size(), body.size() + 4);
  std::uint32_t n = (static_cast<unsigned char>(rec[0]) << 24) | (static_cast<unsigned char>(rec[1]) << 16) |
                    (static_cast<unsigned char>(rec[2]) << 8) | static_cast<unsigned char>(rec[3]);
  EXPECT_EQ(n, body.size());
  EXPECT_EQ(rec.substr(4), body);
}

TEST(ChainLog, WriteThenReadRoundTrips) {
  testutil::TempDir dir;
  auto blocks = sampleChain(12);
  writeChainFile(dir.path() / "chain-0.log", blocks);
  auto file = readChainFile(dir.path() / "chain-0.log");
  ASSERT_FALSE(file.failure.has_value());
  ASSERT_EQ(file.blocks.size(), blocks.size());
  for (std::size_t i = 0; i < blocks.size(); ++i) EXPECT_EQ(file.blocks[i].blockHash, blocks[i].blockHash);
  EXPECT_TRUE(checkLinkage(file.blocks).ok);
  EXPECT_EQ(file.offsets.front(), 0u);
}

TEST(ChainLog, AppenderMatchesBulkWriter) {
  testutil::TempDir dir;
  auto blocks = sampleChain(5);
  {
    ChainLog log(dir.path() / "a.log");
    for (const auto& b : blocks) log.append(b);
  }
  writeChainFile(dir.path() / "b.log", blocks);
  EXPECT_EQ(readFileBytes(dir.path() / "a.log"), readFileBytes(dir.path() / "b.log"));
}

TEST(ChainLog, EmptyInputDecodesToNothing) {
  auto file = parseChainBytes("");
  EXPECT_TRUE(file.blocks.empty());
  EXPECT_FALSE(file.failure.has_value());
}

TEST(ChainLog, TruncationIsReported) {
  auto blocks = sampleChain(3);
  std::string bytes;
  for (const auto& b : blocks) bytes += encodeRecord(b);
  auto cut = parseChainBytes(std::string_view(bytes).substr(0, bytes.size() - 5));
  ASSERT_TRUE(cut.failure.has_value());
  EXPECT_EQ(cut.failure->recordIndex, 3u);
  EXPECT_EQ(cut.blocks.size(), 3u);

  auto prefixOnly = parseChainBytes(std::string_view(bytes).substr(0, 2));
  ASSERT_TRUE(prefixOnly.failure.has_value());
  EXPECT_EQ(prefixOnly.failure->recordIndex, 0u);
}

TEST(ChainLog, NonCanonicalRecordIsRejected) {
  std::string body = canonicalSerialize(toJson(genesisBlock()));
  std::string spaced = body;
  spaced.insert(1, " ");
  std::string rec;
  auto n = static_cast<std::uint32_t>(spaced.size());
  rec.push_back(static_cast<char>(n >> 24));
  rec.push_back(static_cast<char>((n >> 16) & 0xff));
  rec.push_back(static_cast<char>((n >> 8) & 0xff));
  rec.push_back(static_cast<char>(n & 0xff));
  rec += spaced;
  auto file = parseChainBytes(rec);
  ASSERT_TRUE(file.failure.has_value());
  EXPECT_NE(file.failure->reason.find("canonical"), std::string::npos);
}

TEST(ChainLog, LinkageCheckLocatesTamperedBlock) {
  auto blocks = sampleChain(6);
  blocks[4].transactions[0].submitter = "someone";
  auto check = checkLinkage(blocks);
  EXPECT_FALSE(check.ok);
  ASSERT_TRUE(check.badHeight.has_value());
  EXPECT_EQ(*check.badHeight, 4u);
}

TEST(ChainLog, MissingFileThrowsIo) {
  testutil::TempDir dir;
  try {
    readChainFile(dir.path() / "absent.log");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
}
