#include <gtest/gtest.h>

#include <set>

#include "consent/common/crypto.hpp"
#include "consent/common/error.hpp"

using namespace consent;

// Digests below were computed with Python's hashlib.
TEST(Sha256, MatchesIndependentDigests) {
  EXPECT_EQ(crypto::sha256Hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(crypto::sha256Hex("{}"), "44136fa355b3678a1146ad16f7e8649e94fb4fc21fe77e8310c060f61caaff8a");
  EXPECT_EQ(crypto::sha256Hex("u:c"), "11c8a3eca8f1c26104a7c62dfea573439d94eb3a08c0e7155d46adab24e719d0");
}

TEST(Hex, RoundTripsAndRejectsGarbage) {
  std::vector<std::uint8_t> bytes{0x00, 0x7f, 0x80, 0xff};
  EXPECT_EQ(crypto::toHex(bytes), "007f80ff");
  EXPECT_EQ(crypto::fromHex("007f80ff"), bytes);
  EXPECT_EQ(crypto::fromHex("007F80FF"), bytes);
  EXPECT_THROW(crypto::fromHex("abc"), Error);
  EXPECT_THROW(crypto::fromHex("zz"), Error);
}

TEST(Uuid, GeneratedIdsAreVersion4AndDistinct) {
  crypto::SeededRandom rng(7);
  std::set<std::string> seen;
  for (int i = 0; i < 500; ++i) {
    auto id = crypto::uuidV4(rng);
    ASSERT_TRUE(crypto::isUuidV4(id)) << id;
    seen.insert(id);
  }
  EXPECT_EQ(seen.size(), 500u);
  EXPECT_TRUE(crypto::isUuidV4(crypto::uuidV4(crypto::osRandom())));
}

TEST(Uuid, RejectsOtherVersionsAndShapes) {
  EXPECT_TRUE(crypto::isUuidV4("0b1e5c36-7a2d-4c1f-8e3b-9d4a6f2c1e05"));
  EXPECT_FALSE(crypto::isUuidV4("0b1e5c36-7a2d-1c1f-8e3b-9d4a6f2c1e05"));  // version 1
  EXPECT_FALSE(crypto::isUuidV4("0b1e5c36-7a2d-4c1f-7e3b-9d4a6f2c1e05"));  // variant 0xxx
  EXPECT_FALSE(crypto::isUuidV4("0B1E5C36-7A2D-4C1F-8E3B-9D4A6F2C1E05"));  // upper case
  EXPECT_FALSE(crypto::isUuidV4("not-a-uuid"));
  EXPECT_FALSE(crypto::isUuidV4(""));
}

TEST(SeededRandom, IsReproducible) {
  crypto::SeededRandom a(42), b(42), c(43);
  auto x = a.bytes(37);
  EXPECT_EQ(x, b.bytes(37));
  EXPECT_NE(x, c.bytes(37));
}

TEST(ConstantTimeEqual, ComparesContentAndLength) {
  EXPECT_TRUE(crypto::constantTimeEqual("abc", "abc"));
  EXPECT_FALSE(crypto::constantTimeEqual("abc", "abd"));
  EXPECT_FALSE(crypto::constantTimeEqual("abc", "abcd"));
}
