#include <gtest/gtest.h>

#include <random>

#include "consent/common/crypto.hpp"
#include "consent/common/error.hpp"
#include "consent/ledger/chain_log.hpp"
#include "consent/ledger/ledger.hpp"
#include "test_support.hpp"

using namespace consent;
using namespace consent::ledger;

namespace {

const std::string kCompany = "0b1e5c36-7a2d-4c1f-8e3b-9d4a6f2c1e05";
const std::string kTx = "3f1c2b4a-8d9e-4f00-9a1b-2c3d4e5f6a7b";

Transaction permissionTx(crypto::RandomSource& rng, const std::string& user,
                         const std::string& company, PermissionFlags flags) {
  return Transaction::putPermission(crypto::uuidV4(rng), {computePairKey(user, company), company, flags},
                                    "gateway", 1);
}

Transaction companyTx(crypto::RandomSource& rng, const std::string& company, bool accredited = false) {
  return Transaction::putCompany(crypto::uuidV4(rng),
                                 {company, "Name " + company.substr(0, 4), "desc", "c@x.example", accredited},
                                 company, 1);
}

// Random mix over a small id space so keys collide and overwrite.
std::vector<Transaction> randomTxs(std::uint64_t seed, int n) {
  crypto::SeededRandom ids(seed);
  std::mt19937_64 rng(seed);
  std::vector<std::string> companies{crypto::uuidV4(ids), crypto::uuidV4(ids), crypto::uuidV4(ids)};
  std::vector<std::string> users{"u1", "u2", "u3"};
  std::vector<Transaction> out;
  for (int i = 0; i < n; ++i) {
    const auto& c = companies[rng() % companies.size()];
    switch (rng() % 3) {
      case 0: out.push_back(permissionTx(ids, users[rng() % users.size()], c,
                                         PermissionFlags::fromMask(static_cast<unsigned>(rng() % 16))));
              break;
      case 1: out.push_back(companyTx(ids, c, rng() % 2 == 0)); break;
      default:
        out.push_back(Transaction::setAccreditation(crypto::uuidV4(ids), {c, rng() % 2 == 0}, "admin", 1));
    }
  }
  return out;
}

// Independent last-writer-wins interpreter over raw payloads.
Json oracleState(const std::vector<Transaction>& txs) {
  Json state = Json::object();
  for (const auto& tx : txs) {
    const Json& p = tx.payload;
    if (tx.kindName == "PutPermission") {
      state["perm:" + p["pairKey"].get<std::string>()] = p;
    } else if (tx.kindName == "PutCompany") {
      state["company:" + p["companyId"].get<std::string>()] = p;
    } else if (tx.kindName == "SetAccreditation") {
      std::string key = "company:" + p["companyId"].get<std::string>();
      if (state.contains(key)) state[key]["accredited"] = p["accredited"];
    }
  }
  return state;
}

std::vector<Block> chainOf(const std::vector<Transaction>& txs, std::size_t perBlock) {
  Chain chain;
  for (std::size_t i = 0; i < txs.size(); i += perBlock) {
    std::vector<Transaction> batch(txs.begin() + static_cast<std::ptrdiff_t>(i),
                                   txs.begin() + static_cast<std::ptrdiff_t>(std::min(txs.size(), i + perBlock)));
    EXPECT_TRUE(chain.appendBlock(makeBlock(chain.tip(), static_cast<std::int64_t>(i), batch)).ok);
  }
  return chain.blocks();
}

}  // namespace

TEST(PairKey, MatchesIndependentDigest) {
  EXPECT_EQ(computePairKey("u", "c").hex(),
            "11c8a3eca8f1c26104a7c62dfea573439d94eb3a08c0e7155d46adab24e719d0");
  EXPECT_EQ(computePairKey("u", "c"), computePairKey("u", "c"));
}

TEST(PairKey, IsOrderSensitiveAndSeparated) {
  EXPECT_EQ(computePairKey("c", "u").hex(),
            "ac7cb0f181acbd8b77e83073d63a8dda22d7ae71f4994318abc76b4f8ae33706");
  EXPECT_EQ(computePairKey("ab", "c").hex(),
            "5f1390ea338444eb27117a13b752b992b7bd2a67a92fc027cb64abec2cffbdea");
  EXPECT_EQ(computePairKey("a", "bc").hex(),
            "c140f47475217ae947569d11406e72b36f774f7b5694693b21cddd3282e20439");
}

TEST(PairKey, FromHexValidates) {
  EXPECT_THROW(PairKey::fromHex("abc"), Error);
  EXPECT_THROW(PairKey::fromHex(std::string(64, 'G')), Error);
  EXPECT_THROW(PairKey::fromHex(std::string(64, 'A')), Error);
  EXPECT_NO_THROW(PairKey::fromHex(std::string(64, 'a')));
}

TEST(PermissionFlags, MaskRoundTripAndAllFalse) {
  for (unsigned m = 0; m < 16; ++m) EXPECT_EQ(PermissionFlags::fromMask(m).mask(), m);
  EXPECT_TRUE(PermissionFlags{}.allFalse());
  EXPECT_FALSE(PermissionFlags{.location = true}.allFalse());
}

TEST(HashBlock, GenesisIsPinned) {
  Block g = genesisBlock();
  EXPECT_EQ(canonicalSerialize(headerJson(g)), testutil::testdata("genesis.canonical"));
  EXPECT_EQ(g.blockHash, testutil::testdata("genesis.sha256"));
  EXPECT_EQ(hashBlock(g), hashBlock(genesisBlock()));
}

TEST(HashBlock, BlockWithGoldenTransactionIsPinned) {
  auto tx = transactionFromJson(parseCanonical(testutil::testdata("permission_tx.canonical")));
  Block b = makeBlock(genesisBlock(), 1700000000123, std::vector<Transaction>{tx});
  EXPECT_EQ(b.blockHash, testutil::testdata("block1.sha256"));
  EXPECT_EQ(replay({genesisBlock(), b}).stateHash(), testutil::testdata("state_after_block1.sha256"));
}

TEST(HashBlock, AnyTransactionChangeChangesDigest) {
  crypto::SeededRandom ids(1);
  Block b = makeBlock(genesisBlock(), 5, randomTxs(3, 4));
  Block altered = b;
  altered.transactions[2].submitter += "x";
  EXPECT_NE(hashBlock(altered), b.blockHash);
  altered = b;
  altered.transactions[0].timestampMs += 1;
  EXPECT_NE(hashBlock(altered), b.blockHash);
}

TEST(ValidateTransaction, AcceptsWellFormed) {
  crypto::SeededRandom ids(2);
  EXPECT_TRUE(validateTransaction(permissionTx(ids, "u", kCompany, {.name = true})).empty());
  EXPECT_TRUE(validateTransaction(companyTx(ids, kCompany)).empty());
  EXPECT_TRUE(validateTransaction(Transaction::setAccreditation(kTx, {kCompany, true}, "admin", 0)).empty());
}

TEST(ValidateTransaction, RejectsSmuggledPii) {
  crypto::SeededRandom ids(2);
  auto tx = permissionTx(ids, "u", kCompany, {.name = true});
  tx.payload["userEmail"] = "alice@example.com";
  auto v = validateTransaction(tx);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NE(v[0].find("PII-bearing field on chain"), std::string::npos);

  auto extraFlag = permissionTx(ids, "u", kCompany, {});
  extraFlag.payload["flags"]["ssn"] = true;
  EXPECT_FALSE(validateTransaction(extraFlag).empty());
}

TEST(ValidateTransaction, RejectsMalformedIdsAndKinds) {
  crypto::SeededRandom ids(2);
  auto badCompany = permissionTx(ids, "u", kCompany, {});
  badCompany.payload["companyId"] = "not-a-uuid";
  EXPECT_FALSE(validateTransaction(badCompany).empty());

  auto badKey = permissionTx(ids, "u", kCompany, {});
  badKey.payload["pairKey"] = "1234";
  EXPECT_FALSE(validateTransaction(badKey).empty());

  auto badTxId = permissionTx(ids, "u", kCompany, {});
  badTxId.txId = "tx-1";
  EXPECT_FALSE(validateTransaction(badTxId).empty());

  auto unknown = permissionTx(ids, "u", kCompany, {});
  unknown.kindName = "DeleteEverything";
  unknown.kind = TxKind::Unknown;
  EXPECT_FALSE(validateTransaction(unknown).empty());

  auto noName = companyTx(ids, kCompany);
  noName.payload["name"] = "";
  EXPECT_FALSE(validateTransaction(noName).empty());

  auto floatFlag = permissionTx(ids, "u", kCompany, {});
  floatFlag.payload["flags"]["name"] = 1;
  EXPECT_FALSE(validateTransaction(floatFlag).empty());
}

TEST(ApplyTransaction, WritesPermissionUnderPairKey) {
  crypto::SeededRandom ids(3);
  PermissionFlags flags{.name = true, .email = false, .phone = false, .location = false};
  auto tx = permissionTx(ids, "user-1", kCompany, flags);
  auto result = applyTransaction(WorldState{}, tx);
  ASSERT_TRUE(result.valid);
  auto asset = queryState(result.state, permissionKey(computePairKey("user-1", kCompany)));
  ASSERT_TRUE(asset.has_value());
  EXPECT_EQ(std::get<PermissionAsset>(*asset).flags, flags);
  EXPECT_FALSE(queryState(result.state, "perm:absent").has_value());
}

TEST(ApplyTransaction, IsIdempotentForIdenticalWrites) {
  crypto::SeededRandom ids(3);
  auto tx = permissionTx(ids, "user-1", kCompany, {.email = true});
  auto once = applyTransaction(WorldState{}, tx).state;
  auto twice = applyTransaction(once, tx).state;
  EXPECT_EQ(once, twice);
  EXPECT_EQ(once.stateHash(), twice.stateHash());
}

TEST(ApplyTransaction, AccreditationOfMissingCompanyIsInvalid) {
  WorldState empty;
  auto result = applyTransaction(empty, Transaction::setAccreditation(kTx, {kCompany, true}, "admin", 0));
  EXPECT_FALSE(result.valid);
  EXPECT_EQ(result.state, empty);
}

TEST(ApplyTransaction, AccreditationRewritesOnlyThatField) {
  crypto::SeededRandom ids(4);
  auto state = applyTransaction(WorldState{}, companyTx(ids, kCompany)).state;
  auto before = std::get<CompanyAsset>(*state.find(companyKey(kCompany)));
  state = applyTransaction(state, Transaction::setAccreditation(kTx, {kCompany, true}, "admin", 0)).state;
  auto after = std::get<CompanyAsset>(*state.find(companyKey(kCompany)));
  before.accredited = true;
  EXPECT_EQ(after, before);
}

TEST(ApplyTransaction, InputStateIsUntouched) {
  crypto::SeededRandom ids(5);
  WorldState state;
  auto copy = state;
  applyTransaction(state, permissionTx(ids, "u", kCompany, {.name = true}));
  EXPECT_EQ(state, copy);
}

TEST(ApplyTransaction, FoldMatchesBruteForceReplayOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto txs = randomTxs(seed, 10);
    WorldState folded;
    for (const auto& tx : txs) folded = applyTransaction(folded, tx).state;
    EXPECT_EQ(canonicalSerialize(folded.toJson()), canonicalSerialize(oracleState(txs))) << seed;
    EXPECT_EQ(folded.stateHash(), replay(chainOf(txs, 3)).stateHash()) << seed;
  }
}

TEST(Replay, TwoIndependentReplaysAgree) {
  for (std::uint64_t seed = 100; seed < 120; ++seed) {
    auto txs = randomTxs(seed, 40);
    auto a = replay(chainOf(txs, 7));
    auto b = replay(chainOf(txs, 7));
    EXPECT_EQ(a.stateHash(), b.stateHash());
  }
  EXPECT_EQ(replay({genesisBlock()}).stateHash(), testutil::testdata("empty_state.sha256"));
}

TEST(AppendBlock, AcceptsValidAndRejectsBadLinks) {
  crypto::SeededRandom ids(6);
  Chain chain;
  Block b1 = makeBlock(chain.tip(), 10, {permissionTx(ids, "u", kCompany, {})});
  EXPECT_TRUE(chain.appendBlock(b1).ok);
  auto before = chain.blocks();

  Block stale = makeBlock(genesisBlock(), 11, {permissionTx(ids, "v", kCompany, {})});
  stale.height = 2;
  stale.blockHash = hashBlock(stale);
  auto r = chain.appendBlock(stale);
  EXPECT_FALSE(r.ok);
  EXPECT_NE(r.reason.find("prevHash"), std::string::npos);

  Block tampered = makeBlock(chain.tip(), 12, {permissionTx(ids, "w", kCompany, {})});
  tampered.blockHash[0] = tampered.blockHash[0] == 'a' ? 'b' : 'a';
  EXPECT_FALSE(chain.appendBlock(tampered).ok);

  Block gap = makeBlock(chain.tip(), 13, {});
  gap.height = 5;
  gap.blockHash = hashBlock(gap);
  EXPECT_FALSE(chain.appendBlock(gap).ok);

  ASSERT_EQ(chain.blocks().size(), before.size());
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(encodeRecord(chain.blocks()[i]), encodeRecord(before[i]));
  }
}

TEST(QueryHistory, ListsEveryWriteInChainOrder) {
  crypto::SeededRandom ids(7);
  Chain chain;
  auto key = permissionKey(computePairKey("u", kCompany));
  for (int h = 1; h <= 8; ++h) {
    std::vector<Transaction> txs{permissionTx(ids, "other", kCompany, {})};
    if (h == 3) txs.push_back(permissionTx(ids, "u", kCompany, {.name = true}));
    if (h == 7) txs.push_back(permissionTx(ids, "u", kCompany, {}));
    ASSERT_TRUE(chain.appendBlock(makeBlock(chain.tip(), h, txs)).ok);
  }
  auto history = queryHistory(chain.blocks(), key);
  ASSERT_EQ(history.size(), 2u);
  EXPECT_EQ(history[0].height, 3u);
  EXPECT_EQ(history[1].height, 7u);
  EXPECT_TRUE(history[0].value["flags"]["name"].get<bool>());
  EXPECT_FALSE(history[1].value["flags"]["name"].get<bool>());
  EXPECT_TRUE(queryHistory(chain.blocks(), "perm:never").empty());

  // Latest state is the all-false deletion marker while history keeps the grant.
  auto latest = queryState(replay(chain.blocks()), key);
  ASSERT_TRUE(latest);
  EXPECT_TRUE(std::get<PermissionAsset>(*latest).flags.allFalse());
}

TEST(ChainIntegrity, EverySingleByteFlipIsDetected) {
  auto blocks = chainOf(randomTxs(9, 30), 3);
  std::string bytes;
  for (const auto& b : blocks) bytes += encodeRecord(b);
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    std::string mutated = bytes;
    std::size_t at = rng() % mutated.size();
    mutated[at] = static_cast<char>(mutated[at] ^ static_cast<char>(1u << (rng() % 8)));
    auto file = parseChainBytes(mutated);
    bool detected = file.failure.has_value() || !checkLinkage(file.blocks).ok;
    EXPECT_TRUE(detected) << "flip at offset " << at;
  }
}

TEST(Anonymity, SerializedAssetsCarryNoUserIdOrPii) {
  crypto::SeededRandom ids(11);
  std::mt19937_64 rng(11);
  auto randomWord = [&](std::size_t n) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('a' + rng() % 26));
    return s;
  };
  std::vector<std::string> needles;
  std::vector<Transaction> txs;
  std::vector<std::string> companies{crypto::uuidV4(ids), crypto::uuidV4(ids)};
  for (const auto& c : companies) txs.push_back(companyTx(ids, c, true));
  for (int u = 0; u < 50; ++u) {
    std::string userId = crypto::uuidV4(ids);
    needles.push_back(userId);
    needles.push_back(randomWord(8) + " " + randomWord(6));
    needles.push_back(randomWord(7) + "@" + randomWord(5) + ".example");
    needles.push_back("+1-555-" + std::to_string(1000000 + rng() % 9000000));
    needles.push_back(randomWord(9) + " city");
    for (const auto& c : companies) {
      txs.push_back(permissionTx(ids, userId, c, PermissionFlags::fromMask(static_cast<unsigned>(rng() % 16))));
    }
  }
  std::string bytes;
  for (const auto& b : chainOf(txs, 10)) bytes += encodeRecord(b);
  for (const auto& n : needles) EXPECT_EQ(bytes.find(n), std::string::npos) << n;
}
