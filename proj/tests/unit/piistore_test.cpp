#include <gtest/gtest.h>

#include <random>

#include "consent/common/error.hpp"
#include "consent/piistore/pii_store.hpp"
#include "test_support.hpp"

using namespace consent;
using namespace consent::piistore;

namespace {

std::int64_t fixedClock() { return 42; }

}  // namespace

TEST(Projection, ReturnsExactlyTheGrantedFieldsForEveryMask) {
  UserRecord u{"id", "Ada Lovelace", "ada@example.com", "+44 20 0000", "London", 0};
  const std::vector<std::pair<std::string, std::string>> fields{
      {"name", u.name}, {"email", u.email}, {"phone", u.phone}, {"location", u.location}};
  for (unsigned mask = 0; mask < 16; ++mask) {
    auto p = project(u, ledger::PermissionFlags::fromMask(mask));
    FieldProjection expected;
    for (unsigned bit = 0; bit < 4; ++bit) {
      if (mask & (1u << bit)) expected.insert(fields[bit]);
    }
    EXPECT_EQ(p, expected) << "mask " << mask;
  }
}

TEST(PiiStore, CreateGetAndFind) {
  DocumentStore docs;
  crypto::SeededRandom rng(1);
  PiiStore pii(docs, rng, fixedClock);
  auto id = pii.createUser("Ada", "ada@example.com", "123", "London");
  EXPECT_TRUE(crypto::isUuidV4(id));
  auto user = pii.getUser(id);
  ASSERT_TRUE(user);
  EXPECT_EQ(user->createdAtMs, 42);
  EXPECT_EQ(pii.findByEmail("ada@example.com"), id);
  EXPECT_FALSE(pii.findByEmail("nobody@example.com"));
  EXPECT_EQ(pii.getFields(id, {.email = true}), (FieldProjection{{"email", "ada@example.com"}}));
}

TEST(PiiStore, RejectsDuplicateAndEmptyEmail) {
  DocumentStore docs;
  PiiStore pii(docs);
  pii.createUser("Ada", "ada@example.com", "", "");
  try {
    pii.createUser("Other", "ada@example.com", "", "");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Conflict);
  }
  EXPECT_THROW(pii.createUser("x", "", "", ""), Error);
}

TEST(PiiStore, DeleteMakesUserUnresolvable) {
  DocumentStore docs;
  PiiStore pii(docs);
  auto id = pii.createUser("Ada", "ada@example.com", "", "");
  pii.deleteUser(id);
  EXPECT_FALSE(pii.getUser(id));
  EXPECT_FALSE(pii.getFields(id, {.name = true}));
  EXPECT_FALSE(pii.findByEmail("ada@example.com"));
  try {
    pii.deleteUser(id);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotFound);
  }
}

TEST(DocumentStore, PersistsAcrossReopen) {
  testutil::TempDir dir;
  auto file = dir.path() / "s.jsonl";
  {
    DocumentStore s(file);
    s.put("a", "1", Json{{"v", 1}});
    s.put("a", "2", Json{{"v", 2}});
    s.put("a", "1", Json{{"v", 3}});
    EXPECT_TRUE(s.erase("a", "2"));
    EXPECT_FALSE(s.erase("a", "2"));
  }
  DocumentStore s(file);
  EXPECT_EQ(s.get("a", "1"), Json({{"v", 3}}));
  EXPECT_FALSE(s.get("a", "2"));
  EXPECT_EQ(s.list("a").size(), 1u);
  EXPECT_TRUE(s.list("b").empty());
}

TEST(DocumentStore, CompactionRemovesDeletedBytes) {
  testutil::TempDir dir;
  auto file = dir.path() / "s.jsonl";
  DocumentStore docs(file);
  PiiStore pii(docs);
  auto keep = pii.createUser("Keep Me", "keep@example.com", "555-0100", "Oslo");
  auto gone = pii.createUser("Zelda Forgotten", "zelda@example.com", "555-0199", "Hyrule");
  pii.deleteUser(gone);
  EXPECT_NE(testutil::readFile(file).find("Zelda Forgotten"), std::string::npos);
  auto before = docs.fileSize();
  pii.compact();
  std::string bytes = testutil::readFile(file);
  for (const char* needle : {"Zelda Forgotten", "zelda@example.com", "555-0199", "Hyrule"}) {
    EXPECT_EQ(bytes.find(needle), std::string::npos) << needle;
  }
  EXPECT_EQ(bytes.find(gone), std::string::npos);
  EXPECT_LT(docs.fileSize(), before);
  EXPECT_EQ(docs.garbage(), 0u);
  EXPECT_TRUE(pii.getUser(keep));

  pii.compact();
  EXPECT_EQ(testutil::readFile(file), bytes);
}

TEST(DocumentStore, CompactingEmptyStoreLeavesEmptyFile) {
  testutil::TempDir dir;
  DocumentStore s(dir.path() / "s.jsonl");
  s.compact();
  EXPECT_EQ(s.fileSize(), 0u);
  s.put("a", "1", Json::object());
  EXPECT_EQ(s.list("a").size(), 1u);
}

TEST(DocumentStore, FailedCompactionLeavesFileIntact) {
  testutil::TempDir dir;
  auto file = dir.path() / "s.jsonl";
  DocumentStore s(file);
  s.put("a", "1", Json{{"v", 1}});
  s.erase("a", "1");
  s.put("a", "2", Json{{"v", 2}});
  std::string before = testutil::readFile(file);
  // A directory in the temporary's place makes the rewrite fail.
  std::filesystem::create_directory(DocumentStore::tempPathFor(file));
  try {
    s.compact();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Io);
  }
  EXPECT_EQ(testutil::readFile(file), before);
  s.put("a", "3", Json{{"v", 3}});
  std::filesystem::remove(DocumentStore::tempPathFor(file));
  DocumentStore reopened(file);
  EXPECT_EQ(reopened.list("a").size(), 2u);
}

TEST(DocumentStore, StaleTemporaryAndTornTailAreRecovered) {
  testutil::TempDir dir;
  auto file = dir.path() / "s.jsonl";
  {
    DocumentStore s(file);
    s.put("a", "1", Json{{"v", 1}});
  }
  testutil::writeFile(DocumentStore::tempPathFor(file), "{\"partial\":");
  std::string bytes = testutil::readFile(file);
  testutil::writeFile(file, bytes + "{\"doc\":{\"v\":2},\"id\":\"2\",\"n");
  DocumentStore s(file);
  EXPECT_FALSE(std::filesystem::exists(DocumentStore::tempPathFor(file)));
  EXPECT_EQ(s.list("a").size(), 1u);
  EXPECT_EQ(testutil::readFile(file), bytes);
}

TEST(DocumentStore, RandomOperationsMatchReferenceMap) {
  testutil::TempDir dir;
  auto file = dir.path() / "s.jsonl";
  std::mt19937_64 rng(5);
  std::map<std::string, int> reference;
  {
    DocumentStore s(file);
    for (int i = 0; i < 400; ++i) {
      std::string id = std::to_string(rng() % 25);
      switch (rng() % 4) {
        case 0: s.erase("n", id); reference.erase(id); break;
        case 1: s.compact(); break;
        default: {
          int v = static_cast<int>(rng() % 1000);
          s.put("n", id, Json{{"v", v}});
          reference[id] = v;
        }
      }
    }
  }
  DocumentStore s(file);
  auto listed = s.list("n");
  ASSERT_EQ(listed.size(), reference.size());
  for (const auto& [id, doc] : listed) EXPECT_EQ(doc["v"].get<int>(), reference.at(id));
}
