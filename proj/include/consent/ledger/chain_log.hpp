#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "consent/ledger/types.hpp"

namespace consent::ledger {

// On-disk form: a sequence of records, each a 4-byte big-endian length
// followed by that many bytes of canonical block text. The genesis block is
// always the first record.

std::string chainFileName(int peerId);  // "chain-<peerId>.log"

std::string encodeRecord(const Block& block);

struct ChainFile {
  std::vector<Block> blocks;
  std::vector<std::size_t> offsets;  // byte offset of each decoded record
  std::size_t size = 0;

  // Set when decoding stopped early; blocks holds what decoded cleanly.
  struct Failure {
    std::size_t recordIndex = 0;
    std::size_t offset = 0;
    std::string reason;
  };
  std::optional<Failure> failure;
};

/// Decodes every record. A record must parse and must be byte-identical to
/// the canonical re-encoding of what it decodes to.
ChainFile parseChainBytes(std::string_view bytes);

// Throws Error(Io) if the file cannot be read.
std::string readFileBytes(const std::filesystem::path& path);
ChainFile readChainFile(const std::filesystem::path& path);

void writeChainFile(const std::filesystem::path& path, const std::vector<Block>& blocks);

/// Append-only writer used by peers on the commit path.
class ChainLog {
 public:
  explicit ChainLog(std::filesystem::path path);

  void append(const Block& block);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace consent::ledger
