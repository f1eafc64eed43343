#include "consent/ledger/chain_log.hpp"

#include <iterator>

#include "consent/common/error.hpp"

namespace consent::ledger {

std::string chainFileName(int peerId) { return "chain-" + std::to_string(peerId) + ".log"; }

std::string encodeRecord(const Block& block) {
  std::string body = canonicalSerialize(toJson(block));
  if (body.size() > 0xffffffffu) throw Error(ErrorCode::Serialization, "block too large");
  auto n = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(4 + body.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out += body;
  return out;
}

ChainFile parseChainBytes(std::string_view bytes) {
  ChainFile file;
  file.size = bytes.size();
  std::size_t pos = 0;
  auto failWith = [&](std::string reason) {
    file.failure = ChainFile::Failure{file.blocks.size(), pos, std::move(reason)};
    return file;
  };
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 4) return failWith("truncated length prefix");
    auto byteAt = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i])); };
    std::uint32_t n = (byteAt(0) << 24) | (byteAt(1) << 16) | (byteAt(2) << 8) | byteAt(3);
    if (bytes.size() - pos - 4 < n) return failWith("truncated record");
    std::string_view body = bytes.substr(pos + 4, n);
    Block block;
    try {
      block = blockFromJson(parseCanonical(body));
      if (canonicalSerialize(toJson(block)) != body) {
        return failWith("record is not in canonical form");
      }
    } catch (const Error& e) {
      return failWith(std::string("parse error: ") + e.what());
    }
    file.offsets.push_back(pos);
    file.blocks.push_back(std::move(block));
    pos += 4 + n;
  }
  return file;
}

std::string readFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::Io, "cannot read " + path.string());
  return bytes;
}

ChainFile readChainFile(const std::filesystem::path& path) {
  return parseChainBytes(readFileBytes(path));
}

void writeChainFile(const std::filesystem::path& path, const std::vector<Block>& blocks) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  for (const auto& b : blocks) out << encodeRecord(b);
  out.flush();
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

ChainLog::ChainLog(std::filesystem::path path) : path_(std::move(path)) {
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) throw Error(ErrorCode::Io, "cannot open " + path_.string() + " for append");
}

void ChainLog::append(const Block& block) {
  out_ << encodeRecord(block);
  out_.flush();
  if (!out_) throw Error(ErrorCode::Io, "append failed for " + path_.string());
}

}  // namespace consent::ledger
