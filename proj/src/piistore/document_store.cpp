#include "consent/piistore/document_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <mutex>

#include "consent/common/error.hpp"

namespace consent::piistore {

namespace {

std::string putLine(std::string_view ns, std::string_view id, const Json& doc) {
  return canonicalSerialize(Json{{"doc", doc}, {"id", id}, {"ns", ns}, {"op", "put"}});
}

std::string delLine(std::string_view ns, std::string_view id) {
  return canonicalSerialize(Json{{"id", id}, {"ns", ns}, {"op", "del"}});
}

void fsyncDirectory(const std::filesystem::path& dir) {
  int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

}  // namespace

DocumentStore::DocumentStore() = default;

DocumentStore::DocumentStore(std::filesystem::path file) : path_(std::move(file)) {
  if (path_->has_parent_path()) std::filesystem::create_directories(path_->parent_path());
  // A leftover temporary means a compaction died before its rename; the
  // original file is still the authority.
  std::error_code ec;
  std::filesystem::remove(tempPathFor(*path_), ec);
  load();
  openLog();
}

DocumentStore::~DocumentStore() { closeLog(); }

std::filesystem::path DocumentStore::tempPathFor(const std::filesystem::path& file) {
  auto tmp = file;
  tmp += ".compact";
  return tmp;
}

void DocumentStore::load() {
  std::ifstream in(*path_, std::ios::binary);
  if (!in) return;
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  std::size_t validEnd = 0;
  while (pos < content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string::npos) break;  // torn final append
    std::string_view line(content.data() + pos, nl - pos);
    Json rec = parseCanonical(line);
    if (!rec.is_object() || !rec.contains("op") || !rec.contains("ns") || !rec.contains("id")) {
      throw Error(ErrorCode::Parse, path_->string() + ": malformed record at offset " + std::to_string(pos));
    }
    auto ns = rec["ns"].get<std::string>();
    auto id = rec["id"].get<std::string>();
    auto op = rec["op"].get<std::string>();
    if (op == "put" && rec.contains("doc")) {
      docs_[ns].insert_or_assign(id, rec["doc"]);
    } else if (op == "del") {
      if (auto it = docs_.find(ns); it != docs_.end()) it->second.erase(id);
    } else {
      throw Error(ErrorCode::Parse, path_->string() + ": unknown op at offset " + std::to_string(pos));
    }
    ++lines_;
    pos = nl + 1;
    validEnd = pos;
  }
  if (validEnd < content.size()) std::filesystem::resize_file(*path_, validEnd);
}

void DocumentStore::openLog() {
  log_ = std::fopen(path_->c_str(), "ab");
  if (log_ == nullptr) throw Error(ErrorCode::Io, "cannot open " + path_->string());
}

void DocumentStore::closeLog() {
  if (log_ != nullptr) {
    std::fclose(log_);
    log_ = nullptr;
  }
}

void DocumentStore::appendLine(const std::string& line) {
  ++lines_;
  if (log_ == nullptr) return;
  if (std::fwrite(line.data(), 1, line.size(), log_) != line.size() || std::fputc('\n', log_) == EOF ||
      std::fflush(log_) != 0) {
    throw Error(ErrorCode::Io, "append failed for " + path_->string());
  }
}

void DocumentStore::put(std::string_view ns, std::string_view id, Json doc) {
  std::unique_lock lock(mutex_);
  appendLine(putLine(ns, id, doc));
  auto it = docs_.find(ns);
  if (it == docs_.end()) it = docs_.emplace(std::string(ns), std::map<std::string, Json, std::less<>>{}).first;
  it->second.insert_or_assign(std::string(id), std::move(doc));
}

bool DocumentStore::erase(std::string_view ns, std::string_view id) {
  std::unique_lock lock(mutex_);
  auto it = docs_.find(ns);
  if (it == docs_.end()) return false;
  auto doc = it->second.find(id);
  if (doc == it->second.end()) return false;
  appendLine(delLine(ns, id));
  it->second.erase(doc);
  return true;
}

std::optional<Json> DocumentStore::get(std::string_view ns, std::string_view id) const {
  std::shared_lock lock(mutex_);
  auto it = docs_.find(ns);
  if (it == docs_.end()) return std::nullopt;
  auto doc = it->second.find(id);
  if (doc == it->second.end()) return std::nullopt;
  return std::optional<Json>(std::in_place, doc->second);
}

std::vector<std::pair<std::string, Json>> DocumentStore::list(std::string_view ns) const {
  std::shared_lock lock(mutex_);
  std::vector<std::pair<std::string, Json>> out;
  if (auto it = docs_.find(ns); it != docs_.end()) {
    for (const auto& [id, doc] : it->second) out.emplace_back(id, doc);
  }
  return out;
}

std::size_t DocumentStore::garbage() const {
  std::shared_lock lock(mutex_);
  std::size_t live = 0;
  for (const auto& [ns, docs] : docs_) live += docs.size();
  return lines_ - live;
}

std::uintmax_t DocumentStore::fileSize() const {
  if (!path_) return 0;
  std::error_code ec;
  auto size = std::filesystem::file_size(*path_, ec);
  return ec ? 0 : size;
}

void DocumentStore::compact() {
  std::unique_lock lock(mutex_);
  std::size_t live = 0;
  for (const auto& [ns, docs] : docs_) live += docs.size();
  if (!path_) {
    lines_ = live;
    return;
  }

  const auto tmp = tempPathFor(*path_);
  std::FILE* out = std::fopen(tmp.c_str(), "wb");
  if (out == nullptr) throw Error(ErrorCode::Io, "cannot create " + tmp.string());
  bool ok = true;
  for (const auto& [ns, docs] : docs_) {
    for (const auto& [id, doc] : docs) {
      std::string line = putLine(ns, id, doc);
      line.push_back('\n');
      ok = ok && std::fwrite(line.data(), 1, line.size(), out) == line.size();
    }
  }
  ok = ok && std::fflush(out) == 0 && ::fsync(::fileno(out)) == 0;
  ok = (std::fclose(out) == 0) && ok;
  if (!ok) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "compaction write failed for " + tmp.string());
  }

  closeLog();
  std::error_code ec;
  std::filesystem::rename(tmp, *path_, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    openLog();
    throw Error(ErrorCode::Io, "compaction rename failed: " + ec.message());
  }
  fsyncDirectory(path_->parent_path());
  openLog();
  lines_ = live;
}

}  // namespace consent::piistore
