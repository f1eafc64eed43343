#pragma once

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "consent/common/canonical.hpp"

namespace consent::piistore {

/// Embedded single-file document store. Every mutation is appended to the
/// file as one canonical JSON line:
///   {"doc":{...},"id":"...","ns":"...","op":"put"}
///   {"id":"...","ns":"...","op":"del"}
/// Deletes are logical until compact() rewrites the file with one put line
/// per live document, which is when a deleted document's bytes leave disk.
class DocumentStore {
 public:
  DocumentStore();  // memory only
  explicit DocumentStore(std::filesystem::path file);
  ~DocumentStore();

  DocumentStore(const DocumentStore&) = delete;
  DocumentStore& operator=(const DocumentStore&) = delete;

  void put(std::string_view ns, std::string_view id, Json doc);
  // False when no such document.
  bool erase(std::string_view ns, std::string_view id);

  std::optional<Json> get(std::string_view ns, std::string_view id) const;
  std::vector<std::pair<std::string, Json>> list(std::string_view ns) const;

  /// Rewrites the file through a temporary and an atomic rename. On I/O
  /// failure the previous file is left untouched and Error(Io) is thrown.
  void compact();

  const std::optional<std::filesystem::path>& path() const noexcept { return path_; }
  std::uintmax_t fileSize() const;
  std::size_t garbage() const;  // log lines not backing a live document

  static std::filesystem::path tempPathFor(const std::filesystem::path& file);

 private:
  void appendLine(const std::string& line);
  void openLog();
  void closeLog();
  void load();

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::map<std::string, Json, std::less<>>, std::less<>> docs_;
  std::optional<std::filesystem::path> path_;
  std::FILE* log_ = nullptr;
  std::size_t lines_ = 0;
};

}  // namespace consent::piistore
