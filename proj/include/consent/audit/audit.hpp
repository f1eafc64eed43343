#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace consent::audit {

// Exit codes: 0 pass, 1 violation, 2 usage or I/O error.
enum class Verdict { Pass = 0, Fail = 1, Error = 2 };

struct Report {
  std::string check;
  Verdict verdict = Verdict::Pass;
  std::vector<std::string> lines;  // human-readable evidence
  std::string details;

  int exitCode() const noexcept { return static_cast<int>(verdict); }
  // "AUDIT <check> PASS|FAIL <details>"
  std::string summaryLine() const;
  // Evidence lines followed by the summary line.
  std::string text() const;
};

// PII values shorter than this are not scanned for.
inline constexpr std::size_t kMinScanLength = 4;

/// Re-verifies every record, hash link and block hash of a chain file.
Report verifyChain(const std::filesystem::path& chain);

/// Byte-scans chain files for every user ID and PII value (of at least
/// kMinScanLength bytes) that appears anywhere in the store file, including
/// records that are only logically deleted.
Report scanPii(const std::vector<std::filesystem::path>& chains, const std::filesystem::path& pii);

/// Replays the chain and reports the canonical world-state hash. An empty
/// file replays to the empty state.
Report replay(const std::filesystem::path& chain);

/// Right-to-be-forgotten check for one pair key: the latest on-chain flags
/// must be all false, no live user in the store may resolve to the key, and
/// the store file must hold no bytes of any deleted user. Prints the key's
/// full on-chain history.
Report forgetCheck(const std::filesystem::path& chain, const std::filesystem::path& pii,
                   const std::string& pairKey);

}  // namespace consent::audit
