#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace consent::crypto {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view bytes);
std::string sha256Hex(std::string_view bytes);

std::string toHex(std::span<const std::uint8_t> bytes);
// Throws consent::Error(Parse) on odd length or non-hex characters.
std::vector<std::uint8_t> fromHex(std::string_view hex);

bool isLowerHex(std::string_view s, std::size_t length);

// Comparison whose running time depends only on the lengths.
bool constantTimeEqual(std::string_view a, std::string_view b);

/// Source of random bytes. Production code uses OsRandom; tests and the
/// simulator inject a seeded generator so runs are reproducible.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  std::vector<std::uint8_t> bytes(std::size_t n) {
    std::vector<std::uint8_t> out(n);
    fill(out);
    return out;
  }
};

class OsRandom final : public RandomSource {
 public:
  void fill(std::span<std::uint8_t> out) override;
};

class SeededRandom final : public RandomSource {
 public:
  explicit SeededRandom(std::uint64_t seed) : engine_(seed) {}
  void fill(std::span<std::uint8_t> out) override;

 private:
  std::mutex mutex_;
  std::mt19937_64 engine_;
};

RandomSource& osRandom();

// RFC 4122 version-4 UUID in canonical lowercase 8-4-4-4-12 form.
std::string uuidV4(RandomSource& rng);
bool isUuidV4(std::string_view s);

}  // namespace consent::crypto
