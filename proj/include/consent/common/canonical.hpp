#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace consent {

using Json = nlohmann::json;

/// Canonical text form used for every hashed or persisted structure:
/// object keys sorted by code point, no insignificant whitespace, integers
/// in base 10, minimal string escaping. Floating point values are rejected
/// with Error(Serialization).
std::string canonicalSerialize(const Json& value);

/// Parses canonical text. Any JSON is accepted; callers that need the
/// canonical property compare against canonicalSerialize of the result.
Json parseCanonical(std::string_view text);

}  // namespace consent
