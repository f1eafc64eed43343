#include "consent/common/canonical.hpp"

#include "consent/common/error.hpp"

namespace consent {

namespace {

void rejectFloats(const Json& value) {
  switch (value.type()) {
    case Json::value_t::number_float:
      throw Error(ErrorCode::Serialization, "floating point values are not representable");
    case Json::value_t::binary:
    case Json::value_t::discarded:
      throw Error(ErrorCode::Serialization, "value is not representable");
    case Json::value_t::object:
    case Json::value_t::array:
      for (const auto& child : value) rejectFloats(child);
      break;
    default:
      break;
  }
}

}  // namespace

std::string canonicalSerialize(const Json& value) {
  rejectFloats(value);
  // nlohmann::json objects are std::map backed, so keys come out sorted by
  // byte value, which for UTF-8 is code point order.
  try {
    return value.dump(-1, ' ', false, Json::error_handler_t::strict);
  } catch (const Json::type_error& e) {
    throw Error(ErrorCode::Serialization, e.what());
  }
}

Json parseCanonical(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

}  // namespace consent
