#pragma once

#include "cloudtrust/error.hpp"

#include <json.hpp>

#include <string>
#include <string_view>

namespace cloudtrust::detail {

using json = nlohmann::json;

inline json parse_document(std::string_view document) {
  try {
    return json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
}

inline const json& require(const json& object, const char* key) {
  if (!object.is_object())
    throw ParseError(std::string("expected an object holding '") + key + "'", 0);
  auto it = object.find(key);
  if (it == object.end())
    throw ParseError(std::string("missing key '") + key + "'", 0);
  return *it;
}

inline const json& require_array(const json& object, const char* key) {
  const json& value = require(object, key);
  if (!value.is_array())
    throw ParseError(std::string("key '") + key + "' must hold an array", 0);
  return value;
}

// Runs `body`, turning schema violations (wrong JSON types, domain checks)
// into ParseError so callers see one error kind per malformed document.
template <class Body>
auto with_schema_errors(Body&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw ParseError(e.what(), 0);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), 0);
  }
}

}  // namespace cloudtrust::detail
