#pragma once

// Field access with path-qualified ParseError messages.

#include <string>
#include <type_traits>

#include <nlohmann/json.hpp>

#include "bftsmpc/error.hpp"

namespace bftsmpc::detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw Error(ErrorCode::ParseError, path + ": " + what);
}

inline const nlohmann::json& field(const nlohmann::json& obj, const char* key, const std::string& path) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "." + key, "missing");
  return *it;
}

template <class T>
T convert(const nlohmann::json& v, const std::string& path) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(path, "expected a boolean");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_integer() && !v.is_number_unsigned()) fail(path, "expected a nonnegative integer");
    }
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) fail(path, "expected a number");
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail(path, "expected a string");
  }
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(path, e.what());
  }
}

template <class T>
T read(const nlohmann::json& obj, const char* key, const std::string& path) {
  return convert<T>(field(obj, key, path), path + "." + key);
}

template <class T>
T read_or(const nlohmann::json& obj, const char* key, const std::string& path, T fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  return convert<T>(*it, path + "." + key);
}

}  // namespace bftsmpc::detail
