#pragma once

// Strict JSON field access shared by the checkpoint and config readers.

#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "lipgan/errors.hpp"

namespace lipgan::detail {

using json = nlohmann::json;

/// Object view that remembers its path for error messages and rejects keys
/// that were never declared.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& [k, v] : j_.items()) {
      bool known = false;
      for (auto allowed : keys) known = known || k == allowed;
      if (!known) throw ConfigError(path_ + "." + k + ": unknown key");
    }
  }

  bool has(std::string_view key) const { return j_.contains(std::string(key)); }

  const json& at(std::string_view key) const {
    auto it = j_.find(std::string(key));
    if (it == j_.end()) throw ConfigError(child(key) + ": missing required key");
    return *it;
  }

  std::string child(std::string_view key) const { return path_ + "." + std::string(key); }

  template <class T>
  T get(std::string_view key) const {
    return convert<T>(at(key), child(key));
  }

  template <class T>
  T get_or(std::string_view key, T fallback) const {
    return has(key) ? get<T>(key) : fallback;
  }

  StrictObject object(std::string_view key) const { return StrictObject(at(key), child(key)); }

  template <class T>
  static T convert(const json& v, const std::string& path) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(path + ": expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(path + ": expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0) {
          throw ConfigError(path + ": expected a non-negative integer");
        }
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(path + ": expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(path + ": expected a string");
    }
    return v.get<T>();
  }

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

 private:
  const json& j_;
  std::string path_;
};

inline json parse_json(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(what + ": malformed JSON: " + e.what());
  }
}

}  // namespace lipgan::detail
