#pragma once

#include <cstdint>
#include <cstdio>
#include <string>

#include "json.hpp"
#include "powder/config.hpp"
#include "powder/errors.hpp"

namespace powder::detail {

inline std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    std::string out;
    for (const auto& item : v) {
      if (!out.empty()) out += ",";
      out += json_scalar_text(item);
    }
    return out;
  }
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw DomainError("unsupported value type: " + v.dump());
}

// Applies {"key": value} entries under the given prefix ("pcg." or "rules.").
inline void apply_json_overrides(SimConfig& cfg, const nlohmann::json& obj, const std::string& prefix) {
  if (obj.is_null()) return;
  if (!obj.is_object()) throw DomainError(prefix + " overrides must be an object");
  for (const auto& [key, value] : obj.items()) set_config_value(cfg, prefix + key, json_scalar_text(value));
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace powder::detail
