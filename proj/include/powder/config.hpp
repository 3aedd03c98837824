#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "powder/kernel.hpp"
#include "powder/procgen.hpp"

namespace powder {

struct SimConfig {
  PcgParams pcg;
  RuleConfig rules;
  friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

// Text form, one `key = value` per line, `#` starts a comment:
//
//   pcg.max_lines = 5
//   pcg.palette = sand, water
//   rules.freeze_chance = 0.05
//
// Keys missing from the text keep their value from `base`. Numbers are written
// in shortest round-trip form, so format -> parse is exact.
std::string format_config(const SimConfig& config);
SimConfig parse_config(std::string_view text, const SimConfig& base = {});

// Single assignment with the same key names and value syntax. Throws
// DomainError for an unknown key or a malformed value.
void set_config_value(SimConfig& config, std::string_view key, std::string_view value);

std::vector<std::string> config_keys();

std::string format_palette(const std::vector<ElementId>& palette);
std::vector<ElementId> parse_palette(std::string_view text);

}  // namespace powder
