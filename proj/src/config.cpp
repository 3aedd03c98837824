#include "powder/config.hpp"

#include <charconv>
#include <functional>
#include <string>

#include "powder/errors.hpp"

namespace powder {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
std::string num(T v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

template <typename T>
T parse_num(std::string_view key, std::string_view text) {
  T v{};
  const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) {
    throw DomainError("bad value for " + std::string(key) + ": '" + std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw DomainError("bad value for " + std::string(key) + ": expected true or false");
}

struct Field {
  const char* key;
  std::function<std::string(const SimConfig&)> get;
  std::function<void(SimConfig&, std::string_view key, std::string_view)> set;
};

template <typename T>
Field field(const char* key, T PcgParams::*m) {
  return {key, [m](const SimConfig& c) { return num(c.pcg.*m); },
          [m](SimConfig& c, std::string_view k, std::string_view v) { c.pcg.*m = parse_num<T>(k, v); }};
}

template <typename T>
Field field(const char* key, T RuleConfig::*m) {
  return {key, [m](const SimConfig& c) { return num(c.rules.*m); },
          [m](SimConfig& c, std::string_view k, std::string_view v) { c.rules.*m = parse_num<T>(k, v); }};
}

template <typename S>
Field flag(const char* key, bool S::*m) {
  const auto pick = [](auto& c) -> auto& {
    if constexpr (std::is_same_v<S, PcgParams>) {
      return c.pcg;
    } else {
      return c.rules;
    }
  };
  return {key, [m, pick](const SimConfig& c) { return std::string((pick(c).*m) ? "true" : "false"); },
          [m, pick](SimConfig& c, std::string_view k, std::string_view v) { pick(c).*m = parse_bool(k, v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    std::vector<Field> f;
    f.push_back(field("pcg.height", &PcgParams::height));
    f.push_back(field("pcg.width", &PcgParams::width));
    f.push_back(field("pcg.max_lines", &PcgParams::max_lines));
    f.push_back(field("pcg.max_circles", &PcgParams::max_circles));
    f.push_back(field("pcg.max_squares", &PcgParams::max_squares));
    f.push_back(flag("pcg.fixed_counts", &PcgParams::fixed_counts));
    f.push_back({"pcg.palette", [](const SimConfig& c) { return format_palette(c.pcg.palette); },
                 [](SimConfig& c, std::string_view, std::string_view v) { c.pcg.palette = parse_palette(v); }});
    f.push_back(field("pcg.thickness_min", &PcgParams::thickness_min));
    f.push_back(field("pcg.thickness_max", &PcgParams::thickness_max));
    f.push_back(field("pcg.radius_min", &PcgParams::radius_min));
    f.push_back(field("pcg.radius_max", &PcgParams::radius_max));
    f.push_back(field("pcg.seed", &PcgParams::seed));
    f.push_back(field("rules.burn_chance_wood", &RuleConfig::burn_chance_wood));
    f.push_back(field("rules.burn_chance_plant", &RuleConfig::burn_chance_plant));
    f.push_back(field("rules.burn_chance_dust", &RuleConfig::burn_chance_dust));
    f.push_back(field("rules.fire_extinguish_chance", &RuleConfig::fire_extinguish_chance));
    f.push_back(field("rules.ice_melt_chance", &RuleConfig::ice_melt_chance));
    f.push_back(field("rules.freeze_chance", &RuleConfig::freeze_chance));
    f.push_back(field("rules.freeze_neighbor_threshold", &RuleConfig::freeze_neighbor_threshold));
    f.push_back(field("rules.plant_grow_threshold", &RuleConfig::plant_grow_threshold));
    f.push_back(field("rules.plant_grow_chance", &RuleConfig::plant_grow_chance));
    f.push_back(field("rules.plant_to_empty_chance", &RuleConfig::plant_to_empty_chance));
    f.push_back(field("rules.acid_dissolve_chance", &RuleConfig::acid_dissolve_chance));
    f.push_back(field("rules.lava_fire_spawn_chance", &RuleConfig::lava_fire_spawn_chance));
    f.push_back(field("rules.velocity_threshold", &RuleConfig::velocity_threshold));
    f.push_back(field("rules.velocity_decay", &RuleConfig::velocity_decay));
    f.push_back(field("rules.advection_fraction", &RuleConfig::advection_fraction));
    f.push_back(field("rules.diffusion_center", &RuleConfig::diffusion_center));
    f.push_back(field("rules.diffusion_neighbor", &RuleConfig::diffusion_neighbor));
    f.push_back(field("rules.dust_explosion_impulse", &RuleConfig::dust_explosion_impulse));
    f.push_back(flag("rules.reactions_enabled", &RuleConfig::reactions_enabled));
    f.push_back(flag("rules.velocity_enabled", &RuleConfig::velocity_enabled));
    return f;
  }();
  return table;
}

}  // namespace

std::string format_palette(const std::vector<ElementId>& palette) {
  std::string out;
  for (std::size_t i = 0; i < palette.size(); ++i) {
    if (i) out += ", ";
    out += element_name(palette[i]);
  }
  return out;
}

std::vector<ElementId> parse_palette(std::string_view text) {
  std::vector<ElementId> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    const auto id = element_from_name(item);
    if (!id) throw DomainError("unknown element in palette: '" + std::string(item) + "'");
    out.push_back(*id);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  if (out.empty()) throw DomainError("palette must name at least one element");
  return out;
}

void set_config_value(SimConfig& config, std::string_view key, std::string_view value) {
  for (const Field& f : fields()) {
    if (key == f.key) {
      f.set(config, key, trim(value));
      return;
    }
  }
  throw DomainError("unknown config key: " + std::string(key));
}

std::vector<std::string> config_keys() {
  std::vector<std::string> out;
  for (const Field& f : fields()) out.emplace_back(f.key);
  return out;
}

std::string format_config(const SimConfig& config) {
  std::string out;
  for (const Field& f : fields()) {
    out += f.key;
    out += " = ";
    out += f.get(config);
    out += '\n';
  }
  return out;
}

SimConfig parse_config(std::string_view text, const SimConfig& base) {
  SimConfig out = base;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    try {
      set_config_value(out, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const DomainError& e) {
      throw ParseError(line_no, e.what());
    }
  }
  try {
    out.pcg.validate();
    out.rules.validate();
  } catch (const DomainError& e) {
    throw ParseError(line_no, e.what());
  }
  return out;
}

}  // namespace powder
