#include "powder/tasks.hpp"

#include <algorithm>
#include <string>

#include "powder/errors.hpp"

namespace powder {

WorldModelPair gen_world_model_pair(const PcgParams& params, std::uint64_t seed,
                                    const RuleConfig& config) {
  PcgParams p = params;
  p.seed = seed;
  WorldModelPair pair{gen_start_state(p), World(1, p.height, p.width), p, seed};
  pair.target = pair.start;
  for (int t = 0; t < kWorldModelHorizon; ++t) step_in_place(pair.target, config);
  return pair;
}

std::string_view task_kind_name(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::SandPushing:
      return "sand_pushing";
    case TaskKind::Destroying:
      return "destroying";
    case TaskKind::PathBuilding:
      return "path_building";
  }
  return "unknown";
}

TaskKind task_kind_from_name(std::string_view name) {
  for (TaskKind k : {TaskKind::SandPushing, TaskKind::Destroying, TaskKind::PathBuilding}) {
    if (task_kind_name(k) == name) return k;
  }
  throw DomainError("unknown task kind: " + std::string(name));
}

float wind_level(int index) {
  if (index < 0 || index >= kVelocityLevels) {
    throw DomainError("wind level index out of range: " + std::to_string(index));
  }
  return -2.0f + 4.0f * static_cast<float>(index) / static_cast<float>(kVelocityLevels - 1);
}

namespace {

// Frozen 64x64 task geometry.
namespace sand_layout {
constexpr Rect kWallBlock{58, 0, 63, 55};
constexpr Rect kBackWall{63, 56, 63, 63};
constexpr Rect kGoal{58, 56, 62, 63};
constexpr Rect kSand{40, 56, 47, 63};
}  // namespace sand_layout

namespace path_layout {
constexpr Rect kSourceClear{6, 10, 17, 18};
constexpr Rect kWater{10, 14, 13, 14};
constexpr Rect kCloner{10, 15, 13, 15};
constexpr Rect kContainerClear{34, 30, 45, 44};
constexpr Rect kLeftWall{35, 36, 35, 44};
constexpr Rect kRightWall{44, 36, 44, 44};
constexpr Rect kFloor{35, 44, 44, 44};
constexpr Rect kGoal{36, 36, 43, 43};
constexpr int kShelfY = 18;
constexpr int kShelfX0 = 9;
constexpr int kShelfX1 = 36;
}  // namespace path_layout

constexpr int kLayoutSize = 64;

void paint(World& w, const Rect& r, ElementId id) { fill_rect(w, 0, r.x0, r.y0, r.x1, r.y1, id); }

std::int64_t count_in(const World& w, const Rect& r, ElementId id) {
  const ConstSlotView v = w.slot(0);
  std::int64_t n = 0;
  for (int y = std::max(0, r.y0); y <= std::min(v.height - 1, r.y1); ++y) {
    for (int x = std::max(0, r.x0); x <= std::min(v.width - 1, r.x1); ++x) {
      n += v.elem[static_cast<std::size_t>(v.index(x, y))] == id ? 1 : 0;
    }
  }
  return n;
}

void furnish(EnvState& s) {
  World& w = s.world;
  switch (s.kind) {
    case TaskKind::SandPushing:
      paint(w, sand_layout::kWallBlock, ElementId::Wall);
      paint(w, sand_layout::kBackWall, ElementId::Wall);
      paint(w, sand_layout::kGoal, ElementId::Empty);
      paint(w, sand_layout::kSand, ElementId::Sand);
      s.goal = sand_layout::kGoal;
      s.allowed[kWindToken] = true;
      break;
    case TaskKind::Destroying:
      s.placements_left = kDestroyPlacements;
      for (int t = 1; t < kElementCount; ++t) s.allowed[static_cast<std::size_t>(t)] = true;
      break;
    case TaskKind::PathBuilding:
      paint(w, path_layout::kSourceClear, ElementId::Empty);
      paint(w, path_layout::kWater, ElementId::Water);
      paint(w, path_layout::kCloner, ElementId::Cloner);
      paint(w, path_layout::kContainerClear, ElementId::Empty);
      paint(w, path_layout::kLeftWall, ElementId::Wall);
      paint(w, path_layout::kRightWall, ElementId::Wall);
      paint(w, path_layout::kFloor, ElementId::Wall);
      s.goal = path_layout::kGoal;
      s.allowed[to_index(ElementId::Empty)] = true;
      s.allowed[to_index(ElementId::Wall)] = true;
      break;
  }
}

void check_action(const EnvState& s, const Action& a) {
  const World& w = s.world;
  if (a.x < 0 || a.x >= w.width() || a.y < 0 || a.y >= w.height()) {
    throw RejectedAction("action position (" + std::to_string(a.x) + "," + std::to_string(a.y) +
                         ") out of range");
  }
  if (a.element < 0 || a.element >= kTokenCount) {
    throw RejectedAction("element token out of range: " + std::to_string(a.element));
  }
  if (a.vx_index < 0 || a.vx_index >= kVelocityLevels || a.vy_index < 0 ||
      a.vy_index >= kVelocityLevels) {
    throw RejectedAction("wind level index out of range");
  }
  const bool placing = s.kind != TaskKind::Destroying || s.placements_left > 0;
  if (placing && !s.allowed[static_cast<std::size_t>(a.element)]) {
    throw RejectedAction("token " + std::to_string(a.element) + " not allowed for " +
                         std::string(task_kind_name(s.kind)));
  }
}

}  // namespace

PcgParams default_task_params(TaskKind kind) {
  PcgParams p;
  p.height = kLayoutSize;
  p.width = kLayoutSize;
  p.max_lines = kind == TaskKind::PathBuilding ? 4 : 3;
  p.max_circles = kind == TaskKind::PathBuilding ? 4 : 3;
  p.max_squares = 0;
  return p;
}

EnvState env_reset(TaskKind kind, const PcgParams& difficulty, std::uint64_t seed,
                   const RuleConfig& rules) {
  if (kind != TaskKind::SandPushing && kind != TaskKind::Destroying &&
      kind != TaskKind::PathBuilding) {
    throw DomainError("invalid task kind");
  }
  rules.validate();
  if (difficulty.height != kLayoutSize || difficulty.width != kLayoutSize) {
    throw DomainError("task worlds are 64x64");
  }
  PcgParams p = difficulty;
  p.seed = seed;
  EnvState s;
  s.kind = kind;
  s.world = gen_start_state(p);
  s.rules = rules;
  s.seed = seed;
  s.episode_length = kind == TaskKind::Destroying ? kDestroyPlacements + kEpisodeTicks : kEpisodeTicks;
  furnish(s);
  return s;
}

std::int64_t task_reward(const EnvState& s) {
  switch (s.kind) {
    case TaskKind::SandPushing:
      return count_in(s.world, s.goal, ElementId::Sand);
    case TaskKind::PathBuilding:
      return count_in(s.world, s.goal, ElementId::Water);
    case TaskKind::Destroying:
      if (s.tick < s.episode_length) return 0;
      return element_histogram(s.world, 0)[to_index(ElementId::Empty)];
  }
  return 0;
}

StepResult env_step(EnvState& s, const Action& a) {
  if (s.done) throw EpisodeDone();
  check_action(s, a);
  World& w = s.world;
  switch (s.kind) {
    case TaskKind::SandPushing:
      add_wind(w, 0, a.x, a.y, wind_level(a.vx_index), wind_level(a.vy_index));
      break;
    case TaskKind::Destroying:
      if (s.placements_left > 0) {
        set_element(w, 0, a.x, a.y, static_cast<ElementId>(a.element));
        --s.placements_left;
      }
      break;
    case TaskKind::PathBuilding:
      if (a.element == to_index(ElementId::Wall)) {
        set_element(w, 0, a.x, a.y, ElementId::Wall);
      } else if (w.element(0, a.x, a.y) == ElementId::Wall) {
        set_element(w, 0, a.x, a.y, ElementId::Empty);
      }
      break;
  }
  step_in_place(w, s.rules);
  ++s.tick;
  s.done = s.tick >= s.episode_length;
  StepResult r{task_reward(s), s.done};
  s.total_reward += r.reward;
  return r;
}

World env_observe(const EnvState& s) { return s.world; }

EnvState eval_heldout(TaskKind kind, std::uint64_t seed, const RuleConfig& rules) {
  PcgParams p = default_task_params(kind);
  p.max_lines = 0;
  p.max_circles = 0;
  p.max_squares = kind == TaskKind::PathBuilding ? 10 : 5;
  p.fixed_counts = true;
  return env_reset(kind, p, seed, rules);
}

namespace {

Action sand_script(const EnvState& s) {
  const ConstSlotView v = s.world.slot(0);
  std::int64_t sx = 0, sy = 0, n = 0;
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      if (v.elem[static_cast<std::size_t>(v.index(x, y))] == ElementId::Sand && !s.goal.contains(x, y)) {
        sx += x;
        sy += y;
        ++n;
      }
    }
  }
  Action a;
  a.element = kWindToken;
  a.vx_index = kVelocityLevels - 1;
  a.vy_index = kVelocityLevels / 2 - 1;
  if (n == 0) {
    a.x = s.goal.x0;
    a.y = s.goal.y0;
    return a;
  }
  a.x = static_cast<int>(sx / n);
  a.y = static_cast<int>(sy / n);
  return a;
}

Action destroy_script(const EnvState& s) {
  const ConstSlotView v = s.world.slot(0);
  Action a;
  a.element = to_index(ElementId::Acid);
  int best = -1;
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const ElementId e = v.elem[static_cast<std::size_t>(v.index(x, y))];
      if (e == ElementId::Empty || e == ElementId::Fire || e == ElementId::Acid) continue;
      int score = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (!v.in_bounds(x + dx, y + dy)) continue;
          const ElementId n = v.elem[static_cast<std::size_t>(v.index(x + dx, y + dy))];
          if (n != ElementId::Empty) ++score;
        }
      }
      if (props_of(e).is_burnable) score += 100;
      if (score > best) {
        best = score;
        a.x = x;
        a.y = y;
        a.element = props_of(e).is_burnable ? to_index(ElementId::Fire) : to_index(ElementId::Acid);
      }
    }
  }
  return a;
}

Action path_script(const EnvState& s) {
  using namespace path_layout;
  const ConstSlotView v = s.world.slot(0);
  const auto open = [&](int x, int y) {
    return v.elem[static_cast<std::size_t>(v.index(x, y))] != ElementId::Wall;
  };
  const auto at = [](int x, int y, ElementId id) {
    Action a;
    a.x = x;
    a.y = y;
    a.element = to_index(id);
    return a;
  };
  // Under the source first, then the left lip, then outward to the right.
  for (int x = kCloner.x0; x <= kCloner.x1; ++x) {
    if (open(x, kShelfY)) return at(x, kShelfY, ElementId::Wall);
  }
  if (open(kShelfX0, kShelfY)) return at(kShelfX0, kShelfY, ElementId::Wall);
  if (open(kShelfX0, kShelfY - 1)) return at(kShelfX0, kShelfY - 1, ElementId::Wall);
  for (int x = kCloner.x1 + 1; x <= kShelfX1; ++x) {
    if (open(x, kShelfY)) return at(x, kShelfY, ElementId::Wall);
  }
  // Clear the drop from the end of the shelf into the container.
  for (int y = kShelfY + 1; y < kGoal.y0; ++y) {
    if (!open(kShelfX1 + 1, y)) return at(kShelfX1 + 1, y, ElementId::Empty);
  }
  return at(kShelfX0, kShelfY, ElementId::Wall);
}

}  // namespace

Action scripted_action(const EnvState& s) {
  switch (s.kind) {
    case TaskKind::SandPushing:
      return sand_script(s);
    case TaskKind::Destroying:
      return destroy_script(s);
    case TaskKind::PathBuilding:
      return path_script(s);
  }
  return {};
}

Action random_action(const EnvState& s, SplitMix64& rng) {
  Action a;
  a.x = static_cast<int>(rng.uniform_int(0, s.world.width() - 1));
  a.y = static_cast<int>(rng.uniform_int(0, s.world.height() - 1));
  std::array<int, kTokenCount> tokens{};
  int n = 0;
  for (int t = 0; t < kTokenCount; ++t) {
    if (s.allowed[static_cast<std::size_t>(t)]) tokens[static_cast<std::size_t>(n++)] = t;
  }
  a.element = n == 0 ? 0 : tokens[static_cast<std::size_t>(rng.uniform_int(0, n - 1))];
  a.vx_index = static_cast<int>(rng.uniform_int(0, kVelocityLevels - 1));
  a.vy_index = static_cast<int>(rng.uniform_int(0, kVelocityLevels - 1));
  return a;
}

}  // namespace powder
