#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "powder/kernel.hpp"
#include "powder/procgen.hpp"
#include "powder/rng.hpp"
#include "powder/world.hpp"

namespace powder {

inline constexpr int kWorldModelHorizon = 8;

struct WorldModelPair {
  World start;
  World target;
  PcgParams params;
  std::uint64_t seed = 0;
};

// Start state from `params` with its seed replaced by `seed`, and the state
// kWorldModelHorizon ticks later.
WorldModelPair gen_world_model_pair(const PcgParams& params, std::uint64_t seed,
                                    const RuleConfig& config = {});

enum class TaskKind : std::uint8_t { SandPushing = 0, Destroying = 1, PathBuilding = 2 };

std::string_view task_kind_name(TaskKind kind) noexcept;
// Accepts "sand_pushing", "destroying", "path_building".
TaskKind task_kind_from_name(std::string_view name);

// Element tokens 0..13 are elements; 14 is wind.
inline constexpr int kWindToken = kElementCount;
inline constexpr int kTokenCount = kElementCount + 1;
inline constexpr int kVelocityLevels = 8;

// Level k of the wind grid: -2 + 4k/7.
float wind_level(int index);

struct Action {
  int x = 0;
  int y = 0;
  int element = kWindToken;
  int vx_index = 0;
  int vy_index = 0;

  friend bool operator==(const Action&, const Action&) = default;
};

struct Rect {
  int x0 = 0;
  int y0 = 0;
  int x1 = -1;
  int y1 = -1;

  bool contains(int x, int y) const noexcept { return x >= x0 && x <= x1 && y >= y0 && y <= y1; }
  int area() const noexcept { return x1 < x0 || y1 < y0 ? 0 : (x1 - x0 + 1) * (y1 - y0 + 1); }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct EnvState {
  TaskKind kind = TaskKind::SandPushing;
  World world{1, 64, 64};
  RuleConfig rules;
  int tick = 0;
  int episode_length = 64;
  Rect goal;
  int placements_left = 0;
  std::array<bool, kTokenCount> allowed{};
  std::uint64_t seed = 0;
  bool done = false;
  std::int64_t total_reward = 0;
};

struct StepResult {
  std::int64_t reward = 0;
  bool done = false;
};

inline constexpr int kEpisodeTicks = 64;
inline constexpr int kDestroyPlacements = 5;
inline constexpr int kSandBlockCells = 64;

// Lines and circles only; the held-out generator uses squares only.
PcgParams default_task_params(TaskKind kind);

// Obstacles from `difficulty` (seeded with `seed`), then the task furniture.
EnvState env_reset(TaskKind kind, const PcgParams& difficulty, std::uint64_t seed,
                   const RuleConfig& rules = {});

// Throws RejectedAction (state untouched) for out-of-range components or an
// element the task does not allow, EpisodeDone when the episode is over.
StepResult env_step(EnvState& state, const Action& action);

// Reward for the current world (Destroying only pays out on the final tick).
std::int64_t task_reward(const EnvState& state);

World env_observe(const EnvState& state);

// Square-only episode: 5 squares, or 10 for PathBuilding.
EnvState eval_heldout(TaskKind kind, std::uint64_t seed, const RuleConfig& rules = {});

// Hand-written baselines used to sanity-check the reward signal.
Action scripted_action(const EnvState& state);
Action random_action(const EnvState& state, SplitMix64& rng);

}  // namespace powder
