#include <set>

#include "doctest.h"
#include "powder/errors.hpp"
#include "powder/tasks.hpp"
#include "powder/world_file.hpp"

using namespace powder;

namespace {

PcgParams no_shapes() {
  PcgParams p;
  p.max_lines = p.max_circles = p.max_squares = 0;
  return p;
}

int count(const World& w, ElementId id) {
  return static_cast<int>(element_histogram(w, 0)[static_cast<std::size_t>(to_index(id))]);
}

Action wall_at(int x, int y) {
  Action a;
  a.x = x;
  a.y = y;
  a.element = to_index(ElementId::Wall);
  return a;
}

// True when every non-empty cell lies in some fully painted (2r+1)^2 block
// with r >= 2; cells past the border count as painted.
bool covered_by_squares(const World& w) {
  const auto painted = [&](int x, int y) {
    return x < 0 || y < 0 || x >= w.width() || y >= w.height() || w.element(0, x, y) != ElementId::Empty;
  };
  for (int y = 0; y < w.height(); ++y) {
    for (int x = 0; x < w.width(); ++x) {
      if (!painted(x, y)) continue;
      bool covered = false;
      for (int oy = -4; oy <= 0 && !covered; ++oy) {
        for (int ox = -4; ox <= 0 && !covered; ++ox) {
          bool full = true;
          for (int dy = 0; dy < 5 && full; ++dy) {
            for (int dx = 0; dx < 5 && full; ++dx) full = painted(x + ox + dx, y + oy + dy);
          }
          covered = full;
        }
      }
      if (!covered) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("world-model pairs") {
  const WorldModelPair empty = gen_world_model_pair(no_shapes(), 3);
  CHECK(count(empty.start, ElementId::Empty) == 4096);
  CHECK(world_digest(empty.start, 0) == world_digest(empty.target, 0));
  CHECK(count(empty.target, ElementId::Empty) == 4096);

  PcgParams p;
  std::set<std::uint64_t> digests;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const WorldModelPair pair = gen_world_model_pair(p, seed);
    digests.insert(world_digest(pair.start, 0));
    World again = pair.start;
    for (int t = 0; t < kWorldModelHorizon; ++t) step_in_place(again, RuleConfig{});
    CHECK(world_digest(again, 0) == world_digest(pair.target, 0));
    CHECK(pair.target.tick() == pair.start.tick() + kWorldModelHorizon);
  }
  CHECK(digests.size() == 10);
}

TEST_CASE("task names and wind levels") {
  for (TaskKind k : {TaskKind::SandPushing, TaskKind::Destroying, TaskKind::PathBuilding}) {
    CHECK(task_kind_from_name(task_kind_name(k)) == k);
  }
  CHECK_THROWS_AS(task_kind_from_name("tidying"), DomainError);
  CHECK(wind_level(0) == -2.0f);
  CHECK(wind_level(7) == 2.0f);
  CHECK(wind_level(3) == doctest::Approx(-2.0 + 12.0 / 7.0));
  CHECK_THROWS_AS(wind_level(8), DomainError);
  CHECK_THROWS_AS(wind_level(-1), DomainError);
}

TEST_CASE("reset validates its inputs and is deterministic") {
  CHECK_THROWS_AS(env_reset(static_cast<TaskKind>(7), PcgParams{}, 0), DomainError);
  PcgParams small;
  small.height = small.width = 32;
  CHECK_THROWS_AS(env_reset(TaskKind::Destroying, small, 0), DomainError);
  RuleConfig bad;
  bad.freeze_chance = 2;
  CHECK_THROWS_AS(env_reset(TaskKind::Destroying, PcgParams{}, 0, bad), DomainError);

  for (TaskKind k : {TaskKind::SandPushing, TaskKind::Destroying, TaskKind::PathBuilding}) {
    const EnvState a = env_reset(k, default_task_params(k), 12);
    const EnvState b = env_reset(k, default_task_params(k), 12);
    CHECK(world_digest(a.world, 0) == world_digest(b.world, 0));
    CHECK(a.world.height() == 64);
    CHECK(a.world.width() == 64);
  }
}

TEST_CASE("sand pushing furniture and null policy") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const EnvState s = env_reset(TaskKind::SandPushing, default_task_params(TaskKind::SandPushing), seed);
    CHECK(count(s.world, ElementId::Sand) >= kSandBlockCells);
  }
  EnvState s = env_reset(TaskKind::SandPushing, no_shapes(), 1);
  Action weak;
  weak.element = kWindToken;
  weak.vx_index = 4;
  weak.vy_index = 3;
  std::int64_t total = 0;
  while (!s.done) total += env_step(s, weak).reward;
  CHECK(s.tick == kEpisodeTicks);
  CHECK(total == 0);
}

TEST_CASE("sand pushing only takes wind") {
  EnvState s = env_reset(TaskKind::SandPushing, default_task_params(TaskKind::SandPushing), 2);
  const std::uint64_t d = world_digest(s.world, 0);
  for (int token = 0; token < kElementCount; ++token) {
    Action a;
    a.x = 10;
    a.y = 10;
    a.element = token;
    CHECK_THROWS_AS(env_step(s, a), RejectedAction);
  }
  Action off;
  off.x = 64;
  CHECK_THROWS_AS(env_step(s, off), RejectedAction);
  Action level;
  level.vx_index = 8;
  CHECK_THROWS_AS(env_step(s, level), RejectedAction);
  CHECK(world_digest(s.world, 0) == d);
  CHECK(s.tick == 0);
}

TEST_CASE("episodes have exact lengths and bounded rewards") {
  for (TaskKind k : {TaskKind::SandPushing, TaskKind::Destroying, TaskKind::PathBuilding}) {
    EnvState s = env_reset(k, default_task_params(k), 4);
    SplitMix64 rng(4);
    int steps = 0;
    while (!s.done) {
      const StepResult r = env_step(s, random_action(s, rng));
      CHECK(r.reward >= 0);
      CHECK(r.reward <= 4096);
      ++steps;
    }
    CHECK(steps == (k == TaskKind::Destroying ? kDestroyPlacements + kEpisodeTicks : kEpisodeTicks));
    CHECK_THROWS_AS(env_step(s, random_action(s, rng)), EpisodeDone);
  }
}

TEST_CASE("destroying pays only at the end") {
  EnvState s = env_reset(TaskKind::Destroying, no_shapes(), 0);
  Action empty_token;
  empty_token.element = 0;
  CHECK_THROWS_AS(env_step(s, empty_token), RejectedAction);
  Action wind;
  CHECK_THROWS_AS(env_step(s, wind), RejectedAction);
  for (int k = 0; k < kDestroyPlacements; ++k) CHECK(env_step(s, wall_at(k, 0)).reward == 0);
  CHECK(s.placements_left == 0);
  CHECK(count(s.world, ElementId::Wall) == 5);
  // Later actions are ignored but still range-checked.
  CHECK_NOTHROW(env_step(s, empty_token));
  CHECK(count(s.world, ElementId::Wall) == 5);
  Action off;
  off.y = -1;
  CHECK_THROWS_AS(env_step(s, off), RejectedAction);
  StepResult last;
  while (!s.done) {
    last = env_step(s, wall_at(20, 20));
    if (!s.done) CHECK(last.reward == 0);
  }
  CHECK(last.reward == 4096 - 5);
}

TEST_CASE("acid beats walls on a wall-square world") {
  PcgParams walls;
  walls.max_lines = walls.max_circles = 0;
  walls.max_squares = 5;
  walls.fixed_counts = true;
  walls.palette = {ElementId::Wall};
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EnvState acid = env_reset(TaskKind::Destroying, walls, seed);
    EnvState wall = acid;
    while (!acid.done) env_step(acid, scripted_action(acid));
    int k = 0;
    while (!wall.done) env_step(wall, wall_at(k++ % 64, 0));
    CHECK(task_reward(acid) > task_reward(wall));
  }
}

TEST_CASE("path building edits walls only") {
  EnvState s = env_reset(TaskKind::PathBuilding, no_shapes(), 0);
  Action sand;
  sand.x = 30;
  sand.y = 5;
  sand.element = to_index(ElementId::Sand);
  CHECK_THROWS_AS(env_step(s, sand), RejectedAction);
  env_step(s, wall_at(30, 5));
  CHECK(s.world.element(0, 30, 5) == ElementId::Wall);
  Action remove;
  remove.x = 30;
  remove.y = 5;
  remove.element = to_index(ElementId::Empty);
  env_step(s, remove);
  CHECK(s.world.element(0, 30, 5) == ElementId::Empty);
  remove.x = 11;
  remove.y = 15;
  env_step(s, remove);
  CHECK(s.world.element(0, 11, 15) == ElementId::Cloner);
}

TEST_CASE("a built channel delivers water before the end") {
  EnvState s = env_reset(TaskKind::PathBuilding, no_shapes(), 0);
  int first = -1;
  while (!s.done) {
    const StepResult r = env_step(s, scripted_action(s));
    if (r.reward > 0 && first < 0) first = s.tick;
  }
  CHECK(first > 0);
  CHECK(first < kEpisodeTicks);
  MESSAGE("first water in goal at tick " << first);
}

TEST_CASE("replays are deterministic") {
  for (TaskKind k : {TaskKind::SandPushing, TaskKind::Destroying, TaskKind::PathBuilding}) {
    std::vector<std::int64_t> rewards[2];
    std::uint64_t digest[2];
    for (int run = 0; run < 2; ++run) {
      EnvState s = env_reset(k, default_task_params(k), 8);
      SplitMix64 rng(8);
      while (!s.done) rewards[run].push_back(env_step(s, random_action(s, rng)).reward);
      digest[run] = world_digest(s.world, 0);
    }
    CHECK(rewards[0] == rewards[1]);
    CHECK(digest[0] == digest[1]);
  }
}

TEST_CASE("observations are the full Markov state") {
  EnvState s = env_reset(TaskKind::SandPushing, default_task_params(TaskKind::SandPushing), 6);
  SplitMix64 rng(6);
  for (int t = 0; t < 20; ++t) env_step(s, random_action(s, rng));
  const World obs = env_observe(s);
  CHECK(world_digest(obs, 0) == world_digest(s.world, 0));
  CHECK(world_digest(env_observe(s), 0) == world_digest(obs, 0));

  EnvState resumed = s;
  resumed.world = load_world(save_world(obs));
  SplitMix64 rng_a(60), rng_b(60);
  while (!s.done) {
    const StepResult a = env_step(s, random_action(s, rng_a));
    const StepResult b = env_step(resumed, random_action(resumed, rng_b));
    CHECK(a.reward == b.reward);
  }
  CHECK(world_digest(s.world, 0) == world_digest(resumed.world, 0));
}

TEST_CASE("held-out episodes use squares only") {
  CHECK(default_task_params(TaskKind::SandPushing).max_squares == 0);
  CHECK(default_task_params(TaskKind::PathBuilding).max_squares == 0);
  for (TaskKind k : {TaskKind::SandPushing, TaskKind::Destroying, TaskKind::PathBuilding}) {
    PcgParams squares = default_task_params(k);
    squares.max_lines = squares.max_circles = 0;
    squares.max_squares = k == TaskKind::PathBuilding ? 10 : 5;
    squares.fixed_counts = true;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const EnvState h = eval_heldout(k, seed);
      CHECK(world_digest(h.world, 0) == world_digest(env_reset(k, squares, seed).world, 0));
    }
  }
  int square_worlds = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    square_worlds += covered_by_squares(eval_heldout(TaskKind::Destroying, seed).world);
  }
  CHECK(square_worlds == 10);
  int trained = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    trained += covered_by_squares(env_reset(TaskKind::Destroying, default_task_params(TaskKind::Destroying), seed).world);
  }
  CHECK(trained < 10);
}
