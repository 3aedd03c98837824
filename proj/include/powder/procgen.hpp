#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "powder/kernel.hpp"
#include "powder/rng.hpp"
#include "powder/world.hpp"

namespace powder {

// Start-state synthesis parameters. Each shape kind is drawn a uniform number
// of times in [0, max] (exactly `max` when fixed_counts is set), each with a
// palette-uniform element and range-uniform geometry.
struct PcgParams {
  int height = 64;
  int width = 64;
  int max_lines = 5;
  int max_circles = 5;
  int max_squares = 5;
  bool fixed_counts = false;
  std::vector<ElementId> palette = default_palette();
  int thickness_min = 1;
  int thickness_max = 3;
  int radius_min = 2;
  int radius_max = 10;
  std::uint64_t seed = 0;

  // Every element except empty.
  static std::vector<ElementId> default_palette();

  // Throws DomainError on an empty palette, negative maxima, or a degenerate
  // range.
  void validate() const;

  friend bool operator==(const PcgParams&, const PcgParams&) = default;
};

// Cells whose Euclidean distance to the segment is strictly below
// `thickness`. A degenerate segment draws an open disc of that radius.
void draw_line(World& world, int slot, int x1, int y1, int x2, int y2, int thickness, ElementId id);
// Closed disc dx^2 + dy^2 <= r^2, clipped.
void draw_circle(World& world, int slot, int cx, int cy, int radius, ElementId id);
// Axis-aligned (2r+1)^2 block, clipped.
void draw_square(World& world, int slot, int cx, int cy, int radius, ElementId id);

// Fills rectangle [x0,x1] x [y0,y1] (inclusive, clipped).
void fill_rect(World& world, int slot, int x0, int y0, int x1, int y1, ElementId id);

// Membership predicates shared by the drawing routines.
bool in_line(int px, int py, int x1, int y1, int x2, int y2, int thickness) noexcept;

struct ShapeCounts {
  int lines = 0;
  int circles = 0;
  int squares = 0;
};

// One-slot world: empty, then lines, circles and squares painted in that
// order. A pure function of params (including params.seed). When `counts` is
// non-null it receives the number of shapes drawn.
World gen_start_state(const PcgParams& params, ShapeCounts* counts = nullptr);

// Draws shapes into an existing slot using an explicit generator.
ShapeCounts draw_random_shapes(World& world, int slot, const PcgParams& params, SplitMix64& rng);

// A hand-designed start state exercising one element interaction.
struct TestScenario {
  std::string name;
  std::function<World(std::uint64_t seed)> build;
  int horizon = 8;
  int long_horizon = 16;
  std::function<bool(const World&)> check;
};

// The frozen eight-scenario regression suite.
std::vector<TestScenario> test_suite();

struct ScenarioResult {
  std::string name;
  int horizon;
  int seeds;
  int passed;
  bool ok;
  std::uint64_t digest;  // evolved digest for the first seed
};

// Runs `seeds` independent rollouts; the scenario passes when at least 90%
// of them satisfy the checker.
ScenarioResult evaluate_scenario(const TestScenario& scenario, int horizon, const RuleConfig& config,
                                 int seeds = 20, std::uint64_t base_seed = 0);

}  // namespace powder
