#include "powder/procgen.hpp"

#include <algorithm>
#include <string>

#include "powder/errors.hpp"
#include "powder/rng.hpp"

namespace powder {

std::vector<ElementId> PcgParams::default_palette() {
  std::vector<ElementId> out;
  for (int i = 1; i < kElementCount; ++i) out.push_back(static_cast<ElementId>(i));
  return out;
}

void PcgParams::validate() const {
  if (height < 1 || width < 1) throw DomainError("pcg: world size must be >= 1");
  if (max_lines < 0 || max_circles < 0 || max_squares < 0) {
    throw DomainError("pcg: shape maxima must be >= 0");
  }
  if (palette.empty()) throw DomainError("pcg: palette must not be empty");
  for (ElementId e : palette) element_props(e);
  if (thickness_min < 1 || thickness_max < thickness_min) {
    throw DomainError("pcg: thickness range must satisfy 1 <= min <= max");
  }
  if (radius_min < 0 || radius_max < radius_min) {
    throw DomainError("pcg: radius range must satisfy 0 <= min <= max");
  }
}

bool in_line(int px, int py, int x1, int y1, int x2, int y2, int thickness) noexcept {
  const std::int64_t dx = x2 - x1;
  const std::int64_t dy = y2 - y1;
  const std::int64_t rx = px - x1;
  const std::int64_t ry = py - y1;
  const std::int64_t t2 = static_cast<std::int64_t>(thickness) * thickness;
  const std::int64_t len2 = dx * dx + dy * dy;
  const std::int64_t proj = rx * dx + ry * dy;
  if (len2 == 0 || proj <= 0) return rx * rx + ry * ry < t2;
  if (proj >= len2) {
    const std::int64_t qx = px - x2;
    const std::int64_t qy = py - y2;
    return qx * qx + qy * qy < t2;
  }
  const std::int64_t cross = rx * dy - ry * dx;
  return cross * cross < t2 * len2;
}

namespace {

void require_point(const World& world, int x, int y, const char* what) {
  if (x < 0 || y < 0 || x >= world.width() || y >= world.height()) {
    throw DomainError(std::string(what) + ": point (" + std::to_string(x) + "," +
                      std::to_string(y) + ") out of range");
  }
}

}  // namespace

void draw_line(World& world, int slot, int x1, int y1, int x2, int y2, int thickness, ElementId id) {
  element_props(id);
  if (thickness <= 0) throw DomainError("draw_line: thickness must be positive");
  require_point(world, x1, y1, "draw_line");
  require_point(world, x2, y2, "draw_line");
  SlotView v = world.slot(slot);
  const int xmin = std::max(0, std::min(x1, x2) - thickness);
  const int xmax = std::min(v.width - 1, std::max(x1, x2) + thickness);
  const int ymin = std::max(0, std::min(y1, y2) - thickness);
  const int ymax = std::min(v.height - 1, std::max(y1, y2) + thickness);
  for (int y = ymin; y <= ymax; ++y) {
    for (int x = xmin; x <= xmax; ++x) {
      if (in_line(x, y, x1, y1, x2, y2, thickness)) v.assign(v.index(x, y), id);
    }
  }
}

void draw_circle(World& world, int slot, int cx, int cy, int radius, ElementId id) {
  element_props(id);
  if (radius < 0) throw DomainError("draw_circle: radius must be >= 0");
  require_point(world, cx, cy, "draw_circle");
  SlotView v = world.slot(slot);
  const std::int64_t r2 = static_cast<std::int64_t>(radius) * radius;
  for (int y = std::max(0, cy - radius); y <= std::min(v.height - 1, cy + radius); ++y) {
    for (int x = std::max(0, cx - radius); x <= std::min(v.width - 1, cx + radius); ++x) {
      const std::int64_t dx = x - cx;
      const std::int64_t dy = y - cy;
      if (dx * dx + dy * dy <= r2) v.assign(v.index(x, y), id);
    }
  }
}

void draw_square(World& world, int slot, int cx, int cy, int radius, ElementId id) {
  element_props(id);
  if (radius < 0) throw DomainError("draw_square: radius must be >= 0");
  require_point(world, cx, cy, "draw_square");
  fill_rect(world, slot, cx - radius, cy - radius, cx + radius, cy + radius, id);
}

void fill_rect(World& world, int slot, int x0, int y0, int x1, int y1, ElementId id) {
  element_props(id);
  SlotView v = world.slot(slot);
  for (int y = std::max(0, y0); y <= std::min(v.height - 1, y1); ++y) {
    for (int x = std::max(0, x0); x <= std::min(v.width - 1, x1); ++x) {
      v.assign(v.index(x, y), id);
    }
  }
}

ShapeCounts draw_random_shapes(World& world, int slot, const PcgParams& params, SplitMix64& rng) {
  params.validate();
  const int w = world.width();
  const int h = world.height();
  const auto count = [&](int max) {
    return params.fixed_counts ? max : static_cast<int>(rng.uniform_int(0, max));
  };
  const auto element = [&] {
    const auto k = rng.uniform_int(0, static_cast<std::int64_t>(params.palette.size()) - 1);
    return params.palette[static_cast<std::size_t>(k)];
  };
  const auto coord = [&](int extent) { return static_cast<int>(rng.uniform_int(0, extent - 1)); };

  ShapeCounts drawn;
  drawn.lines = count(params.max_lines);
  for (int k = 0; k < drawn.lines; ++k) {
    const ElementId id = element();
    const int x1 = coord(w), y1 = coord(h), x2 = coord(w), y2 = coord(h);
    const int t = static_cast<int>(rng.uniform_int(params.thickness_min, params.thickness_max));
    draw_line(world, slot, x1, y1, x2, y2, t, id);
  }
  drawn.circles = count(params.max_circles);
  for (int k = 0; k < drawn.circles; ++k) {
    const ElementId id = element();
    const int cx = coord(w), cy = coord(h);
    const int r = static_cast<int>(rng.uniform_int(params.radius_min, params.radius_max));
    draw_circle(world, slot, cx, cy, r, id);
  }
  drawn.squares = count(params.max_squares);
  for (int k = 0; k < drawn.squares; ++k) {
    const ElementId id = element();
    const int cx = coord(w), cy = coord(h);
    const int r = static_cast<int>(rng.uniform_int(params.radius_min, params.radius_max));
    draw_square(world, slot, cx, cy, r, id);
  }
  return drawn;
}

World gen_start_state(const PcgParams& params, ShapeCounts* counts) {
  params.validate();
  World world = make_world(1, params.height, params.width, ElementId::Empty, params.seed);
  SplitMix64 rng(splitmix64(params.seed ^ 0x7063675F73746172ull));
  const ShapeCounts drawn = draw_random_shapes(world, 0, params, rng);
  if (counts != nullptr) *counts = drawn;
  return world;
}

// ------------------------------------------------------------ test suite

namespace {

constexpr int kSuiteSize = 64;

World blank(std::uint64_t seed) {
  return make_world(1, kSuiteSize, kSuiteSize, ElementId::Empty, seed);
}

template <typename Pred>
int count_cells(const World& w, Pred pred) {
  int n = 0;
  for (int y = 0; y < w.height(); ++y) {
    for (int x = 0; x < w.width(); ++x) {
      if (pred(x, y, w.element(0, x, y))) ++n;
    }
  }
  return n;
}

int count_element(const World& w, ElementId id) {
  return count_cells(w, [id](int, int, ElementId e) { return e == id; });
}

// (1) A sand layer resting on a water layer inside a narrow basin.
TestScenario sand_through_water() {
  TestScenario s;
  s.name = "sand-through-water";
  s.build = [](std::uint64_t seed) {
    World w = blank(seed);
    fill_rect(w, 0, 27, 44, 27, 63, ElementId::Wall);
    fill_rect(w, 0, 36, 44, 36, 63, ElementId::Wall);
    fill_rect(w, 0, 28, 60, 35, 62, ElementId::Water);
    fill_rect(w, 0, 28, 57, 35, 59, ElementId::Sand);
    fill_rect(w, 0, 27, 63, 36, 63, ElementId::Wall);
    return w;
  };
  s.check = [](const World& w) {
    for (int x = 0; x < w.width(); ++x) {
      int lowest_water = -1;
      int highest_sand = w.height();
      for (int y = 0; y < w.height(); ++y) {
        const ElementId e = w.element(0, x, y);
        if (e == ElementId::Water) lowest_water = std::max(lowest_water, y);
        if (e == ElementId::Sand) highest_sand = std::min(highest_sand, y);
      }
      if (lowest_water >= highest_sand) return false;
    }
    return true;
  };
  return s;
}

// (2) A horizontal plant vine with a line of fire trapped beneath it.
TestScenario fire_burns_vine() {
  TestScenario s;
  s.name = "fire-burns-plant-vine";
  s.build = [](std::uint64_t seed) {
    World w = blank(seed);
    fill_rect(w, 0, 12, 40, 51, 40, ElementId::Plant);
    fill_rect(w, 0, 12, 41, 51, 41, ElementId::Fire);
    return w;
  };
  s.check = [](const World& w) {
    // At least half of the 40-cell vine has burned away.
    const int plants = count_cells(w, [](int x, int y, ElementId e) {
      return e == ElementId::Plant && y == 40 && x >= 12 && x <= 51;
    });
    return plants <= 20;
  };
  return s;
}

// (3) A block of gas released in open air.
TestScenario gas_rises() {
  TestScenario s;
  s.name = "gas-rises-through-cavity";
  s.build = [](std::uint64_t seed) {
    World w = blank(seed);
    fill_rect(w, 0, 24, 20, 24, 63, ElementId::Wall);
    fill_rect(w, 0, 39, 20, 39, 63, ElementId::Wall);
    fill_rect(w, 0, 28, 50, 35, 53, ElementId::Gas);
    return w;
  };
  s.check = [](const World& w) {
    // Every gas cell is strictly above the block's starting top row (y=50).
    return count_cells(w, [](int, int y, ElementId e) { return e == ElementId::Gas && y >= 50; }) == 0;
  };
  return s;
}

// (4) Water poured onto a wall platform spills past both edges.
TestScenario water_around_obstacle() {
  TestScenario s;
  s.name = "water-flows-around-obstacle";
  s.build = [](std::uint64_t seed) {
    World w = blank(seed);
    fill_rect(w, 0, 26, 40, 37, 40, ElementId::Wall);
    fill_rect(w, 0, 28, 34, 35, 39, ElementId::Water);
    return w;
  };
  s.check = [](const World& w) {
    const int left = count_cells(w, [](int x, int y, ElementId e) {
      return e == ElementId::Water && y > 40 && x < 26;
    });
    const int right = count_cells(w, [](int x, int y, ElementId e) {
      return e == ElementId::Water && y > 40 && x > 37;
    });
    if (count_element(w, ElementId::Water) == 0) return true;
    return left > 0 && right > 0;
  };
  return s;
}

// (5) An ice slab lying on a pool of water.
TestScenario ice_freezes_water() {
  TestScenario s;
  s.name = "ice-freezes-adjacent-water";
  s.build = [](std::uint64_t seed) {
    World w = blank(seed);
    fill_rect(w, 0, 15, 30, 15, 63, ElementId::Wall);
    fill_rect(w, 0, 48, 30, 48, 63, ElementId::Wall);
    fill_rect(w, 0, 16, 52, 47, 63, ElementId::Water);
    fill_rect(w, 0, 16, 51, 47, 51, ElementId::Ice);
    return w;
  };
  s.check = [](const World& w) {
    // Some cell of the original pool has turned to ice.
    return count_cells(w, [](int x, int y, ElementId e) {
             return e == ElementId::Ice && x >= 16 && x <= 47 && y >= 52;
           }) > 0;
  };
  return s;
}

// (6) Water poured over a lava pool.
TestScenario lava_meets_water() {
  TestScenario s;
  s.name = "lava-meets-water-makes-stone";
  s.build = [](std::uint64_t seed) {
    World w = blank(seed);
    fill_rect(w, 0, 20, 40, 20, 63, ElementId::Wall);
    fill_rect(w, 0, 43, 40, 43, 63, ElementId::Wall);
    fill_rect(w, 0, 21, 58, 42, 63, ElementId::Lava);
    fill_rect(w, 0, 21, 52, 42, 57, ElementId::Water);
    return w;
  };
  s.check = [](const World& w) {
    const int stone = count_cells(w, [](int x, int, ElementId e) {
      return e == ElementId::Stone && x > 20 && x < 43;
    });
    return stone >= 11;
  };
  return s;
}

// (7) Acid poured onto a suspended wall bridge.
TestScenario acid_dissolves_bridge() {
  TestScenario s;
  s.name = "acid-dissolves-wall-bridge";
  s.build = [](std::uint64_t seed) {
    World w = blank(seed);
    fill_rect(w, 0, 16, 40, 47, 40, ElementId::Wall);
    fill_rect(w, 0, 24, 39, 39, 39, ElementId::Acid);
    return w;
  };
  s.check = [](const World& w) {
    // The bridge has at least one hole.
    for (int x = 16; x <= 47; ++x) {
      if (w.element(0, x, 40) != ElementId::Wall) return true;
    }
    return false;
  };
  return s;
}

// (8) A falling dust cloud meets a rising line of fire. Falling columns open
// gaps, so ignition impulses can throw grains and embers sideways; without
// the velocity system everything stays within the cloud's columns.
TestScenario dust_explosion() {
  TestScenario s;
  s.name = "dust-explosion-scatters";
  s.build = [](std::uint64_t seed) {
    World w = blank(seed);
    fill_rect(w, 0, 28, 20, 35, 27, ElementId::Dust);
    fill_rect(w, 0, 28, 34, 35, 34, ElementId::Fire);
    return w;
  };
  s.check = [](const World& w) {
    const int scattered = count_cells(w, [](int x, int, ElementId e) {
      return e != ElementId::Empty && (x < 26 || x > 37);
    });
    return scattered >= 2;
  };
  return s;
}

}  // namespace

std::vector<TestScenario> test_suite() {
  return {sand_through_water(),    fire_burns_vine(),   gas_rises(),
          water_around_obstacle(), ice_freezes_water(), lava_meets_water(),
          acid_dissolves_bridge(), dust_explosion()};
}

ScenarioResult evaluate_scenario(const TestScenario& scenario, int horizon, const RuleConfig& config,
                                 int seeds, std::uint64_t base_seed) {
  config.validate();
  if (seeds < 1) throw DomainError("evaluate_scenario: seeds must be >= 1");
  ScenarioResult result{scenario.name, horizon, seeds, 0, false, 0};
  for (int k = 0; k < seeds; ++k) {
    World w = scenario.build(base_seed + static_cast<std::uint64_t>(k));
    for (int t = 0; t < horizon; ++t) step_in_place(w, config);
    if (k == 0) result.digest = world_digest(w, 0);
    if (scenario.check(w)) ++result.passed;
  }
  // 90% quantile: at most one failing seed in ten.
  result.ok = result.passed * 10 >= seeds * 9;
  return result;
}

}  // namespace powder
