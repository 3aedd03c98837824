#include "powder/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "powder/errors.hpp"
#include "powder/rng.hpp"

namespace powder {

void RuleConfig::validate() const {
  const auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError(std::string(name) + " must be in [0,1]");
  };
  prob(burn_chance_wood, "burn_chance.wood");
  prob(burn_chance_plant, "burn_chance.plant");
  prob(burn_chance_dust, "burn_chance.dust");
  prob(fire_extinguish_chance, "fire_extinguish_chance");
  prob(ice_melt_chance, "ice_melt_chance");
  prob(freeze_chance, "freeze_chance");
  prob(plant_grow_chance, "plant_grow_chance");
  prob(plant_to_empty_chance, "plant_to_empty_chance");
  prob(plant_grow_chance + plant_to_empty_chance, "plant_grow_chance + plant_to_empty_chance");
  prob(acid_dissolve_chance, "acid_dissolve_chance");
  prob(lava_fire_spawn_chance, "lava_fire_spawn_chance");
  if (!(velocity_decay > 0.0f && velocity_decay < 1.0f)) {
    throw DomainError("velocity_decay must be in (0,1)");
  }
  if (!(velocity_threshold > 0.0f)) throw DomainError("velocity_threshold must be positive");
  if (freeze_neighbor_threshold <= 0) throw DomainError("freeze_neighbor_threshold must be positive");
  if (plant_grow_threshold <= 0) throw DomainError("plant_grow_threshold must be positive");
  if (!(advection_fraction >= 0.0f && advection_fraction <= 1.0f)) {
    throw DomainError("advection_fraction must be in [0,1]");
  }
  if (!(diffusion_center >= 0.0f && diffusion_neighbor >= 0.0f)) {
    throw DomainError("diffusion weights must be non-negative");
  }
  if (!std::isfinite(dust_explosion_impulse)) throw DomainError("dust_explosion_impulse must be finite");
}

double RuleConfig::burn_chance(ElementId id) const noexcept {
  switch (id) {
    case ElementId::Wood:
      return burn_chance_wood;
    case ElementId::Plant:
      return burn_chance_plant;
    case ElementId::Dust:
      return burn_chance_dust;
    default:
      return 0.0;
  }
}

int octant_of(float vx, float vy) noexcept {
  if (vx == 0.0f && vy == 0.0f) return -1;
  constexpr float kTan22_5 = 0.41421357f;
  const float ax = std::fabs(vx);
  const float ay = std::fabs(vy);
  const int horizontal = vx > 0.0f ? 0 : 4;
  const int vertical = vy > 0.0f ? 2 : 6;
  int diagonal;
  if (vx >= 0.0f) {
    diagonal = vy >= 0.0f ? 1 : 7;
  } else {
    diagonal = vy >= 0.0f ? 3 : 5;
  }
  const float h_edge = kTan22_5 * ax;
  const float v_edge = kTan22_5 * ay;
  if (ay < h_edge) return horizontal;
  if (ax < v_edge) return vertical;
  if (ay == h_edge) return std::min(horizontal, diagonal);
  if (ax == v_edge) return std::min(vertical, diagonal);
  return diagonal;
}

namespace {

constexpr Offset kNeighbors8[8] = {{-1, -1}, {0, -1}, {1, -1}, {-1, 0},
                                   {1, 0},   {-1, 1}, {0, 1},  {1, 1}};
// Fixed scan order: up, down, left, right.
constexpr Offset kNeighbors4[4] = {{0, -1}, {0, 1}, {-1, 0}, {1, 0}};

struct Scratch {
  std::vector<ElementId> snap;
  std::vector<std::uint8_t> moved;
  std::vector<std::uint8_t> bits;
  std::vector<std::int32_t> target;
  std::vector<std::int8_t> direction;
  std::vector<std::int8_t> octant;
  std::vector<float> ax;
  std::vector<float> ay;

  void reserve(std::size_t n) {
    snap.resize(n);
    moved.resize(n);
    bits.resize(n);
    target.resize(n);
    direction.resize(n);
    octant.resize(n);
    ax.resize(n);
    ay.resize(n);
  }
};

double uniform(const SlotView& v, RuleStream rule, int i) noexcept {
  return to_unit(counter_hash(v.stream_key, v.tick, static_cast<std::uint32_t>(rule),
                              static_cast<std::uint64_t>(i)));
}

void fill_bits(const SlotView& v, RuleStream rule, std::vector<std::uint8_t>& bits) {
  const int n = static_cast<int>(v.elem.size());
  for (int i = 0; i < n; ++i) {
    bits[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(
        counter_hash(v.stream_key, v.tick, static_cast<std::uint32_t>(rule),
                     static_cast<std::uint64_t>(i)) >>
        63);
  }
}

void take_snapshot(const SlotView& v, Scratch& s) {
  std::copy(v.elem.begin(), v.elem.end(), s.snap.begin());
}

// True when `other` would sink below/past an element of `density`: both
// gravity-enabled and strictly lighter.
bool is_lighter_medium(ElementId other, int density) noexcept {
  const ElementProps& p = props_of(other);
  return p.is_gravity && p.density < density;
}

template <std::size_t N>
int count_neighbors(const SlotView& v, const std::vector<ElementId>& snap, int x, int y,
                    const Offset (&offsets)[N], ElementId target) noexcept {
  int count = 0;
  for (const Offset& o : offsets) {
    const int nx = x + o.dx;
    const int ny = y + o.dy;
    if (v.in_bounds(nx, ny) && snap[static_cast<std::size_t>(v.index(nx, ny))] == target) ++count;
  }
  return count;
}

// ---------------------------------------------------------------- cloner

void cloner_phase(SlotView& v, Scratch& s) {
  take_snapshot(v, s);
  const auto& snap = s.snap;
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const int i = v.index(x, y);
      if (snap[static_cast<std::size_t>(i)] != ElementId::Cloner || v.clone[i] != kCloneUnset) continue;
      for (const Offset& o : kNeighbors4) {
        const int nx = x + o.dx;
        const int ny = y + o.dy;
        if (!v.in_bounds(nx, ny)) continue;
        const ElementId e = snap[static_cast<std::size_t>(v.index(nx, ny))];
        if (e != ElementId::Empty && e != ElementId::Cloner && e != ElementId::Wall) {
          v.clone[i] = static_cast<std::int8_t>(to_index(e));
          break;
        }
      }
    }
  }
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const int i = v.index(x, y);
      if (snap[static_cast<std::size_t>(i)] != ElementId::Empty) continue;
      for (const Offset& o : kNeighbors4) {
        const int nx = x + o.dx;
        const int ny = y + o.dy;
        if (!v.in_bounds(nx, ny)) continue;
        const int j = v.index(nx, ny);
        if (snap[static_cast<std::size_t>(j)] == ElementId::Cloner && v.clone[j] != kCloneUnset) {
          v.assign(i, static_cast<ElementId>(v.clone[j]));
          break;
        }
      }
    }
  }
}

// ---------------------------------------------------------------- reactions

void fire_phase(SlotView& v, const RuleConfig& cfg, Scratch& s) {
  take_snapshot(v, s);
  const auto& snap = s.snap;
  constexpr float kDiag = 0.70710678f;
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const int i = v.index(x, y);
      const double u = uniform(v, RuleStream::Fire, i);
      const ElementId e = snap[static_cast<std::size_t>(i)];
      if (props_of(e).is_burnable) {
        if (count_neighbors(v, snap, x, y, kNeighbors8, ElementId::Fire) == 0) continue;
        if (u >= cfg.burn_chance(e)) continue;
        v.assign(i, ElementId::Fire);
        if (e == ElementId::Dust) {
          for (const Offset& o : kNeighbors8) {
            const int nx = x + o.dx;
            const int ny = y + o.dy;
            if (!v.in_bounds(nx, ny)) continue;
            const int j = v.index(nx, ny);
            const float scale = (o.dx != 0 && o.dy != 0) ? kDiag : 1.0f;
            v.vx[j] += cfg.dust_explosion_impulse * scale * static_cast<float>(o.dx);
            v.vy[j] += cfg.dust_explosion_impulse * scale * static_cast<float>(o.dy);
          }
        }
      } else if (e == ElementId::Fire) {
        bool fuel = false;
        for (const Offset& o : kNeighbors8) {
          const int nx = x + o.dx;
          const int ny = y + o.dy;
          if (v.in_bounds(nx, ny) && props_of(snap[static_cast<std::size_t>(v.index(nx, ny))]).is_burnable) {
            fuel = true;
            break;
          }
        }
        if (!fuel && u < cfg.fire_extinguish_chance) v.assign(i, ElementId::Empty);
      }
    }
  }
}

void ice_water_phase(SlotView& v, const RuleConfig& cfg, Scratch& s) {
  take_snapshot(v, s);
  const auto& snap = s.snap;
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const int i = v.index(x, y);
      const double u = uniform(v, RuleStream::IceWater, i);
      const ElementId e = snap[static_cast<std::size_t>(i)];
      if (e == ElementId::Ice) {
        if (u < cfg.ice_melt_chance) v.assign(i, ElementId::Water);
      } else if (e == ElementId::Water) {
        // 3x3 all-ones kernel; the centre is water so only neighbours count.
        const int ice = count_neighbors(v, snap, x, y, kNeighbors8, ElementId::Ice);
        if (ice >= cfg.freeze_neighbor_threshold && u < cfg.freeze_chance) {
          v.assign(i, ElementId::Ice);
        }
      }
    }
  }
}

void plant_phase(SlotView& v, const RuleConfig& cfg, Scratch& s) {
  take_snapshot(v, s);
  const auto& snap = s.snap;
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const int i = v.index(x, y);
      const double u = uniform(v, RuleStream::Plant, i);
      if (snap[static_cast<std::size_t>(i)] != ElementId::Water) continue;
      const int plants = count_neighbors(v, snap, x, y, kNeighbors8, ElementId::Plant);
      if (plants <= cfg.plant_grow_threshold) continue;
      if (u < cfg.plant_grow_chance) {
        v.assign(i, ElementId::Plant);
      } else if (u < cfg.plant_grow_chance + cfg.plant_to_empty_chance) {
        v.assign(i, ElementId::Empty);
      }
    }
  }
}

void lava_phase(SlotView& v, const RuleConfig& cfg, Scratch& s) {
  take_snapshot(v, s);
  const auto& snap = s.snap;
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const int i = v.index(x, y);
      const double u = uniform(v, RuleStream::Lava, i);
      const ElementId e = snap[static_cast<std::size_t>(i)];
      if (e == ElementId::Lava) {
        if (count_neighbors(v, snap, x, y, kNeighbors4, ElementId::Water) > 0) {
          v.assign(i, ElementId::Stone);
        }
      } else if (e == ElementId::Empty) {
        if (u < cfg.lava_fire_spawn_chance &&
            count_neighbors(v, snap, x, y, kNeighbors4, ElementId::Lava) > 0) {
          v.assign(i, ElementId::Fire);
        }
      }
    }
  }
}

bool dissolvable(ElementId e) noexcept { return e != ElementId::Empty && e != ElementId::Acid; }

void acid_phase(SlotView& v, const RuleConfig& cfg, Scratch& s) {
  take_snapshot(v, s);
  const auto& snap = s.snap;
  auto& doomed = s.moved;
  std::fill(doomed.begin(), doomed.end(), 0);
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const int i = v.index(x, y);
      const double u = uniform(v, RuleStream::Acid, i);
      if (snap[static_cast<std::size_t>(i)] != ElementId::Acid) continue;
      bool touching = false;
      for (const Offset& o : kNeighbors4) {
        const int nx = x + o.dx;
        const int ny = y + o.dy;
        if (v.in_bounds(nx, ny) && dissolvable(snap[static_cast<std::size_t>(v.index(nx, ny))])) {
          touching = true;
          break;
        }
      }
      if (!touching || u >= cfg.acid_dissolve_chance) continue;
      doomed[static_cast<std::size_t>(i)] = 1;
      for (const Offset& o : kNeighbors4) {
        const int nx = x + o.dx;
        const int ny = y + o.dy;
        if (!v.in_bounds(nx, ny)) continue;
        const int j = v.index(nx, ny);
        if (dissolvable(snap[static_cast<std::size_t>(j)])) doomed[static_cast<std::size_t>(j)] = 1;
      }
    }
  }
  const int n = static_cast<int>(v.elem.size());
  for (int i = 0; i < n; ++i) {
    if (doomed[static_cast<std::size_t>(i)]) v.assign(i, ElementId::Empty);
  }
}

// ---------------------------------------------------------------- motion

void gravity_phase(SlotView& v, Scratch& s) {
  auto& moved = s.moved;
  // Highest density first; a cell swaps at most once, so no destination is
  // ever written twice.
  for (int level = 4; level >= 1; --level) {
    for (int y = 0; y + 1 < v.height; ++y) {
      for (int x = 0; x < v.width; ++x) {
        const int i = v.index(x, y);
        const int j = i + v.width;
        if (moved[static_cast<std::size_t>(i)] || moved[static_cast<std::size_t>(j)]) continue;
        const ElementProps& p = props_of(v.elem[i]);
        if (!p.is_gravity || p.density != level) continue;
        if (!is_lighter_medium(v.elem[j], level)) continue;
        v.swap_cells(i, j);
        moved[static_cast<std::size_t>(i)] = 1;
        moved[static_cast<std::size_t>(j)] = 1;
      }
    }
  }
}

bool can_fall(const SlotView& v, int x, int y, int density) noexcept {
  return y + 1 < v.height && is_lighter_medium(v.elem[v.index(x, y + 1)], density);
}

// Resolves proposals where two sources target the same destination from the
// left and from the right. The destination's random bit picks the winner:
// 0 keeps the source on the left, 1 the source on the right.
void apply_lateral_proposals(SlotView& v, Scratch& s, bool record_flow) {
  auto& target = s.target;
  auto& moved = s.moved;
  const int n = static_cast<int>(v.elem.size());
  for (int i = 0; i < n; ++i) {
    const int t = target[static_cast<std::size_t>(i)];
    if (t < 0) continue;
    const int column = i % v.width;
    const int dx = (t % v.width) - column;
    // The only other source that can reach t sits two columns over, same row.
    const int rival_column = column + 2 * dx;
    const bool has_rival = rival_column >= 0 && rival_column < v.width &&
                           target[static_cast<std::size_t>(i + 2 * dx)] == t;
    if (has_rival) {
      const bool left_wins = s.bits[static_cast<std::size_t>(t)] == 0;
      const bool i_is_left = dx > 0;
      if (left_wins != i_is_left) continue;
    }
    v.swap_cells(i, t);
    if (record_flow) v.flow[t] = static_cast<std::int8_t>(dx);
    moved[static_cast<std::size_t>(i)] = 1;
    moved[static_cast<std::size_t>(t)] = 1;
  }
}

void piling_phase(SlotView& v, Scratch& s) {
  fill_bits(v, RuleStream::Piling, s.bits);
  auto& target = s.target;
  std::fill(target.begin(), target.end(), -1);
  const auto& moved = s.moved;
  for (int y = 0; y + 1 < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const int i = v.index(x, y);
      const ElementId e = v.elem[i];
      if (e != ElementId::Sand && e != ElementId::Dust) continue;
      if (moved[static_cast<std::size_t>(i)]) continue;
      const int density = props_of(e).density;
      if (can_fall(v, x, y, density)) continue;
      const int first = s.bits[static_cast<std::size_t>(i)] == 0 ? -1 : 1;
      for (const int dx : {first, -first}) {
        const int nx = x + dx;
        if (nx < 0 || nx >= v.width) continue;
        const int t = v.index(nx, y + 1);
        if (moved[static_cast<std::size_t>(t)] || !is_lighter_medium(v.elem[t], density)) continue;
        target[static_cast<std::size_t>(i)] = t;
        break;
      }
    }
  }
  apply_lateral_proposals(v, s, false);
}

void flow_phase(SlotView& v, Scratch& s) {
  fill_bits(v, RuleStream::Flow, s.bits);
  auto& target = s.target;
  std::fill(target.begin(), target.end(), -1);
  const auto& moved = s.moved;
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const int i = v.index(x, y);
      const ElementId e = v.elem[i];
      const ElementProps& p = props_of(e);
      if (!p.is_fluid || moved[static_cast<std::size_t>(i)]) continue;
      if (can_fall(v, x, y, p.density)) continue;
      int first = v.flow[i];
      if (first == 0) first = s.bits[static_cast<std::size_t>(i)] == 0 ? -1 : 1;
      for (const int dx : {first, -first}) {
        const int nx = x + dx;
        if (nx < 0 || nx >= v.width) continue;
        const int t = v.index(nx, y);
        if (moved[static_cast<std::size_t>(t)] || v.elem[t] != ElementId::Empty) continue;
        target[static_cast<std::size_t>(i)] = t;
        break;
      }
    }
  }
  // A fluid cell riding on a fluid that moves the same way this tick waits,
  // so it drops into the vacated cell instead of chasing the gap. Rows go top
  // down, so each row is read as "below" before it is edited.
  for (int y = 0; y + 1 < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const auto i = static_cast<std::size_t>(v.index(x, y));
      const auto below = static_cast<std::size_t>(v.index(x, y + 1));
      if (target[i] < 0 || target[below] < 0) continue;
      if (target[i] - static_cast<int>(i) == target[below] - static_cast<int>(below)) target[i] = -1;
    }
  }
  apply_lateral_proposals(v, s, true);
}

// ---------------------------------------------------------------- velocity

void evolve_velocity_phase(SlotView& v, const RuleConfig& cfg, Scratch& s) {
  auto& ax = s.ax;
  auto& ay = s.ay;
  std::copy(v.vx.begin(), v.vx.end(), ax.begin());
  std::copy(v.vy.begin(), v.vy.end(), ay.begin());
  const float a = cfg.advection_fraction;
  // Advection: a share of each vector moves one cell along its octant.
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      const int i = v.index(x, y);
      const int k = octant_of(v.vx[i], v.vy[i]);
      if (k < 0) continue;
      const float fx = a * v.vx[i];
      const float fy = a * v.vy[i];
      ax[static_cast<std::size_t>(i)] -= fx;
      ay[static_cast<std::size_t>(i)] -= fy;
      const int nx = x + kOctantOffsets[k].dx;
      const int ny = y + kOctantOffsets[k].dy;
      if (!v.in_bounds(nx, ny)) continue;
      const auto t = static_cast<std::size_t>(v.index(nx, ny));
      ax[t] += fx;
      ay[t] += fy;
    }
  }
  // Diffusion with a 3x3 kernel (outside the grid counts as zero), then decay.
  const float c = cfg.diffusion_center;
  const float nb = cfg.diffusion_neighbor;
  const float decay = cfg.velocity_decay;
  for (int y = 0; y < v.height; ++y) {
    for (int x = 0; x < v.width; ++x) {
      float sx = 0.0f;
      float sy = 0.0f;
      for (const Offset& o : kNeighbors8) {
        const int nx = x + o.dx;
        const int ny = y + o.dy;
        if (!v.in_bounds(nx, ny)) continue;
        const auto j = static_cast<std::size_t>(v.index(nx, ny));
        sx += ax[j];
        sy += ay[j];
      }
      const int i = v.index(x, y);
      float out_x = (c * ax[static_cast<std::size_t>(i)] + nb * sx) * decay;
      float out_y = (c * ay[static_cast<std::size_t>(i)] + nb * sy) * decay;
      if (std::fabs(out_x) < 1e-30f) out_x = 0.0f;
      if (std::fabs(out_y) < 1e-30f) out_y = 0.0f;
      v.vx[i] = out_x;
      v.vy[i] = out_y;
    }
  }
}

void velocity_movement_phase(SlotView& v, const RuleConfig& cfg, Scratch& s) {
  auto& moved = s.moved;
  auto& octant = s.octant;
  std::fill(moved.begin(), moved.end(), 0);
  const float thr2 = cfg.velocity_threshold * cfg.velocity_threshold;
  const int n = static_cast<int>(v.elem.size());
  for (int i = 0; i < n; ++i) {
    const float m2 = v.vx[i] * v.vx[i] + v.vy[i] * v.vy[i];
    octant[static_cast<std::size_t>(i)] =
        m2 > thr2 ? static_cast<std::int8_t>(octant_of(v.vx[i], v.vy[i])) : std::int8_t{-1};
  }
  for (int k = 0; k < 8; ++k) {
    take_snapshot(v, s);
    const Offset d = kOctantOffsets[k];
    for (int y = 0; y < v.height; ++y) {
      for (int x = 0; x < v.width; ++x) {
        const int i = v.index(x, y);
        if (octant[static_cast<std::size_t>(i)] != k || moved[static_cast<std::size_t>(i)]) continue;
        const ElementId e = s.snap[static_cast<std::size_t>(i)];
        if (e == ElementId::Empty || props_of(e).is_static_solid) continue;
        const int nx = x + d.dx;
        const int ny = y + d.dy;
        if (!v.in_bounds(nx, ny)) continue;
        const int t = v.index(nx, ny);
        if (s.snap[static_cast<std::size_t>(t)] != ElementId::Empty) continue;
        v.swap_cells(i, t);
        moved[static_cast<std::size_t>(t)] = 1;
      }
    }
  }
}

// ---------------------------------------------------------------- drivers

Scratch& thread_scratch(std::size_t n) {
  thread_local Scratch scratch;
  scratch.reserve(n);
  return scratch;
}

template <typename Fn>
void for_each_slot(World& world, Fn&& fn) {
  Scratch& s = thread_scratch(world.cells_per_slot());
  for (int slot = 0; slot < world.batch(); ++slot) {
    SlotView v = world.slot(slot);
    fn(v, s);
  }
}

void clear_moved(Scratch& s) { std::fill(s.moved.begin(), s.moved.end(), 0); }

}  // namespace

void react_cloner(World& world) {
  for_each_slot(world, [](SlotView& v, Scratch& s) { cloner_phase(v, s); });
}

void react_fire(World& world, const RuleConfig& config) {
  for_each_slot(world, [&](SlotView& v, Scratch& s) { fire_phase(v, config, s); });
}

void react_ice_water(World& world, const RuleConfig& config) {
  for_each_slot(world, [&](SlotView& v, Scratch& s) { ice_water_phase(v, config, s); });
}

void react_plant(World& world, const RuleConfig& config) {
  for_each_slot(world, [&](SlotView& v, Scratch& s) { plant_phase(v, config, s); });
}

void react_lava(World& world, const RuleConfig& config) {
  for_each_slot(world, [&](SlotView& v, Scratch& s) { lava_phase(v, config, s); });
}

void react_acid(World& world, const RuleConfig& config) {
  for_each_slot(world, [&](SlotView& v, Scratch& s) { acid_phase(v, config, s); });
}

void apply_gravity(World& world) {
  for_each_slot(world, [](SlotView& v, Scratch& s) {
    clear_moved(s);
    gravity_phase(v, s);
  });
}

void apply_sand_piling(World& world) {
  for_each_slot(world, [](SlotView& v, Scratch& s) {
    clear_moved(s);
    piling_phase(v, s);
  });
}

void apply_fluid_flow(World& world) {
  for_each_slot(world, [](SlotView& v, Scratch& s) {
    clear_moved(s);
    flow_phase(v, s);
  });
}

void evolve_velocity(World& world, const RuleConfig& config) {
  for_each_slot(world, [&](SlotView& v, Scratch& s) { evolve_velocity_phase(v, config, s); });
}

void apply_velocity_movement(World& world, const RuleConfig& config) {
  for_each_slot(world, [&](SlotView& v, Scratch& s) { velocity_movement_phase(v, config, s); });
}

void step_in_place(World& world, const RuleConfig& config) {
  for_each_slot(world, [&](SlotView& v, Scratch& s) {
    if (config.reactions_enabled) {
      cloner_phase(v, s);
      fire_phase(v, config, s);
      ice_water_phase(v, config, s);
      plant_phase(v, config, s);
      lava_phase(v, config, s);
      acid_phase(v, config, s);
    }
    // Gravity, piling and flow share one moved mask: a cell takes part in at
    // most one swap per tick across the three.
    clear_moved(s);
    gravity_phase(v, s);
    piling_phase(v, s);
    flow_phase(v, s);
    if (config.velocity_enabled) {
      evolve_velocity_phase(v, config, s);
      velocity_movement_phase(v, config, s);
    }
  });
  world.set_tick(world.tick() + 1);
}

World step(const World& world, const RuleConfig& config) {
  World next = world;
  step_in_place(next, config);
  return next;
}

void add_wind(World& world, int slot, int x, int y, float vx, float vy) {
  SlotView v = world.slot(slot);
  if (!v.in_bounds(x, y)) {
    throw DomainError("add_wind: centre (" + std::to_string(x) + "," + std::to_string(y) +
                      ") out of range");
  }
  for (int wy = y - 5; wy < y + 5; ++wy) {
    for (int wx = x - 5; wx < x + 5; ++wx) {
      if (!v.in_bounds(wx, wy)) continue;
      const int i = v.index(wx, wy);
      v.vx[i] += vx;
      v.vy[i] += vy;
    }
  }
}

}  // namespace powder
