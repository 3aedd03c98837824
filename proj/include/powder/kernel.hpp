#pragma once

#include <cstdint>

#include "powder/world.hpp"

namespace powder {

// Tunable reaction and velocity parameters. Defaults are the frozen engine
// semantics; tests and the regression suite depend on them.
struct RuleConfig {
  double burn_chance_wood = 0.05;
  double burn_chance_plant = 0.2;
  double burn_chance_dust = 1.0;
  double fire_extinguish_chance = 0.2;
  double ice_melt_chance = 0.02;
  double freeze_chance = 0.05;
  int freeze_neighbor_threshold = 3;
  int plant_grow_threshold = 4;  // water needs strictly more plant neighbours
  double plant_grow_chance = 0.05;
  double plant_to_empty_chance = 0.05;
  double acid_dissolve_chance = 0.2;
  double lava_fire_spawn_chance = 1.0;
  float velocity_threshold = 1.0f;
  float velocity_decay = 0.95f;
  float advection_fraction = 0.5f;
  float diffusion_center = 0.6f;
  float diffusion_neighbor = 0.05f;
  float dust_explosion_impulse = 5.0f;

  // Phase switches. Disabling reactions also disables the cloner, so motion
  // alone conserves every element.
  bool reactions_enabled = true;
  bool velocity_enabled = true;

  // Throws DomainError when a probability or factor is out of range.
  void validate() const;

  double burn_chance(ElementId id) const noexcept;

  friend bool operator==(const RuleConfig&, const RuleConfig&) = default;
};

// Advances every slot by one tick and returns the new world. Phase order:
// cloner, reactions (fire, ice/water, plant, lava, acid), gravity, piling,
// fluid flow, velocity evolution, velocity movement.
World step(const World& world, const RuleConfig& config);
void step_in_place(World& world, const RuleConfig& config);

// Individual phases, exposed for testing. They draw randomness for the
// world's current tick and do not advance it.
void react_cloner(World& world);
void react_fire(World& world, const RuleConfig& config);
void react_ice_water(World& world, const RuleConfig& config);
void react_plant(World& world, const RuleConfig& config);
void react_lava(World& world, const RuleConfig& config = {});
void react_acid(World& world, const RuleConfig& config);
void apply_gravity(World& world);
void apply_sand_piling(World& world);
void apply_fluid_flow(World& world);
void evolve_velocity(World& world, const RuleConfig& config);
void apply_velocity_movement(World& world, const RuleConfig& config);

// Adds (vx, vy) over the 10x10 square with top-left (x-5, y-5), clipped.
void add_wind(World& world, int slot, int x, int y, float vx, float vy);

// Octant of a velocity vector in grid coordinates (y grows downward):
// 0 right, 1 down-right, 2 down, 3 down-left, 4 left, 5 up-left, 6 up,
// 7 up-right. Vectors exactly on a sector boundary take the lower index.
// Returns -1 for the zero vector.
int octant_of(float vx, float vy) noexcept;

struct Offset {
  int dx;
  int dy;
};
inline constexpr Offset kOctantOffsets[8] = {{1, 0},  {1, 1},   {0, 1},  {-1, 1},
                                             {-1, 0}, {-1, -1}, {0, -1}, {1, -1}};

// Random-stream rule ids. Part of the frozen semantics: changing one changes
// every digest.
enum class RuleStream : std::uint32_t {
  Piling = 1,
  Flow = 2,
  Fire = 3,
  IceWater = 4,
  Plant = 5,
  Lava = 6,
  Acid = 7,
};

}  // namespace powder
