#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "powder/element.hpp"

namespace powder {

// Channel layout of the dense per-cell vector.
namespace channel {
inline constexpr int kOneHotBegin = 0;  // 0..13
inline constexpr int kGravity = 14;
inline constexpr int kDensity = 15;
inline constexpr int kFlow = 16;
inline constexpr int kClone = 17;
inline constexpr int kVelocityX = 18;
inline constexpr int kVelocityY = 19;
inline constexpr int kCount = 20;
}  // namespace channel

inline constexpr std::int8_t kCloneUnset = -1;

// Mutable view of one slot's planes. All spans have H*W entries, row-major.
struct SlotView {
  int height;
  int width;
  std::span<ElementId> elem;
  std::span<std::int8_t> flow;
  std::span<std::int8_t> clone;
  std::span<float> vx;
  std::span<float> vy;
  std::uint64_t stream_key;
  std::uint64_t tick;

  int index(int x, int y) const noexcept { return y * width + x; }
  bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  // Rewrites a cell as `id` with default memories; velocity untouched.
  void assign(int i, ElementId id) noexcept {
    elem[i] = id;
    flow[i] = 0;
    clone[i] = kCloneUnset;
  }
  // Exchanges element and memories; the velocity field stays in place.
  void swap_cells(int a, int b) noexcept {
    std::swap(elem[a], elem[b]);
    std::swap(flow[a], flow[b]);
    std::swap(clone[a], clone[b]);
  }
};

struct ConstSlotView {
  int height;
  int width;
  std::span<const ElementId> elem;
  std::span<const std::int8_t> flow;
  std::span<const std::int8_t> clone;
  std::span<const float> vx;
  std::span<const float> vy;
  std::uint64_t stream_key;
  std::uint64_t tick;

  int index(int x, int y) const noexcept { return y * width + x; }
  bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
  ElementId at(int x, int y) const noexcept { return elem[static_cast<std::size_t>(index(x, y))]; }
};

// Batched B x H x W grid. Cells are stored as planes; the 20-channel vector
// is materialised on demand by channel(). Gravity and density channels are
// derived from the element and never stored, so they cannot drift.
class World {
 public:
  World(int batch, int height, int width);

  int batch() const noexcept { return batch_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  std::size_t cells_per_slot() const noexcept {
    return static_cast<std::size_t>(height_) * static_cast<std::size_t>(width_);
  }

  std::uint64_t tick() const noexcept { return tick_; }
  void set_tick(std::uint64_t t) noexcept { tick_ = t; }
  std::uint64_t stream_key(int slot) const { return keys_.at(static_cast<std::size_t>(slot)); }
  void set_stream_key(int slot, std::uint64_t key) { keys_.at(static_cast<std::size_t>(slot)) = key; }

  SlotView slot(int s);
  ConstSlotView slot(int s) const;

  ElementId element(int s, int x, int y) const;
  std::int8_t flow_memory(int s, int x, int y) const;
  std::int8_t clone_memory(int s, int x, int y) const;
  float velocity_x(int s, int x, int y) const;
  float velocity_y(int s, int x, int y) const;
  void set_velocity(int s, int x, int y, float vx, float vy);
  void set_flow_memory(int s, int x, int y, std::int8_t dir);
  void set_clone_memory(int s, int x, int y, std::int8_t id);

  // Value of channel c in [0,20) of cell (x,y) in slot s.
  float channel(int s, int x, int y, int c) const;

  // One-slot copy of slot s, carrying its stream key and the tick.
  World extract_slot(int s) const;
  void insert_slot(int s, const World& single);

  friend bool operator==(const World&, const World&) = default;

 private:
  std::size_t offset(int s, int x, int y) const;

  int batch_;
  int height_;
  int width_;
  std::uint64_t tick_ = 0;
  std::vector<std::uint64_t> keys_;
  std::vector<ElementId> elem_;
  std::vector<std::int8_t> flow_;
  std::vector<std::int8_t> clone_;
  std::vector<float> vx_;
  std::vector<float> vy_;
};

// Uniformly filled world, zero velocity, per-slot streams derived from seed.
World make_world(int batch, int height, int width, ElementId fill, std::uint64_t seed);

// Joins one-slot (or multi-slot) worlds of equal size into a batch.
World stack_worlds(std::span<const World> parts);

void set_element(World& world, int slot, int x, int y, ElementId id);

// Order-stable FNV-1a digest over H, W and all 20 channels of every cell,
// velocity quantised to 1e-6. Independent of stream key and tick.
std::uint64_t world_digest(const World& world, int slot);

// Per-element cell counts for one slot.
std::array<std::int64_t, kElementCount> element_histogram(const World& world, int slot);

// Checks the stored-state invariants (flow memory only on fluids and in
// {-1,0,1}; clone memory only on cloners and a valid id or unset).
bool world_is_consistent(const World& world);

}  // namespace powder
