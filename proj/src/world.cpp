#include "powder/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "powder/errors.hpp"
#include "powder/rng.hpp"

namespace powder {

World::World(int batch, int height, int width) : batch_(batch), height_(height), width_(width) {
  if (batch < 1 || height < 1 || width < 1) {
    throw DomainError("world dimensions must be >= 1, got " + std::to_string(batch) + "x" +
                      std::to_string(height) + "x" + std::to_string(width));
  }
  const std::size_t n = static_cast<std::size_t>(batch) * cells_per_slot();
  keys_.assign(static_cast<std::size_t>(batch), 0);
  elem_.assign(n, ElementId::Empty);
  flow_.assign(n, 0);
  clone_.assign(n, kCloneUnset);
  vx_.assign(n, 0.0f);
  vy_.assign(n, 0.0f);
}

std::size_t World::offset(int s, int x, int y) const {
  if (s < 0 || s >= batch_ || x < 0 || x >= width_ || y < 0 || y >= height_) {
    throw DomainError("cell (" + std::to_string(s) + "," + std::to_string(x) + "," +
                      std::to_string(y) + ") out of range");
  }
  return static_cast<std::size_t>(s) * cells_per_slot() +
         static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
         static_cast<std::size_t>(x);
}

SlotView World::slot(int s) {
  if (s < 0 || s >= batch_) throw DomainError("slot out of range: " + std::to_string(s));
  const std::size_t n = cells_per_slot();
  const std::size_t base = static_cast<std::size_t>(s) * n;
  return SlotView{height_,
                  width_,
                  std::span(elem_).subspan(base, n),
                  std::span(flow_).subspan(base, n),
                  std::span(clone_).subspan(base, n),
                  std::span(vx_).subspan(base, n),
                  std::span(vy_).subspan(base, n),
                  keys_[static_cast<std::size_t>(s)],
                  tick_};
}

ConstSlotView World::slot(int s) const {
  if (s < 0 || s >= batch_) throw DomainError("slot out of range: " + std::to_string(s));
  const std::size_t n = cells_per_slot();
  const std::size_t base = static_cast<std::size_t>(s) * n;
  return ConstSlotView{height_,
                       width_,
                       std::span(elem_).subspan(base, n),
                       std::span(flow_).subspan(base, n),
                       std::span(clone_).subspan(base, n),
                       std::span(vx_).subspan(base, n),
                       std::span(vy_).subspan(base, n),
                       keys_[static_cast<std::size_t>(s)],
                       tick_};
}

ElementId World::element(int s, int x, int y) const { return elem_[offset(s, x, y)]; }
std::int8_t World::flow_memory(int s, int x, int y) const { return flow_[offset(s, x, y)]; }
std::int8_t World::clone_memory(int s, int x, int y) const { return clone_[offset(s, x, y)]; }
float World::velocity_x(int s, int x, int y) const { return vx_[offset(s, x, y)]; }
float World::velocity_y(int s, int x, int y) const { return vy_[offset(s, x, y)]; }

void World::set_velocity(int s, int x, int y, float vx, float vy) {
  const std::size_t i = offset(s, x, y);
  vx_[i] = vx;
  vy_[i] = vy;
}

void World::set_flow_memory(int s, int x, int y, std::int8_t dir) {
  const std::size_t i = offset(s, x, y);
  if (dir < -1 || dir > 1) throw DomainError("flow memory must be -1, 0 or +1");
  if (dir != 0 && !props_of(elem_[i]).is_fluid) {
    throw DomainError("flow memory is only meaningful on fluids");
  }
  flow_[i] = dir;
}

void World::set_clone_memory(int s, int x, int y, std::int8_t id) {
  const std::size_t i = offset(s, x, y);
  if (elem_[i] != ElementId::Cloner) throw DomainError("clone memory requires a cloner cell");
  if (id != kCloneUnset && !is_valid_element(id)) throw DomainError("invalid cloned element");
  clone_[i] = id;
}

float World::channel(int s, int x, int y, int c) const {
  const std::size_t i = offset(s, x, y);
  const ElementId e = elem_[i];
  if (c >= channel::kOneHotBegin && c < kElementCount) return to_index(e) == c ? 1.0f : 0.0f;
  switch (c) {
    case channel::kGravity:
      return props_of(e).is_gravity ? 1.0f : 0.0f;
    case channel::kDensity:
      return static_cast<float>(props_of(e).density);
    case channel::kFlow:
      return static_cast<float>(flow_[i]);
    case channel::kClone:
      return static_cast<float>(clone_[i]);
    case channel::kVelocityX:
      return vx_[i];
    case channel::kVelocityY:
      return vy_[i];
    default:
      throw DomainError("channel out of range: " + std::to_string(c));
  }
}

World World::extract_slot(int s) const {
  World out(1, height_, width_);
  const std::size_t n = cells_per_slot();
  if (s < 0 || s >= batch_) throw DomainError("slot out of range: " + std::to_string(s));
  const auto base = static_cast<std::ptrdiff_t>(static_cast<std::size_t>(s) * n);
  const auto end = base + static_cast<std::ptrdiff_t>(n);
  std::copy(elem_.begin() + base, elem_.begin() + end, out.elem_.begin());
  std::copy(flow_.begin() + base, flow_.begin() + end, out.flow_.begin());
  std::copy(clone_.begin() + base, clone_.begin() + end, out.clone_.begin());
  std::copy(vx_.begin() + base, vx_.begin() + end, out.vx_.begin());
  std::copy(vy_.begin() + base, vy_.begin() + end, out.vy_.begin());
  out.keys_[0] = keys_[static_cast<std::size_t>(s)];
  out.tick_ = tick_;
  return out;
}

void World::insert_slot(int s, const World& single) {
  if (single.batch_ != 1 || single.height_ != height_ || single.width_ != width_) {
    throw DomainError("insert_slot needs a one-slot world of matching size");
  }
  SlotView dst = slot(s);
  ConstSlotView src = single.slot(0);
  std::copy(src.elem.begin(), src.elem.end(), dst.elem.begin());
  std::copy(src.flow.begin(), src.flow.end(), dst.flow.begin());
  std::copy(src.clone.begin(), src.clone.end(), dst.clone.begin());
  std::copy(src.vx.begin(), src.vx.end(), dst.vx.begin());
  std::copy(src.vy.begin(), src.vy.end(), dst.vy.begin());
  keys_[static_cast<std::size_t>(s)] = single.keys_[0];
}

World make_world(int batch, int height, int width, ElementId fill, std::uint64_t seed) {
  element_props(fill);
  World w(batch, height, width);
  for (int s = 0; s < batch; ++s) {
    w.set_stream_key(s, slot_stream_key(seed, static_cast<std::uint64_t>(s)));
    SlotView v = w.slot(s);
    for (std::size_t i = 0; i < v.elem.size(); ++i) v.assign(static_cast<int>(i), fill);
  }
  return w;
}

World stack_worlds(std::span<const World> parts) {
  if (parts.empty()) throw DomainError("stack_worlds needs at least one world");
  int total = 0;
  for (const World& p : parts) {
    if (p.height() != parts[0].height() || p.width() != parts[0].width()) {
      throw DomainError("stack_worlds: mismatched world sizes");
    }
    total += p.batch();
  }
  World out(total, parts[0].height(), parts[0].width());
  out.set_tick(parts[0].tick());
  int s = 0;
  for (const World& p : parts) {
    for (int k = 0; k < p.batch(); ++k) out.insert_slot(s++, p.extract_slot(k));
  }
  return out;
}

void set_element(World& world, int slot, int x, int y, ElementId id) {
  element_props(id);
  SlotView v = world.slot(slot);
  if (!v.in_bounds(x, y)) {
    throw DomainError("set_element: (" + std::to_string(x) + "," + std::to_string(y) +
                      ") out of range");
  }
  v.assign(v.index(x, y), id);
}

namespace {

class Fnv1a {
 public:
  void add_u64(std::uint64_t v) noexcept {
    for (int b = 0; b < 8; ++b) {
      hash_ ^= (v >> (8 * b)) & 0xFFu;
      hash_ *= 0x100000001B3ull;
    }
  }
  std::uint64_t value() const noexcept { return hash_; }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ull;
};

std::int64_t quantize(float v) { return std::llround(static_cast<double>(v) * 1e6); }

}  // namespace

std::uint64_t world_digest(const World& world, int slot) {
  const ConstSlotView v = world.slot(slot);
  Fnv1a h;
  h.add_u64(static_cast<std::uint64_t>(v.height));
  h.add_u64(static_cast<std::uint64_t>(v.width));
  for (std::size_t i = 0; i < v.elem.size(); ++i) {
    const ElementId e = v.elem[i];
    const ElementProps& p = props_of(e);
    for (int c = 0; c < kElementCount; ++c) {
      h.add_u64(to_index(e) == c ? 1000000u : 0u);
    }
    h.add_u64(p.is_gravity ? 1000000u : 0u);
    h.add_u64(static_cast<std::uint64_t>(p.density) * 1000000u);
    h.add_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(v.flow[i]) * 1000000));
    h.add_u64(static_cast<std::uint64_t>(static_cast<std::int64_t>(v.clone[i]) * 1000000));
    h.add_u64(static_cast<std::uint64_t>(quantize(v.vx[i])));
    h.add_u64(static_cast<std::uint64_t>(quantize(v.vy[i])));
  }
  return h.value();
}

std::array<std::int64_t, kElementCount> element_histogram(const World& world, int slot) {
  std::array<std::int64_t, kElementCount> counts{};
  for (ElementId e : world.slot(slot).elem) ++counts[static_cast<std::size_t>(to_index(e))];
  return counts;
}

bool world_is_consistent(const World& world) {
  for (int s = 0; s < world.batch(); ++s) {
    const ConstSlotView v = world.slot(s);
    for (std::size_t i = 0; i < v.elem.size(); ++i) {
      const ElementId e = v.elem[i];
      if (!is_valid_element(to_index(e))) return false;
      if (v.flow[i] < -1 || v.flow[i] > 1) return false;
      if (v.flow[i] != 0 && !props_of(e).is_fluid) return false;
      if (e == ElementId::Cloner) {
        if (v.clone[i] != kCloneUnset && !is_valid_element(v.clone[i])) return false;
      } else if (v.clone[i] != kCloneUnset) {
        return false;
      }
      if (!std::isfinite(v.vx[i]) || !std::isfinite(v.vy[i])) return false;
    }
  }
  return true;
}

}  // namespace powder
