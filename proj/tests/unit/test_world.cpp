#include <cmath>
#include <set>
#include <tuple>

#include "doctest.h"
#include "powder/errors.hpp"
#include "powder/procgen.hpp"
#include "powder/rng.hpp"
#include "powder/world.hpp"

using namespace powder;

namespace {

// Reference digest built only from the public channel() accessor.
std::uint64_t reference_digest(const World& w, int slot) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  const auto add = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFFu;
      h *= 0x100000001B3ull;
    }
  };
  add(static_cast<std::uint64_t>(w.height()));
  add(static_cast<std::uint64_t>(w.width()));
  for (int y = 0; y < w.height(); ++y) {
    for (int x = 0; x < w.width(); ++x) {
      for (int c = 0; c < channel::kCount; ++c) {
        add(static_cast<std::uint64_t>(std::llround(static_cast<double>(w.channel(slot, x, y, c)) * 1e6)));
      }
    }
  }
  return h;
}

void check_channels(const World& w) {
  for (int s = 0; s < w.batch(); ++s) {
    for (int y = 0; y < w.height(); ++y) {
      for (int x = 0; x < w.width(); ++x) {
        const ElementId e = w.element(s, x, y);
        float ones = 0;
        for (int c = 0; c < kElementCount; ++c) ones += w.channel(s, x, y, c);
        REQUIRE(ones == 1.0f);
        REQUIRE(w.channel(s, x, y, to_index(e)) == 1.0f);
        REQUIRE(w.channel(s, x, y, channel::kGravity) == (props_of(e).is_gravity ? 1.0f : 0.0f));
        REQUIRE(w.channel(s, x, y, channel::kDensity) == static_cast<float>(props_of(e).density));
      }
    }
  }
}

}  // namespace

TEST_CASE("element table") {
  const ElementProps& wall = element_props(ElementId::Wall);
  CHECK(wall.is_static_solid);
  CHECK_FALSE(wall.is_gravity);
  CHECK(element_props(ElementId::Gas).is_gravity);
  CHECK(element_props(ElementId::Gas).density == 0);
  CHECK(element_props(ElementId::Empty).density == 1);
  CHECK(element_props(ElementId::Water).density == 2);
  CHECK(element_props(ElementId::Sand).density == 3);
  CHECK(element_props(ElementId::Stone).density == 4);

  int fluids = 0, burnable = 0, solid = 0;
  for (int i = 0; i < kElementCount; ++i) {
    const ElementId id = element_from_index(i);
    const ElementProps& p = element_props(id);
    CHECK(p.density >= 0);
    CHECK(p.density <= 4);
    fluids += p.is_fluid;
    burnable += p.is_burnable;
    solid += p.is_static_solid;
    CHECK(element_from_name(element_name(id)) == id);
  }
  CHECK(fluids == 3);
  CHECK(element_props(ElementId::Water).is_fluid);
  CHECK(element_props(ElementId::Lava).is_fluid);
  CHECK(element_props(ElementId::Acid).is_fluid);
  CHECK(burnable == 3);
  CHECK(element_props(ElementId::Wood).is_burnable);
  CHECK(element_props(ElementId::Plant).is_burnable);
  CHECK(element_props(ElementId::Dust).is_burnable);
  CHECK(solid == 1);

  CHECK_THROWS_AS(element_from_index(14), DomainError);
  CHECK_THROWS_AS(element_from_index(-1), DomainError);
  CHECK_THROWS_AS(element_props(static_cast<ElementId>(200)), DomainError);
  CHECK_FALSE(element_from_name("unobtainium").has_value());
}

TEST_CASE("make_world fills uniformly") {
  const World w = make_world(1, 2, 2, ElementId::Sand, 0);
  for (int y = 0; y < 2; ++y) {
    for (int x = 0; x < 2; ++x) {
      CHECK(w.element(0, x, y) == ElementId::Sand);
      CHECK(w.channel(0, x, y, 2) == 1.0f);
      CHECK(w.channel(0, x, y, channel::kDensity) == 3.0f);
      CHECK(w.channel(0, x, y, channel::kVelocityX) == 0.0f);
      CHECK(w.channel(0, x, y, channel::kClone) == -1.0f);
    }
  }
  check_channels(w);
  CHECK_THROWS_AS(make_world(0, 4, 4, ElementId::Empty, 0), DomainError);
  CHECK_THROWS_AS(make_world(1, 0, 4, ElementId::Empty, 0), DomainError);
  CHECK_THROWS_AS(make_world(1, 4, -1, ElementId::Empty, 0), DomainError);
}

TEST_CASE("slot streams are distinct and derived from the seed") {
  const World a = make_world(8, 4, 4, ElementId::Empty, 42);
  const World b = make_world(8, 4, 4, ElementId::Empty, 42);
  std::set<std::uint64_t> keys;
  for (int s = 0; s < 8; ++s) {
    keys.insert(a.stream_key(s));
    CHECK(a.stream_key(s) == b.stream_key(s));
    CHECK(a.stream_key(s) == slot_stream_key(42, static_cast<std::uint64_t>(s)));
  }
  CHECK(keys.size() == 8);
}

TEST_CASE("set_element re-encodes and keeps velocity") {
  World w = make_world(1, 4, 4, ElementId::Empty, 0);
  w.set_velocity(0, 1, 1, 0.5f, -0.25f);
  set_element(w, 0, 1, 1, ElementId::Water);
  CHECK(w.element(0, 1, 1) == ElementId::Water);
  CHECK(w.flow_memory(0, 1, 1) == 0);
  CHECK(w.velocity_x(0, 1, 1) == 0.5f);
  CHECK(w.velocity_y(0, 1, 1) == -0.25f);

  set_element(w, 0, 2, 2, ElementId::Cloner);
  CHECK(w.clone_memory(0, 2, 2) == kCloneUnset);
  w.set_clone_memory(0, 2, 2, to_index(ElementId::Water));
  set_element(w, 0, 2, 2, ElementId::Cloner);
  CHECK(w.clone_memory(0, 2, 2) == kCloneUnset);

  CHECK_THROWS_AS(set_element(w, 0, 4, 0, ElementId::Sand), DomainError);
  CHECK_THROWS_AS(set_element(w, 1, 0, 0, ElementId::Sand), DomainError);
  CHECK_THROWS_AS(set_element(w, 0, 0, 0, static_cast<ElementId>(99)), DomainError);
  check_channels(w);
  CHECK(world_is_consistent(w));
}

TEST_CASE("digest matches a reference computed from the channels") {
  PcgParams p;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    p.seed = seed;
    World w = gen_start_state(p);
    w.set_velocity(0, 3, 4, 1.25f, -0.5f);
    CHECK(world_digest(w, 0) == reference_digest(w, 0));
  }
}

TEST_CASE("digest ignores tick and stream key but sees every cell") {
  const World base = make_world(1, 16, 16, ElementId::Empty, 1);
  World other = base;
  other.set_tick(99);
  other.set_stream_key(0, 12345);
  CHECK(world_digest(other, 0) == world_digest(base, 0));
  CHECK(world_digest(make_world(1, 16, 16, ElementId::Empty, 7), 0) == world_digest(base, 0));
  CHECK(world_digest(make_world(1, 16, 8, ElementId::Empty, 0), 0) !=
        world_digest(make_world(1, 8, 16, ElementId::Empty, 0), 0));

  PcgParams p;
  p.seed = 11;
  const World start = gen_start_state(p);
  SplitMix64 rng(5);
  std::set<std::uint64_t> digests{world_digest(start, 0)};
  std::set<std::tuple<int, int, int>> edits;
  for (int k = 0; k < 100; ++k) {
    World w = start;
    const int x = static_cast<int>(rng.uniform_int(0, 63));
    const int y = static_cast<int>(rng.uniform_int(0, 63));
    const auto e = static_cast<ElementId>((to_index(w.element(0, x, y)) + 1 + rng.uniform_int(0, 12)) % kElementCount);
    set_element(w, 0, x, y, e);
    REQUIRE(w.element(0, x, y) != start.element(0, x, y));
    CHECK(world_digest(w, 0) != world_digest(start, 0));
    digests.insert(world_digest(w, 0));
    edits.insert({x, y, to_index(e)});
  }
  CHECK(digests.size() == edits.size() + 1);

  World v = start;
  v.set_velocity(0, 0, 0, 1e-3f, 0);
  CHECK(world_digest(v, 0) != world_digest(start, 0));
}

TEST_CASE("extract, insert and stack") {
  PcgParams p;
  std::vector<World> parts;
  for (std::uint64_t s = 0; s < 3; ++s) {
    p.seed = s;
    parts.push_back(gen_start_state(p));
    parts.back().set_stream_key(0, 1000 + s);
  }
  World batch = stack_worlds(parts);
  CHECK(batch.batch() == 3);
  for (int s = 0; s < 3; ++s) {
    CHECK(world_digest(batch, s) == world_digest(parts[static_cast<std::size_t>(s)], 0));
    CHECK(batch.stream_key(s) == 1000u + static_cast<std::uint64_t>(s));
    CHECK(batch.extract_slot(s) == parts[static_cast<std::size_t>(s)]);
  }
  batch.insert_slot(0, parts[2]);
  CHECK(world_digest(batch, 0) == world_digest(parts[2], 0));
  CHECK_THROWS_AS(batch.insert_slot(0, make_world(1, 8, 8, ElementId::Empty, 0)), DomainError);
  CHECK_THROWS_AS(batch.extract_slot(3), DomainError);
  CHECK_THROWS_AS(stack_worlds(std::vector<World>{}), DomainError);
  check_channels(batch);
}

TEST_CASE("consistency checker rejects bad memories") {
  World w = make_world(1, 4, 4, ElementId::Empty, 0);
  CHECK(world_is_consistent(w));
  set_element(w, 0, 0, 0, ElementId::Sand);
  w.slot(0).flow[0] = 1;
  CHECK_FALSE(world_is_consistent(w));
  w.slot(0).flow[0] = 0;
  w.slot(0).clone[0] = 3;
  CHECK_FALSE(world_is_consistent(w));
}
