#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "powder/base64.hpp"
#include "powder/config.hpp"
#include "powder/errors.hpp"
#include "powder/procgen.hpp"
#include "powder/world_file.hpp"

using namespace powder;

namespace {

using Bytes = std::vector<std::uint8_t>;

Bytes fixture(const char* name) { return read_file(std::filesystem::path(POWDER_FIXTURE_DIR) / name); }

// The world described in fixtures/make_fixtures.py.
World fixture_world() {
  using E = ElementId;
  const E slots[2][3][4] = {
      {{E::Empty, E::Wall, E::Sand, E::Water}, {E::Cloner, E::Lava, E::Acid, E::Fire}, {E::Ice, E::Plant, E::Dust, E::Stone}},
      {{E::Gas, E::Wood, E::Empty, E::Empty}, {E::Water, E::Cloner, E::Sand, E::Sand}, {E::Wall, E::Wall, E::Wall, E::Wall}},
  };
  World w(2, 3, 4);
  for (int s = 0; s < 2; ++s) {
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 4; ++x) set_element(w, s, x, y, slots[s][y][x]);
    }
  }
  w.set_flow_memory(0, 3, 0, 1);
  w.set_flow_memory(0, 1, 1, -1);
  w.set_clone_memory(0, 0, 1, 3);
  w.set_velocity(0, 2, 0, 1.5f, -0.25f);
  w.set_velocity(0, 1, 2, -3.0f, 0.125f);
  w.set_velocity(1, 0, 0, 0.5f, 2.0f);
  w.set_tick(7);
  w.set_stream_key(0, 0x0123456789ABCDEFull);
  w.set_stream_key(1, 0xFEDCBA9876543210ull);
  return w;
}

World elements_only(const World& w) {
  World out(w.batch(), w.height(), w.width());
  for (int s = 0; s < w.batch(); ++s) {
    for (int y = 0; y < w.height(); ++y) {
      for (int x = 0; x < w.width(); ++x) set_element(out, s, x, y, w.element(s, x, y));
    }
    out.set_stream_key(s, w.stream_key(s));
  }
  out.set_tick(w.tick());
  return out;
}

std::size_t parse_offset(const Bytes& b) {
  try {
    load_world(b);
  } catch (const ParseError& e) {
    return e.offset();
  }
  FAIL("expected ParseError");
  return 0;
}

}  // namespace

TEST_CASE("golden full-mode fixture") {
  const World expect = fixture_world();
  const Bytes bytes = fixture("world_full.pwld");
  const World got = load_world(bytes);
  CHECK(got == expect);
  for (int s = 0; s < 2; ++s) CHECK(world_digest(got, s) == world_digest(expect, s));
  CHECK(save_world(expect) == bytes);
}

TEST_CASE("golden RLE fixture") {
  const World expect = elements_only(fixture_world());
  const Bytes bytes = fixture("world_rle.pwld");
  const World got = load_world(bytes);
  CHECK(got == expect);
  for (int s = 0; s < 2; ++s) CHECK(world_digest(got, s) == world_digest(expect, s));
  SaveOptions rle;
  rle.encoding = WorldEncoding::Rle;
  CHECK(save_world(fixture_world(), rle) == bytes);
}

TEST_CASE("an empty 64x64 world is a single run") {
  const World empty = make_world(1, 64, 64, ElementId::Empty, 0);
  SaveOptions opt;
  opt.encoding = WorldEncoding::Rle;
  opt.include_streams = false;
  const Bytes bytes = save_world(empty, opt);
  CHECK(bytes == fixture("empty64_rle.pwld"));
  REQUIRE(bytes.size() == 24 + 3);
  CHECK(bytes[24] == 0x00);
  CHECK(bytes[25] == 0x10);
  CHECK(bytes[26] == 0x00);
  CHECK(encode_runs(empty.slot(0).elem) == std::vector<ElementRun>{{4096, ElementId::Empty}});
  const World back = load_world(bytes);
  CHECK(world_digest(back, 0) == world_digest(empty, 0));
  CHECK(back.stream_key(0) == slot_stream_key(0, 0));
}

TEST_CASE("round trips in both modes") {
  PcgParams p;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    p.seed = seed;
    World w = stack_worlds(std::vector<World>{gen_start_state(p), gen_start_state(p)});
    for (int t = 0; t < 10; ++t) step_in_place(w, RuleConfig{});
    CHECK(load_world(save_world(w)) == w);
    SaveOptions rle;
    rle.encoding = WorldEncoding::Rle;
    const World r = load_world(save_world(w, rle));
    for (int s = 0; s < 2; ++s) {
      CHECK(element_histogram(r, s) == element_histogram(w, s));
      CHECK(r.slot(s).stream_key == w.slot(s).stream_key);
    }
    CHECK(r.tick() == w.tick());
  }
}

TEST_CASE("runs longer than a u16 are split") {
  const World w = make_world(1, 300, 300, ElementId::Sand, 0);
  const auto runs = encode_runs(w.slot(0).elem);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0].count == 65535);
  CHECK(runs[1].count == 90000 - 65535);
  SaveOptions rle;
  rle.encoding = WorldEncoding::Rle;
  CHECK(element_histogram(load_world(save_world(w, rle)), 0) == element_histogram(w, 0));
}

TEST_CASE("typed errors for bad files") {
  CHECK_THROWS_AS(load_world(fixture("truncated.pwld")), ParseError);
  CHECK(parse_offset(fixture("bad_magic.pwld")) == 0);

  const Bytes good = fixture("world_full.pwld");
  for (std::size_t n = 0; n < good.size(); n += 7) {
    const Bytes cut(good.begin(), good.begin() + static_cast<std::ptrdiff_t>(n));
    CHECK_THROWS_AS(load_world(cut), ParseError);
  }

  Bytes version = good;
  version[4] = 2;
  CHECK(parse_offset(version) == 4);

  Bytes flags = good;
  flags[6] |= 0x80;
  CHECK(parse_offset(flags) == 6);

  Bytes channels = good;
  channels[20] = 19;
  CHECK(parse_offset(channels) == 20);

  Bytes extra = good;
  extra.push_back(0);
  CHECK(parse_offset(extra) == good.size());

  // Cell 0 of slot 0 claims to be wall and empty at once.
  Bytes onehot = good;
  const float one = 1.0f;
  std::memcpy(&onehot[24 + 4], &one, 4);
  CHECK(parse_offset(onehot) == 24 + 4);

  Bytes density = good;
  const float wrong = 2.0f;
  std::memcpy(&density[24 + 15 * 4], &wrong, 4);
  CHECK(parse_offset(density) == 24 + 15 * 4);

  Bytes rle = fixture("world_rle.pwld");
  rle[24 + 2] = 14;
  CHECK(parse_offset(rle) == 24 + 2);
}

TEST_CASE("config text round trip") {
  SimConfig c;
  c.pcg.max_lines = 2;
  c.pcg.palette = {ElementId::Sand, ElementId::Water};
  c.pcg.seed = 0xFFFFFFFFFFFFFFFFull;
  c.rules.freeze_chance = 0.1;
  c.rules.velocity_decay = 0.9f;
  c.rules.reactions_enabled = false;
  const std::string text = format_config(c);
  CHECK(parse_config(text) == c);
  CHECK(format_config(parse_config(text)) == text);
  CHECK(format_config(SimConfig{}) == format_config(parse_config("")));

  const SimConfig parsed = parse_config("# comment\n\n  pcg.palette = sand  \nrules.freeze_chance = 0 # off\n");
  CHECK(parsed.pcg.palette == std::vector<ElementId>{ElementId::Sand});
  CHECK(parsed.rules.freeze_chance == 0.0);
  CHECK(parsed.pcg.max_lines == PcgParams{}.max_lines);

  SimConfig base;
  base.pcg.max_circles = 1;
  CHECK(parse_config("pcg.max_lines = 0\n", base).pcg.max_circles == 1);

  try {
    parse_config("pcg.max_lines = 1\npcg.bogus = 3\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.offset() == 2);
  }
  CHECK_THROWS_AS(parse_config("pcg.max_lines 3\n"), ParseError);
  CHECK_THROWS_AS(parse_config("pcg.max_lines = three\n"), ParseError);
  CHECK_THROWS_AS(parse_config("pcg.palette = sand, mud\n"), ParseError);
  CHECK_THROWS_AS(parse_config("rules.freeze_chance = 3\n"), ParseError);

  SimConfig s;
  set_config_value(s, "rules.ice_melt_chance", "0.5");
  CHECK(s.rules.ice_melt_chance == 0.5);
  CHECK_THROWS_AS(set_config_value(s, "rules.nope", "1"), DomainError);
  CHECK(config_keys().size() >= 20);
}

TEST_CASE("palettes") {
  CHECK(parse_palette("sand,water , ice") == std::vector<ElementId>{ElementId::Sand, ElementId::Water, ElementId::Ice});
  CHECK(format_palette({ElementId::Sand, ElementId::Lava}) == "sand, lava");
  CHECK(parse_palette(format_palette(PcgParams::default_palette())) == PcgParams::default_palette());
  CHECK_THROWS_AS(parse_palette("sand, sand2"), DomainError);
  CHECK_THROWS_AS(parse_palette(""), DomainError);
}

TEST_CASE("base64 test vectors") {
  const auto enc = [](const std::string& s) {
    return base64_encode(std::vector<std::uint8_t>(s.begin(), s.end()));
  };
  CHECK(enc("") == "");
  CHECK(enc("f") == "Zg==");
  CHECK(enc("fo") == "Zm8=");
  CHECK(enc("foo") == "Zm9v");
  CHECK(enc("foob") == "Zm9vYg==");
  CHECK(enc("fooba") == "Zm9vYmE=");
  CHECK(enc("foobar") == "Zm9vYmFy");
  const Bytes raw{0, 255, 1, 254, 128, 127, 64};
  CHECK(base64_decode(base64_encode(raw)) == raw);
  CHECK_THROWS_AS(base64_decode("Zm9"), ParseError);
  CHECK_THROWS_AS(base64_decode("Zm9v!A=="), ParseError);
}
