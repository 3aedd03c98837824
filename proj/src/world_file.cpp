#include "powder/world_file.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "bytes.hpp"
#include "powder/errors.hpp"
#include "powder/rng.hpp"

namespace powder {

namespace {

constexpr std::uint8_t kMagic[4] = {'P', 'W', 'L', 'D'};
constexpr std::uint64_t kMaxCells = std::uint64_t{1} << 26;

void write_cell(detail::ByteWriter& out, const ConstSlotView& v, std::size_t i) {
  const ElementId e = v.elem[i];
  const ElementProps& p = props_of(e);
  for (int c = 0; c < kElementCount; ++c) out.f32(to_index(e) == c ? 1.0f : 0.0f);
  out.f32(p.is_gravity ? 1.0f : 0.0f);
  out.f32(static_cast<float>(p.density));
  out.f32(static_cast<float>(v.flow[i]));
  out.f32(static_cast<float>(v.clone[i]));
  out.f32(v.vx[i]);
  out.f32(v.vy[i]);
}

bool is_integral(float f, int lo, int hi) {
  return std::isfinite(f) && f == std::floor(f) && f >= static_cast<float>(lo) &&
         f <= static_cast<float>(hi);
}

void read_cell(detail::ByteReader& in, SlotView& v, std::size_t i) {
  const std::size_t base = in.offset();
  float ch[channel::kCount];
  for (float& f : ch) f = in.f32();
  const auto fail = [&](int c, const std::string& what) {
    throw ParseError(base + static_cast<std::size_t>(c) * 4, what);
  };
  int hot = -1;
  for (int c = 0; c < kElementCount; ++c) {
    if (ch[c] == 1.0f) {
      if (hot >= 0) fail(c, "one-hot channels have more than one 1");
      hot = c;
    } else if (ch[c] != 0.0f) {
      fail(c, "one-hot channel is neither 0 nor 1");
    }
  }
  if (hot < 0) fail(0, "one-hot channels are all zero");
  const ElementId e = static_cast<ElementId>(hot);
  const ElementProps& p = props_of(e);
  if (ch[channel::kGravity] != (p.is_gravity ? 1.0f : 0.0f)) {
    fail(channel::kGravity, "gravity channel disagrees with element");
  }
  if (ch[channel::kDensity] != static_cast<float>(p.density)) {
    fail(channel::kDensity, "density channel disagrees with element");
  }
  const float flow = ch[channel::kFlow];
  if (!is_integral(flow, -1, 1)) fail(channel::kFlow, "flow memory must be -1, 0 or 1");
  if (flow != 0.0f && !p.is_fluid) fail(channel::kFlow, "flow memory set on a non-fluid");
  const float clone = ch[channel::kClone];
  if (!is_integral(clone, -1, kElementCount - 1)) fail(channel::kClone, "clone memory out of range");
  if (clone != -1.0f && e != ElementId::Cloner) fail(channel::kClone, "clone memory set on a non-cloner");
  if (!std::isfinite(ch[channel::kVelocityX])) fail(channel::kVelocityX, "velocity is not finite");
  if (!std::isfinite(ch[channel::kVelocityY])) fail(channel::kVelocityY, "velocity is not finite");

  v.assign(static_cast<int>(i), e);
  v.flow[i] = static_cast<std::int8_t>(flow);
  v.clone[i] = static_cast<std::int8_t>(clone);
  v.vx[i] = ch[channel::kVelocityX];
  v.vy[i] = ch[channel::kVelocityY];
}

void read_runs(detail::ByteReader& in, SlotView& v) {
  const std::size_t n = v.elem.size();
  std::size_t filled = 0;
  while (filled < n) {
    const std::size_t at = in.offset();
    const std::uint16_t count = in.u16();
    const std::uint8_t id = in.u8();
    if (count == 0) throw ParseError(at, "zero-length run");
    if (!is_valid_element(id)) throw ParseError(at + 2, "invalid element id " + std::to_string(id));
    if (filled + count > n) throw ParseError(at, "run overflows the slot");
    for (std::size_t k = 0; k < count; ++k) v.assign(static_cast<int>(filled + k), static_cast<ElementId>(id));
    filled += count;
  }
}

}  // namespace

std::vector<ElementRun> encode_runs(std::span<const ElementId> cells) {
  std::vector<ElementRun> runs;
  for (ElementId e : cells) {
    if (!runs.empty() && runs.back().element == e && runs.back().count < 0xFFFF) {
      ++runs.back().count;
    } else {
      runs.push_back({1, e});
    }
  }
  return runs;
}

std::vector<std::uint8_t> slot_channels(const World& world, int slot) {
  detail::ByteWriter out;
  const ConstSlotView v = world.slot(slot);
  out.data().reserve(v.elem.size() * channel::kCount * 4);
  for (std::size_t i = 0; i < v.elem.size(); ++i) write_cell(out, v, i);
  return out.take();
}

std::vector<std::uint8_t> save_world(const World& world, const SaveOptions& options) {
  detail::ByteWriter out;
  for (std::uint8_t b : kMagic) out.u8(b);
  out.u16(kWorldFileVersion);
  std::uint16_t flags = 0;
  if (options.encoding == WorldEncoding::Rle) flags |= kFlagRle;
  if (options.include_streams) flags |= kFlagStreams;
  out.u16(flags);
  out.u32(static_cast<std::uint32_t>(world.batch()));
  out.u32(static_cast<std::uint32_t>(world.height()));
  out.u32(static_cast<std::uint32_t>(world.width()));
  out.u32(channel::kCount);
  for (int s = 0; s < world.batch(); ++s) {
    const ConstSlotView v = world.slot(s);
    if (options.encoding == WorldEncoding::Rle) {
      for (const ElementRun& r : encode_runs(v.elem)) {
        out.u16(r.count);
        out.u8(static_cast<std::uint8_t>(to_index(r.element)));
      }
    } else {
      for (std::size_t i = 0; i < v.elem.size(); ++i) write_cell(out, v, i);
    }
  }
  if (options.include_streams) {
    out.u64(world.tick());
    for (int s = 0; s < world.batch(); ++s) out.u64(world.stream_key(s));
  }
  return out.take();
}

World load_world(std::span<const std::uint8_t> bytes) {
  detail::ByteReader in(bytes);
  for (std::uint8_t b : kMagic) {
    if (in.u8() != b) throw ParseError(0, "bad magic, expected PWLD");
  }
  const std::size_t version_at = in.offset();
  const std::uint16_t version = in.u16();
  if (version != kWorldFileVersion) {
    throw ParseError(version_at, "unsupported version " + std::to_string(version));
  }
  const std::size_t flags_at = in.offset();
  const std::uint16_t flags = in.u16();
  if ((flags & ~(kFlagRle | kFlagStreams)) != 0) {
    throw ParseError(flags_at, "unknown flag bits " + std::to_string(flags));
  }
  const std::size_t dims_at = in.offset();
  const std::uint32_t b = in.u32();
  const std::uint32_t h = in.u32();
  const std::uint32_t w = in.u32();
  const std::size_t n_at = in.offset();
  const std::uint32_t n = in.u32();
  if (b == 0 || h == 0 || w == 0) throw ParseError(dims_at, "zero dimension");
  const std::uint64_t cells = std::uint64_t{b} * h * w;
  if (h > 0xFFFF || w > 0xFFFF || cells > kMaxCells) throw ParseError(dims_at, "world too large");
  if (n != channel::kCount) throw ParseError(n_at, "channel count must be 20, got " + std::to_string(n));

  const bool rle = (flags & kFlagRle) != 0;
  if (!rle) in.need(cells * channel::kCount * 4, "channel payload");
  World world(static_cast<int>(b), static_cast<int>(h), static_cast<int>(w));
  for (int s = 0; s < world.batch(); ++s) {
    world.set_stream_key(s, slot_stream_key(0, static_cast<std::uint64_t>(s)));
    SlotView v = world.slot(s);
    if (rle) {
      read_runs(in, v);
    } else {
      for (std::size_t i = 0; i < v.elem.size(); ++i) read_cell(in, v, i);
    }
  }
  if ((flags & kFlagStreams) != 0) {
    world.set_tick(in.u64());
    for (int s = 0; s < world.batch(); ++s) world.set_stream_key(s, in.u64());
  }
  if (in.remaining() != 0) throw ParseError(in.offset(), "trailing bytes after payload");
  return world;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace powder
