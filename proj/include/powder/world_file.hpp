#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "powder/world.hpp"

namespace powder {

// Binary world container, little-endian throughout:
//   "PWLD" | u16 version=1 | u16 flags | u32 B | u32 H | u32 W | u32 N=20 | payload [| trailer]
// Full payload: f32 per channel, slot-major, row-major, channel-last.
// RLE payload (flag bit 0): per slot, (u16 count, u8 element) runs covering H*W.
// Trailer (flag bit 1): u64 tick, then B u64 stream keys.
inline constexpr std::uint16_t kWorldFileVersion = 1;
inline constexpr std::uint16_t kFlagRle = 1u << 0;
inline constexpr std::uint16_t kFlagStreams = 1u << 1;

enum class WorldEncoding { Full, Rle };

struct SaveOptions {
  WorldEncoding encoding = WorldEncoding::Full;
  bool include_streams = true;
};

std::vector<std::uint8_t> save_world(const World& world, const SaveOptions& options = {});

// Throws ParseError (with the byte offset) on bad magic, unsupported version or
// flags, truncation, trailing bytes, or channel data that violates the cell
// invariants. Nothing is returned on failure.
World load_world(std::span<const std::uint8_t> bytes);

// Full-mode payload of one slot: H*W*20 little-endian f32.
std::vector<std::uint8_t> slot_channels(const World& world, int slot);

// Element runs of one slot, shared with the sandbox frame encoder.
struct ElementRun {
  std::uint16_t count;
  ElementId element;
  friend bool operator==(const ElementRun&, const ElementRun&) = default;
};
std::vector<ElementRun> encode_runs(std::span<const ElementId> cells);

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

}  // namespace powder
