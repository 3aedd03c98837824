#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "powder/config.hpp"

namespace powder {

inline constexpr std::string_view kEngineVersion = "powder-engine/1";

// Seed of pair `index` in a dataset whose base seed is `base`.
std::uint64_t pair_seed(std::uint64_t base, std::uint64_t index) noexcept;

// Writes `count` world-model pairs plus manifest.json into `dir` (created if
// needed). The base seed is config.pcg.seed. Returns the manifest path.
std::filesystem::path gen_dataset(const SimConfig& config, int count, const std::filesystem::path& dir);

struct VerifyReport {
  int pairs = 0;
  std::vector<std::string> problems;
  bool ok() const noexcept { return problems.empty(); }
};

// Regenerates every pair from the manifest and compares digests against both
// the manifest and the files on disk.
VerifyReport verify_dataset(const std::filesystem::path& dir);

}  // namespace powder
