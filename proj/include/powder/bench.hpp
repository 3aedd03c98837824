#pragma once

#include <string>
#include <vector>

#include "powder/kernel.hpp"

namespace powder {

struct BenchRow {
  int batch = 0;
  std::string fill;
  int ticks = 0;
  double seconds = 0;  // best of the repeats
  double slot_steps_per_second = 0;
};

struct BenchRatio {
  int batch = 0;
  double wall_over_empty = 0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::vector<BenchRatio> ratios;  // batches measured with both "wall" and "empty"
};

// Fills: any element name, or "random" for a start state from the default
// generator. Every (batch, fill) cell is timed `repeats` times with the fills
// interleaved, keeping the fastest run. ticks == 0 yields an empty report.
BenchReport run_bench(const std::vector<int>& batches, const std::vector<std::string>& fills, int ticks,
                      int repeats = 3, const RuleConfig& config = {});

std::string bench_json(const BenchReport& report);

}  // namespace powder
