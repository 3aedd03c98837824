#include "powder/bench.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "json_util.hpp"
#include "powder/procgen.hpp"

namespace powder {

namespace {

World bench_world(int batch, const std::string& fill) {
  if (fill == "random") {
    std::vector<World> parts;
    for (int s = 0; s < batch; ++s) {
      PcgParams p;
      p.seed = static_cast<std::uint64_t>(s);
      parts.push_back(gen_start_state(p));
    }
    return stack_worlds(parts);
  }
  const auto id = element_from_name(fill);
  if (!id) throw DomainError("unknown bench fill: " + fill);
  return make_world(batch, 64, 64, *id, 1);
}

}  // namespace

BenchReport run_bench(const std::vector<int>& batches, const std::vector<std::string>& fills, int ticks,
                      int repeats, const RuleConfig& config) {
  BenchReport report;
  if (ticks <= 0) return report;
  if (repeats < 1) throw DomainError("bench repeats must be >= 1");
  config.validate();
  for (int batch : batches) {
    if (batch < 1) throw DomainError("bench batch must be >= 1");
    std::vector<World> start;
    for (const std::string& fill : fills) start.push_back(bench_world(batch, fill));
    std::vector<double> best(fills.size(), std::numeric_limits<double>::infinity());
    for (int r = 0; r < repeats; ++r) {
      for (std::size_t f = 0; f < fills.size(); ++f) {
        World w = start[f];
        const auto t0 = std::chrono::steady_clock::now();
        for (int t = 0; t < ticks; ++t) step_in_place(w, config);
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        best[f] = std::min(best[f], dt.count());
      }
    }
    double wall = -1, empty = -1;
    for (std::size_t f = 0; f < fills.size(); ++f) {
      report.rows.push_back({batch, fills[f], ticks, best[f], static_cast<double>(batch) * ticks / best[f]});
      if (fills[f] == "wall") wall = best[f];
      if (fills[f] == "empty") empty = best[f];
    }
    if (wall > 0 && empty > 0) report.ratios.push_back({batch, wall / empty});
  }
  return report;
}

std::string bench_json(const BenchReport& report) {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const BenchRow& r : report.rows) {
    j["rows"].push_back({{"batch", r.batch},
                         {"fill", r.fill},
                         {"ticks", r.ticks},
                         {"seconds", r.seconds},
                         {"slot_steps_per_second", r.slot_steps_per_second}});
  }
  j["wall_over_empty"] = nlohmann::json::array();
  for (const BenchRatio& r : report.ratios) {
    j["wall_over_empty"].push_back({{"batch", r.batch}, {"ratio", r.wall_over_empty}});
  }
  return j.dump(2);
}

}  // namespace powder
