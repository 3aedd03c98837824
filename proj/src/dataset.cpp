#include "powder/dataset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json_util.hpp"
#include "powder/rng.hpp"
#include "powder/tasks.hpp"
#include "powder/world_file.hpp"

namespace powder {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t pair_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return splitmix64(base ^ splitmix64(index + 0x64617461ull));
}

namespace {

std::string pair_file(int index, const char* part) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "pair_%05d_%s.pwld", index, part);
  return buf;
}

}  // namespace

fs::path gen_dataset(const SimConfig& config, int count, const fs::path& dir) {
  if (count < 0) throw DomainError("dataset count must be >= 0");
  config.pcg.validate();
  config.rules.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());

  json manifest;
  manifest["format"] = "powderworld-dataset";
  manifest["version"] = 1;
  manifest["engine_version"] = kEngineVersion;
  manifest["horizon"] = kWorldModelHorizon;
  manifest["base_seed"] = config.pcg.seed;
  manifest["count"] = count;
  manifest["config"] = format_config(config);
  json pairs = json::array();
  for (int i = 0; i < count; ++i) {
    const std::uint64_t seed = pair_seed(config.pcg.seed, static_cast<std::uint64_t>(i));
    const WorldModelPair p = gen_world_model_pair(config.pcg, seed, config.rules);
    const std::string start = pair_file(i, "start");
    const std::string target = pair_file(i, "target");
    write_file(dir / start, save_world(p.start));
    write_file(dir / target, save_world(p.target));
    pairs.push_back({{"index", i},
                     {"seed", seed},
                     {"start", start},
                     {"target", target},
                     {"start_digest", detail::hex64(world_digest(p.start, 0))},
                     {"target_digest", detail::hex64(world_digest(p.target, 0))}});
  }
  manifest["pairs"] = std::move(pairs);
  const fs::path path = dir / "manifest.json";
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << manifest.dump(2) << '\n';
  if (!f) throw std::runtime_error("write failed: " + path.string());
  return path;
}

VerifyReport verify_dataset(const fs::path& dir) {
  VerifyReport report;
  const fs::path path = dir / "manifest.json";
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  json manifest;
  try {
    manifest = json::parse(f);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
  if (manifest.value("engine_version", "") != kEngineVersion) {
    report.problems.push_back("engine version mismatch: " + manifest.value("engine_version", std::string("?")));
  }
  const SimConfig config = parse_config(manifest.at("config").get<std::string>());
  const json& pairs = manifest.at("pairs");
  if (manifest.value("count", -1) != static_cast<int>(pairs.size())) {
    report.problems.push_back("pair count does not match manifest count");
  }
  for (const json& entry : pairs) {
    const int index = entry.at("index").get<int>();
    const std::uint64_t seed = entry.at("seed").get<std::uint64_t>();
    const std::string tag = "pair " + std::to_string(index);
    if (seed != pair_seed(config.pcg.seed, static_cast<std::uint64_t>(index))) {
      report.problems.push_back(tag + ": seed does not follow the base seed");
    }
    const WorldModelPair p = gen_world_model_pair(config.pcg, seed, config.rules);
    const std::string start_digest = detail::hex64(world_digest(p.start, 0));
    const std::string target_digest = detail::hex64(world_digest(p.target, 0));
    if (entry.at("start_digest") != start_digest) report.problems.push_back(tag + ": start digest differs on regeneration");
    if (entry.at("target_digest") != target_digest) report.problems.push_back(tag + ": target digest differs on regeneration");
    for (const char* part : {"start", "target"}) {
      const fs::path file = dir / entry.at(part).get<std::string>();
      try {
        const World w = load_world(read_file(file));
        if (detail::hex64(world_digest(w, 0)) != entry.at(std::string(part) + "_digest")) {
          report.problems.push_back(tag + ": " + file.string() + " does not match its digest");
        }
      } catch (const std::exception& e) {
        report.problems.push_back(tag + ": " + file.string() + ": " + e.what());
      }
    }
    ++report.pairs;
  }
  return report;
}

}  // namespace powder
