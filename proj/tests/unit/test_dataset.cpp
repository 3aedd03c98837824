#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"
#include "powder/bench.hpp"
#include "powder/dataset.hpp"
#include "powder/world_file.hpp"

using namespace powder;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("powder_test_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("a generated dataset verifies and regenerates identically") {
  TempDir a("a"), b("b");
  SimConfig cfg;
  cfg.pcg.seed = 123;
  gen_dataset(cfg, 10, a.path);
  gen_dataset(cfg, 10, b.path);
  const VerifyReport r = verify_dataset(a.path);
  CHECK(r.ok());
  CHECK(r.pairs == 10);
  CHECK(slurp(a.path / "manifest.json") == slurp(b.path / "manifest.json"));
  for (const auto& entry : fs::directory_iterator(a.path)) {
    CHECK(slurp(entry.path()) == slurp(b.path / entry.path().filename()));
  }

  const auto manifest = nlohmann::json::parse(slurp(a.path / "manifest.json"));
  CHECK(manifest["engine_version"] == std::string(kEngineVersion));
  CHECK(manifest["count"] == 10);
  CHECK(manifest["horizon"] == 8);
  CHECK(manifest["base_seed"] == 123);
  std::set<std::uint64_t> seeds;
  for (const auto& p : manifest["pairs"]) seeds.insert(p["seed"].get<std::uint64_t>());
  CHECK(seeds.size() == 10);
}

TEST_CASE("tampering is reported") {
  TempDir d("tamper");
  gen_dataset(SimConfig{}, 3, d.path);
  const fs::path target = d.path / "pair_00001_target.pwld";
  World w = load_world(read_file(target));
  set_element(w, 0, 0, 0, w.element(0, 0, 0) == ElementId::Sand ? ElementId::Water : ElementId::Sand);
  write_file(target, save_world(w));
  const VerifyReport r = verify_dataset(d.path);
  CHECK_FALSE(r.ok());
  REQUIRE(r.problems.size() == 1);
  CHECK(r.problems[0].find("pair 1") != std::string::npos);
}

TEST_CASE("an empty dataset") {
  TempDir d("empty");
  gen_dataset(SimConfig{}, 0, d.path);
  const VerifyReport r = verify_dataset(d.path);
  CHECK(r.ok());
  CHECK(r.pairs == 0);
  CHECK(nlohmann::json::parse(slurp(d.path / "manifest.json"))["pairs"].empty());
}

TEST_CASE("element-restricted regimes come from config alone") {
  const std::vector<std::string> palettes{"sand", "sand, water", "sand, water, wall", "sand, water, wall, fire, plant"};
  for (std::size_t k = 0; k < palettes.size(); ++k) {
    TempDir d("palette" + std::to_string(k));
    const SimConfig cfg = parse_config("pcg.palette = " + palettes[k] + "\npcg.seed = 5\n");
    const auto allowed_list = parse_palette(palettes[k]);
    std::set<ElementId> allowed(allowed_list.begin(), allowed_list.end());
    allowed.insert(ElementId::Empty);
    gen_dataset(cfg, 4, d.path);
    CHECK(verify_dataset(d.path).ok());
    std::set<ElementId> seen;
    for (int i = 0; i < 4; ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "pair_%05d_start.pwld", i);
      const World w = load_world(read_file(d.path / name));
      for (ElementId e : w.slot(0).elem) {
        CHECK(allowed.count(e) == 1);
        seen.insert(e);
      }
    }
    CHECK(seen.size() == allowed.size());
  }
}

TEST_CASE("bench reports") {
  CHECK(run_bench({1, 8}, {"empty", "wall"}, 0).rows.empty());
  const BenchReport r = run_bench({1, 2}, {"empty", "wall", "random"}, 2, 1);
  CHECK(r.rows.size() == 6);
  REQUIRE(r.ratios.size() == 2);
  for (const BenchRow& row : r.rows) CHECK(row.slot_steps_per_second > 0);
  const auto j = nlohmann::json::parse(bench_json(r));
  CHECK(j.contains("rows"));
  CHECK(j["rows"].size() == 6);
  CHECK_THROWS(run_bench({1}, {"mud"}, 1, 1));
}
