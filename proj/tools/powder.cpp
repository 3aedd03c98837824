#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "powder/bench.hpp"
#include "powder/config.hpp"
#include "powder/dataset.hpp"
#include "powder/env_protocol.hpp"
#include "powder/errors.hpp"
#include "powder/kernel.hpp"
#include "powder/procgen.hpp"
#ifdef POWDER_WITH_SANDBOX
#include "powder/sandbox.hpp"
#endif
#include "powder/world_file.hpp"

using namespace powder;

namespace {

#ifdef POWDER_WITH_SANDBOX
volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }
#endif

SimConfig load_config(const std::string& path) {
  SimConfig cfg;
  if (!path.empty()) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    try {
      cfg = parse_config(ss.str());
    } catch (const ParseError& e) {
      throw std::runtime_error(path + ": line " + std::to_string(e.offset()) + ": " + e.what());
    }
  }
  if (const char* env = std::getenv("PW_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      cfg.pcg.seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::runtime_error(std::string("PW_SEED is not an unsigned integer: ") + env);
    }
  }
  return cfg;
}

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

int eval_tests(const SimConfig& cfg, int seeds) {
  int failed = 0;
  std::cout << "scenario                        horizon  passed  result  digest\n";
  for (const TestScenario& s : test_suite()) {
    for (int h : {s.horizon, s.long_horizon}) {
      const ScenarioResult r = evaluate_scenario(s, h, cfg.rules, seeds, cfg.pcg.seed);
      std::string name = r.name;
      name.resize(32, ' ');
      std::cout << name << std::string(h < 10 ? " " : "") << h << "       " << r.passed << "/" << r.seeds
                << (r.passed < 10 ? "  " : " ") << (r.ok ? "  PASS  " : "  FAIL  ") << hex(r.digest) << '\n';
      failed += r.ok ? 0 : 1;
    }
  }
  std::cout << (failed == 0 ? "all scenarios pass" : std::to_string(failed) + " scenario runs failed") << '\n';
  return failed == 0 ? 0 : 1;
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batched falling-sand simulation engine"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "key = value config file")->check(CLI::ExistingFile);

  auto* gen = app.add_subcommand("gen-dataset", "Write world-model pairs and a manifest");
  int count = 10;
  std::string out_dir = "dataset";
  gen->add_option("-n,--count", count, "number of pairs")->check(CLI::NonNegativeNumber);
  gen->add_option("-o,--out", out_dir, "output directory");

  auto* verify = app.add_subcommand("verify-dataset", "Regenerate a dataset and compare digests");
  std::string verify_dir;
  verify->add_option("dir", verify_dir, "dataset directory")->required();

  auto* bench = app.add_subcommand("bench", "Measure step throughput");
  std::string batches = "1,8,32";
  std::string fills = "empty,wall,sand,water,random";
  int ticks = 50;
  int repeats = 3;
  bench->add_option("--batches", batches, "comma-separated batch sizes");
  bench->add_option("--fills", fills, "comma-separated fills (element names or 'random')");
  bench->add_option("--ticks", ticks, "ticks per measurement")->check(CLI::NonNegativeNumber);
  bench->add_option("--repeats", repeats, "repeats per measurement (fastest kept)")->check(CLI::PositiveNumber);

  app.add_subcommand("env-serve", "Serve one RL environment over stdin/stdout");

#ifdef POWDER_WITH_SANDBOX
  auto* sandbox = app.add_subcommand("sandbox-serve", "Serve the interactive sandbox over HTTP");
  std::string host = "127.0.0.1";
  int port = 8080;
  sandbox->add_option("--host", host, "bind address");
  sandbox->add_option("-p,--port", port, "port (0 picks a free one)")->check(CLI::Range(0, 65535));
#endif

  auto* eval = app.add_subcommand("eval-tests", "Run the interaction scenarios at both horizons");
  int seeds = 20;
  eval->add_option("--seeds", seeds, "rollouts per scenario")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("sim", "Headless run with optional load and save");
  std::string load_path, save_path;
  int sim_ticks = 64;
  bool rle = false;
  sim->add_option("--load", load_path, "start from a world file")->check(CLI::ExistingFile);
  sim->add_option("--save", save_path, "write the final world here");
  sim->add_option("-t,--ticks", sim_ticks, "ticks to simulate")->check(CLI::NonNegativeNumber);
  sim->add_flag("--rle", rle, "save element-only runs instead of full channels");

  app.add_subcommand("print-config", "Print the effective config in canonical form");

  CLI11_PARSE(app, argc, argv);

  try {
    const SimConfig cfg = load_config(config_path);
    if (*gen) {
      const auto manifest = gen_dataset(cfg, count, out_dir);
      std::cout << "wrote " << count << " pairs, manifest " << manifest.string() << '\n';
    } else if (*verify) {
      const VerifyReport r = verify_dataset(verify_dir);
      for (const std::string& p : r.problems) std::cout << "problem: " << p << '\n';
      std::cout << r.pairs << " pairs checked, " << (r.ok() ? "dataset verified" : "verification FAILED") << '\n';
      return r.ok() ? 0 : 1;
    } else if (*bench) {
      std::vector<int> b;
      for (const std::string& s : split_csv(batches)) b.push_back(std::stoi(s));
      std::cout << bench_json(run_bench(b, split_csv(fills), ticks, repeats, cfg.rules)) << '\n';
    } else if (app.got_subcommand("env-serve")) {
      serve_env(std::cin, std::cout);
#ifdef POWDER_WITH_SANDBOX
    } else if (*sandbox) {
      SandboxSession session(cfg);
      SandboxServer server(session);
      const int bound = server.start(host, port);
      std::cerr << "sandbox listening on http://" << host << ":" << bound << '\n';
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      server.stop();
#endif
    } else if (*eval) {
      return eval_tests(cfg, seeds);
    } else if (*sim) {
      World w = load_path.empty() ? gen_start_state(cfg.pcg) : load_world(read_file(load_path));
      for (int t = 0; t < sim_ticks; ++t) step_in_place(w, cfg.rules);
      for (int s = 0; s < w.batch(); ++s) {
        std::cout << "slot " << s << " tick " << w.tick() << " digest " << hex(world_digest(w, s)) << '\n';
      }
      if (!save_path.empty()) {
        SaveOptions opt;
        opt.encoding = rle ? WorldEncoding::Rle : WorldEncoding::Full;
        write_file(save_path, save_world(w, opt));
      }
    } else if (app.got_subcommand("print-config")) {
      std::cout << format_config(cfg);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
