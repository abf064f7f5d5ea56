#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"

namespace fs = std::filesystem;
using namespace fracspde::cli;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "fracspde");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  Run r;
  r.code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Scratch {
 public:
  explicit Scratch(const std::string& name) : dir_(fs::temp_directory_path() / ("fracspde_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string file(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

 private:
  fs::path dir_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kSimulate = R"({
  "domain": {"type": "rectangle", "d": 2},
  "model": {"nu_s": 1.0, "nu_t": 1.0, "r_s": 0.2, "r_t": 5.0, "beta_s": 0.5, "sigma": SIGMA},
  "modes": 12,
  "mesh": {"T": 1.0, "N": 16},
  "scheme": {"type": "projection", "m": 1},
  "output_times": [0.5, 1.0],
  "grid": {"n": [4, 3]},
  "seed": 99
})";

std::string simulate_config(const std::string& sigma) {
  std::string s = kSimulate;
  s.replace(s.find("SIGMA"), 5, sigma);
  return s;
}

}  // namespace

TEST_CASE("syntax errors report line and column") {
  try {
    parse_config("{\n  \"a\": 1,\n  \"b\": }\n", "cfg.json");
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("cfg.json: JSON syntax error at line 3, column 8") == 0);
  }
}

TEST_CASE("unknown keys are rejected") {
  const json j = json::parse(R"({"type": "projection", "m": 1, "mm": 2})");
  CHECK_THROWS_AS(parse_scheme(Section(j, "scheme")), ConfigError);
}

TEST_CASE("fnv-1a hashes") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
  CHECK(hash_string("a") == "fnv1a64:af63dc4c8601ec8c");
}

TEST_CASE("params prints both parametrisations and warns on a stale range") {
  Scratch s("params");
  const auto cfg = s.file("p.json", R"({
    "domain": {"type": "sphere"},
    "model": {"gamma": 1.5, "alpha": 0.5, "beta": 1.0, "kappa": 2.828, "r": 10.0, "sigma": 10.0},
    "declared": {"nu_s": 1.0, "nu_t": 1.0, "beta_s": 0.5, "r_s": 1.0, "r_t": 5.0}
  })");
  const Run r = run({"params", "--config", cfg});
  CHECK(r.code == 0);
  CHECK(r.out.find("nu_s=1, nu_t=1, beta_s=0.5") != std::string::npos);
  CHECK(r.out.find("warning: declared r_t=5") != std::string::npos);
}

TEST_CASE("exit codes") {
  Scratch s("codes");
  const auto bad_json = s.file("bad.json", "{ \"domain\": ");
  CHECK(run({"params", "--config", bad_json}).code == 1);
  const auto invalid = s.file("inv.json", R"({
    "domain": {"type": "rectangle", "d": 3},
    "model": {"gamma": 0.75, "alpha": 0.5, "beta": 0.5, "kappa": 1.0, "r": 1.0}
  })");
  const Run inv = run({"params", "--config", invalid});
  CHECK(inv.code == 2);
  CHECK(inv.err.find("invalid model") != std::string::npos);
  CHECK(run({"params", "--config", s.path("missing.json")}).code == 3);
  CHECK(run({"params"}).code == 1);
  const auto sim = s.file("sim.json", simulate_config("1.0"));
  // A regular file where the output directory should go.
  const auto blocker = s.file("blocker", "x");
  CHECK(run({"simulate", "--config", sim, "--out", blocker + "/sub"}).code == 3);
  const auto noseed = s.file("noseed.json", R"({"scheme": {"type": "leftpoint"}, "gammas": [0.8]})");
  CHECK(run({"converge-time", "--config", noseed, "--out", s.path("o")}).code == 1);
}

TEST_CASE("simulate is reproducible across thread counts and records a manifest") {
  Scratch s("simulate");
  const auto cfg = s.file("sim.json", simulate_config("1.0"));
  REQUIRE(run({"simulate", "--config", cfg, "--out", s.path("a"), "--threads", "1"}).code == 0);
  REQUIRE(run({"simulate", "--config", cfg, "--out", s.path("b"), "--threads", "3"}).code == 0);
  REQUIRE(run({"simulate", "--config", cfg, "--out", s.path("c"), "--seed", "100"}).code == 0);
  const std::string pa = slurp(s.path("a") + "/paths.csv");
  CHECK(pa == slurp(s.path("b") + "/paths.csv"));
  CHECK(slurp(s.path("a") + "/fields.csv") == slurp(s.path("b") + "/fields.csv"));
  CHECK(pa != slurp(s.path("c") + "/paths.csv"));
  CHECK(pa.rfind("k,t,value\n", 0) == 0);
  // 12 modes x 2 output times plus the header.
  CHECK(std::count(pa.begin(), pa.end(), '\n') == 25);

  const json manifest = json::parse(slurp(s.path("a") + "/manifest.json"));
  CHECK(manifest["seed"] == 99);
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["files"][0]["path"] == "paths.csv");
  CHECK(manifest["files"][0]["hash"] == hash_string(pa));
  // The config hash is taken over the canonical dump, so formatting does not matter.
  CHECK(manifest["config_hash"] == hash_string(json::parse(slurp(cfg)).dump()));
  CHECK(json::parse(slurp(s.path("c") + "/manifest.json"))["seed"] == 100);
}

TEST_CASE("zero amplitude simulates zero fields") {
  Scratch s("zero");
  const auto cfg = s.file("sim.json", simulate_config("0.0"));
  REQUIRE(run({"simulate", "--config", cfg, "--out", s.path("z")}).code == 0);
  std::istringstream in(slurp(s.path("z") + "/paths.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::stod(line.substr(line.rfind(',') + 1)) == 0.0);
    ++rows;
  }
  CHECK(rows == 24);
}

TEST_CASE("converge-time writes one slope row per gamma") {
  Scratch s("ctime");
  const auto cfg = s.file("ct.json", R"({
    "scheme": {"type": "leftpoint"},
    "gammas": [0.7, 0.8, 0.9, 1.1, 1.2, 1.3, 1.4, 1.6, 1.7, 1.8, 1.9, 2.0],
    "mu": 0.1, "lambda": 1.0, "T": 1.0,
    "reference_h": 0.0009765625,
    "ladder_h": [0.0625, 0.03125, 0.015625],
    "replicas": 4,
    "seed": 3
  })");
  const Run r = run({"converge-time", "--config", cfg, "--out", s.path("o"), "--quiet"});
  REQUIRE(r.code == 0);
  const std::string slopes = slurp(s.path("o") + "/slopes.csv");
  CHECK(slopes.rfind("gamma,slope,slope_stderr,theory_slope\n", 0) == 0);
  CHECK(std::count(slopes.begin(), slopes.end(), '\n') == 13);
  CHECK(fs::exists(s.path("o") + "/ladder_gamma_0.7.csv"));
}

TEST_CASE("converge-space writes one slope row per nu_s") {
  Scratch s("cspace");
  const auto cfg = s.file("cs.json", R"({
    "model": {"nu_t": 1.0, "r_s": 0.1, "r_t": 5.0, "beta_s": 0.5},
    "nu_s": [1.0, 1.5],
    "reference_modes": 128,
    "ladder": [2, 4, 8, 16, 32],
    "h": 0.125,
    "horizon": 1.0,
    "seed": 5
  })");
  const Run r = run({"converge-space", "--config", cfg, "--out", s.path("o"), "--quiet"});
  REQUIRE(r.code == 0);
  const std::string slopes = slurp(s.path("o") + "/slopes.csv");
  CHECK(slopes.rfind("nu_s,slope,slope_stderr,theory_slope\n", 0) == 0);
  CHECK(std::count(slopes.begin(), slopes.end(), '\n') == 3);
}
