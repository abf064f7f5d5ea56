#include "cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cli/output.hpp"
#include "fracspde/error.hpp"
#include "fracspde/experiments.hpp"
#include "fracspde/noise.hpp"
#include "fracspde/simulator.hpp"

namespace fracspde::cli {

namespace {

constexpr double kDeg = 180.0 / std::numbers::pi;

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string range_line(const RangeParams& rp) {
  return "nu_s=" + g6(rp.nu_s) + ", nu_t=" + g6(rp.nu_t) + ", beta_s=" + g6(rp.beta_s) + ", r_s=" + g6(rp.r_s) +
         ", r_t=" + g6(rp.r_t) + ", sigma=" + g6(rp.sigma);
}

std::string ladder_csv(const ConvergenceTable& table) {
  std::string s = "level,resolution,rel_rmse,mc_stderr\n";
  for (const auto& row : table.rows)
    s += std::to_string(row.level) + "," + fmt(row.resolution) + "," + fmt(row.rel_rmse) + "," + fmt(row.mc_stderr) +
         "\n";
  return s;
}

// Coordinates written as latitude/longitude in degrees on the sphere.
std::string field_rows(const FieldSnapshot& snap, bool sphere) {
  std::string s;
  const std::size_t pd = static_cast<std::size_t>(snap.point_dim);
  for (std::size_t p = 0; p < snap.size(); ++p) {
    s += fmt(snap.time);
    if (sphere) {
      s += "," + fmt(90.0 - snap.points[2 * p] * kDeg) + "," + fmt(snap.points[2 * p + 1] * kDeg);
    } else {
      for (std::size_t q = 0; q < pd; ++q) s += "," + fmt(snap.points[p * pd + q]);
    }
    s += "," + fmt(snap.values[p]) + "\n";
  }
  return s;
}

std::string field_header(int coords) {
  std::string s = "time";
  for (int q = 1; q <= coords; ++q) s += ",coord" + std::to_string(q);
  return s + ",value\n";
}

std::size_t positive_count(Section& s, const char* key) {
  const long v = s.integer(key);
  if (v < 1) throw ConfigError(s.path() + "." + key + ": must be at least 1");
  return static_cast<std::size_t>(v);
}

TemporalMesh parse_mesh(Section mesh) {
  const double T = mesh.number("T");
  if (!(T > 0.0)) throw ConfigError(mesh.path() + ".T: must be positive");
  std::size_t N = 0;
  if (mesh.has("N") && mesh.has("h")) throw ConfigError(mesh.path() + ": give either N or h, not both");
  if (mesh.has("N")) {
    N = positive_count(mesh, "N");
  } else {
    const double h = mesh.number("h");
    if (!(h > 0.0)) throw ConfigError(mesh.path() + ".h: must be positive");
    const double steps = std::round(T / h);
    if (steps < 1.0 || std::abs(steps * h - T) > 1e-9 * T) throw ConfigError(mesh.path() + ": T must be a multiple of h");
    N = static_cast<std::size_t>(steps);
  }
  mesh.finish();
  return TemporalMesh::uniform(T, N);
}

std::vector<double> rectangle_grid(Section grid, int d) {
  const auto n = grid.integers("n");
  grid.finish();
  if (static_cast<int>(n.size()) != d) throw ConfigError(grid.path() + ".n: need one count per dimension");
  for (long c : n)
    if (c < 1) throw ConfigError(grid.path() + ".n: counts must be positive");
  std::size_t total = 1;
  for (long c : n) total *= static_cast<std::size_t>(c);
  std::vector<double> pts;
  pts.reserve(total * static_cast<std::size_t>(d));
  std::vector<long> idx(static_cast<std::size_t>(d), 0);
  for (std::size_t p = 0; p < total; ++p) {
    for (int q = 0; q < d; ++q) pts.push_back((static_cast<double>(idx[q]) + 0.5) / static_cast<double>(n[q]));
    for (int q = d - 1; q >= 0; --q) {
      if (++idx[q] < n[q]) break;
      idx[q] = 0;
    }
  }
  return pts;
}

void say(const Options& opts, std::ostream& out, const std::string& line) {
  if (!opts.quiet) out << line << "\n";
}

}  // namespace

int resolve_threads(std::optional<int> flag) {
  if (flag) {
    if (*flag < 1) throw ConfigError("--threads must be at least 1");
    return *flag;
  }
  if (const char* env = std::getenv("FRACSPDE_THREADS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) throw ConfigError("FRACSPDE_THREADS must be a positive integer");
    return static_cast<int>(v);
  }
  return 1;
}

void cmd_params(const json& config, const Options& opts, std::ostream& out) {
  (void)opts;
  Section root(config, "config");
  int d = 2;
  bool sphere = false;
  if (root.has("domain")) {
    const Domain dom = parse_domain(root.child("domain"));
    d = spatial_dimension(dom);
    sphere = std::holds_alternative<SphereDomain>(dom);
  }
  const Scheme scheme = root.has("scheme") ? parse_scheme(root.child("scheme")) : Scheme{LeftPoint{0.0}};
  std::optional<Section> declared;
  if (root.has("declared")) declared.emplace(root.child("declared"));
  std::vector<std::pair<std::string, double>> claims;
  if (declared) {
    for (const char* key : {"nu_s", "nu_t", "r_s", "r_t", "beta_s"})
      if (declared->has(key)) claims.emplace_back(key, declared->number(key));
    declared->finish();
  }
  Section model = root.child("model");
  root.finish();
  const ModelSpec spec = parse_model(model, d);
  const SpdeParams& sp = spec.spde;
  const RangeParams rp = to_range(sp);
  const int m = scheme_order(scheme);
  const TheoryRates rates = theory_rates(sp, m);

  out << "domain: " << (sphere ? "sphere" : "rectangle [0,1]^" + std::to_string(d)) << "\n";
  out << "spde: gamma=" << g6(sp.gamma) << ", alpha=" << g6(sp.alpha) << ", beta=" << g6(sp.beta)
      << ", kappa=" << g6(sp.kappa) << ", r=" << g6(sp.r) << ", sigma=" << g6(sp.sigma) << "\n";
  if (spec.range) out << "range (given): " << range_line(*spec.range) << "\n";
  out << "range: " << range_line(rp) << "\n";
  out << "existence: nu_s = beta + (2 gamma - 1) alpha - d/2 = " << g6(sp.nu_s()) << " > 0, holds\n";
  out << "scheme: " << describe(scheme) << "\n";
  out << "rates: nu=" << g6(rates.nu) << ", spatial MSE order=" << g6(rates.spatial_mse_order)
      << ", temporal MSE order=" << g6(rates.temporal_mse_order) << ", zeta=" << g6(rates.zeta)
      << ", cost exponent=" << g6(rates.cost_exponent) << (rates.log_factor ? ", log factor active" : "") << "\n";

  const std::pair<const char*, double> recomputed[] = {
      {"nu_s", rp.nu_s}, {"nu_t", rp.nu_t}, {"r_s", rp.r_s}, {"r_t", rp.r_t}, {"beta_s", rp.beta_s}};
  for (const auto& [key, value] : claims) {
    for (const auto& [rkey, rvalue] : recomputed) {
      if (key != rkey) continue;
      // Declared values are usually rounded to a few digits.
      if (std::abs(value - rvalue) > 0.01 * std::max(std::abs(value), std::abs(rvalue))) {
        const std::string msg = "warning: declared " + key + "=" + g6(value) + " differs from recomputed " + key +
                                "=" + g6(rvalue);
        out << msg << "\n";
      }
    }
  }
}

void cmd_simulate(const json& config, const Options& opts, std::ostream& out) {
  Section root(config, "config");
  const std::uint64_t seed = resolve_seed(root, opts.seed);
  const Domain domain = parse_domain(root.child("domain"));
  const int d = spatial_dimension(domain);
  const bool sphere = std::holds_alternative<SphereDomain>(domain);
  const std::size_t modes = positive_count(root, "modes");
  const TemporalMesh mesh = parse_mesh(root.child("mesh"));
  const Scheme scheme = parse_scheme(root.child("scheme"));
  std::vector<double> times = root.has("output_times") ? root.numbers("output_times")
                                                       : std::vector<double>{mesh.end_time()};
  std::vector<double> grid;
  if (root.has("grid")) {
    Section g = root.child("grid");
    if (sphere) {
      const std::size_t n_lat = positive_count(g, "n_lat");
      const std::size_t n_lon = positive_count(g, "n_lon");
      g.finish();
      grid = latlon_grid(n_lat, n_lon);
    } else {
      grid = rectangle_grid(g, d);
    }
  }
  Section model = root.child("model");
  root.finish();
  const ModelSpec spec = parse_model(model, d);
  const int threads = resolve_threads(opts.threads);

  const EigenBasis basis = sphere ? eigen_sphere(modes) : eigen_rectangle(d, modes);
  ModeSpectrum spectrum;
  try {
    spectrum = mu_lambda(spec.spde, basis);
  } catch (const ModelError& e) {
    throw ModelInvalid(e.what());
  }
  for (double t : times)
    if (t < 0.0 || t > mesh.end_time()) throw ConfigError("config.output_times: time outside the mesh");
  const PathSimulator sim(spec.spde.gamma, spectrum, mesh, scheme, times);
  const NoiseBlock noise = sample_block(mesh, spectrum.mu, scheme_order(scheme), seed,
                                        std::max<std::size_t>(sim.required_intervals(), 1), threads);
  const auto paths = sim.run(noise, threads);

  OutputDir dir(opts.out_dir);
  std::string csv = "k,t,value\n";
  for (const auto& p : paths)
    for (std::size_t i = 0; i < p.times.size(); ++i)
      csv += std::to_string(p.k + 1) + "," + fmt(p.times[i]) + "," + fmt(p.values[i]) + "\n";
  dir.write("paths.csv", csv);
  if (!grid.empty()) {
    std::string fields = field_header(sphere ? 2 : d);
    for (std::size_t i = 0; i < times.size(); ++i) fields += field_rows(assemble_field(paths, i, basis, grid), sphere);
    dir.write("fields.csv", fields);
  }
  dir.write_manifest("simulate", config, seed);
  say(opts, out, "simulate: " + std::to_string(paths.size()) + " modes x " + std::to_string(times.size()) +
                     " times written to " + dir.path().string());
}

void cmd_converge_time(const json& config, const Options& opts, std::ostream& out) {
  Section root(config, "config");
  TemporalConfig base;
  base.seed = resolve_seed(root, opts.seed);
  base.scheme = parse_scheme(root.child("scheme"));
  const std::vector<double> gammas = root.numbers("gammas");
  base.mu = root.number("mu", base.mu);
  base.lambda = root.number("lambda", base.lambda);
  base.T = root.number("T", base.T);
  base.reference_h = root.number("reference_h", base.reference_h);
  if (root.has("ladder_h")) base.ladder_h = root.numbers("ladder_h");
  base.replicas = root.has("replicas") ? positive_count(root, "replicas") : base.replicas;
  root.finish();
  base.threads = resolve_threads(opts.threads);
  if (gammas.empty()) throw ConfigError("config.gammas: need at least one value");
  for (double g : gammas)
    if (!(g > 0.5)) throw ModelInvalid("gamma=" + g6(g) + " must exceed 1/2");
  if (!(base.mu > 0.0) || !(base.lambda > 0.0)) throw ModelInvalid("mu and lambda must be positive");

  OutputDir dir(opts.out_dir);
  std::string slopes = "gamma,slope,slope_stderr,theory_slope\n";
  for (double g : gammas) {
    TemporalConfig cfg = base;
    cfg.gamma = g;
    const ConvergenceTable table = temporal_convergence(cfg);
    dir.write("ladder_gamma_" + fmt(g) + ".csv", ladder_csv(table));
    slopes += fmt(g) + "," + fmt(table.order) + "," + fmt(table.fit.stderr_slope) + "," + fmt(table.theory_order) + "\n";
    say(opts, out, "gamma=" + g6(g) + ": slope " + g6(table.order) + " +- " + g6(table.fit.stderr_slope) +
                       " (theory " + g6(table.theory_order) + ")");
  }
  dir.write("slopes.csv", slopes);
  dir.write_manifest("converge-time", config, base.seed);
}

void cmd_converge_space(const json& config, const Options& opts, std::ostream& out) {
  Section root(config, "config");
  SpectralConfig base;
  base.seed = resolve_seed(root, opts.seed);
  {
    Section model = root.child("model");
    base.range.nu_t = model.number("nu_t");
    base.range.r_s = model.number("r_s");
    base.range.r_t = model.number("r_t");
    base.range.beta_s = model.number("beta_s");
    base.range.sigma = model.number("sigma", 1.0);
    model.finish();
  }
  const std::vector<double> nu_s = root.numbers("nu_s");
  base.d = static_cast<int>(root.integer("d", base.d));
  if (root.has("reference_modes")) base.reference_modes = positive_count(root, "reference_modes");
  if (root.has("ladder")) {
    base.ladder.clear();
    for (long M : root.integers("ladder")) {
      if (M < 1) throw ConfigError("config.ladder: mode counts must be positive");
      base.ladder.push_back(static_cast<std::size_t>(M));
    }
  }
  base.m = static_cast<int>(root.integer("m", base.m));
  base.h = root.number("h", base.h);
  base.horizon = root.number("horizon", base.horizon);
  base.eval_time = root.number("eval_time", base.eval_time);
  if (root.has("replicas")) base.replicas = positive_count(root, "replicas");
  if (root.has("subset"))
    for (long i : root.integers("subset")) {
      if (i < 0) throw ConfigError("config.subset: indices must be non-negative");
      base.subset.push_back(static_cast<std::size_t>(i));
    }
  root.finish();
  base.threads = resolve_threads(opts.threads);
  if (nu_s.empty()) throw ConfigError("config.nu_s: need at least one value");

  for (double v : nu_s) {
    RangeParams rp = base.range;
    rp.nu_s = v;
    try {
      to_spde(rp, base.d).validate();
    } catch (const std::exception& e) {
      throw ModelInvalid("nu_s=" + g6(v) + ": " + e.what());
    }
  }

  OutputDir dir(opts.out_dir);
  std::string slopes = "nu_s,slope,slope_stderr,theory_slope\n";
  for (double v : nu_s) {
    SpectralConfig cfg = base;
    cfg.range.nu_s = v;
    const ConvergenceTable table = spectral_convergence(cfg);
    dir.write("ladder_nu_s_" + fmt(v) + ".csv", ladder_csv(table));
    slopes += fmt(v) + "," + fmt(table.order) + "," + fmt(table.fit.stderr_slope) + "," + fmt(table.theory_order) + "\n";
    say(opts, out, "nu_s=" + g6(v) + ": slope " + g6(table.order) + " +- " + g6(table.fit.stderr_slope) +
                       " (theory " + g6(table.theory_order) + ")");
  }
  dir.write("slopes.csv", slopes);
  dir.write_manifest("converge-space", config, base.seed);
}

void cmd_sphere(const json& config, const Options& opts, std::ostream& out) {
  Section root(config, "config");
  SphereConfig cfg;
  cfg.seed = resolve_seed(root, opts.seed);
  if (root.has("modes")) cfg.modes = positive_count(root, "modes");
  cfg.T = root.number("T", cfg.T);
  cfg.h = root.number("h", cfg.h);
  cfg.m = static_cast<int>(root.integer("m", cfg.m));
  if (root.has("snapshot_times")) cfg.snapshot_times = root.numbers("snapshot_times");
  if (root.has("grid")) {
    Section g = root.child("grid");
    cfg.n_lat = positive_count(g, "n_lat");
    cfg.n_lon = positive_count(g, "n_lon");
    g.finish();
  }
  if (root.has("trace")) {
    Section t = root.child("trace");
    cfg.trace_lat_deg = t.number("lat", cfg.trace_lat_deg);
    cfg.trace_lon_deg = t.number("lon", cfg.trace_lon_deg);
    t.finish();
  }
  cfg.equator_time = root.number("equator_time", cfg.T);
  if (root.has("equator_points")) cfg.equator_points = positive_count(root, "equator_points");
  Section model = root.child("model");
  root.finish();
  if (cfg.m < 0 || cfg.m > kMaxPolyOrder) throw ConfigError("config.m: must lie in [0, 3]");
  cfg.params = parse_model(model, 2).spde;
  cfg.threads = resolve_threads(opts.threads);

  const SphereResult res = sphere_experiment(cfg);
  OutputDir dir(opts.out_dir);
  for (const auto& snap : res.snapshots)
    dir.write("snapshot_t" + fmt(snap.time) + ".csv", field_header(2) + field_rows(snap, true));
  std::string trace = field_header(2);
  for (std::size_t n = 0; n < res.trace_times.size(); ++n)
    trace += fmt(res.trace_times[n]) + "," + fmt(cfg.trace_lat_deg) + "," + fmt(cfg.trace_lon_deg) + "," +
             fmt(res.trace_values[n]) + "\n";
  dir.write("trace_temporal.csv", trace);
  dir.write("trace_equator.csv", field_header(2) + field_rows(res.equator, true));
  dir.write_manifest("sphere", config, cfg.seed);
  say(opts, out, "sphere: " + std::to_string(res.snapshots.size()) + " snapshots and 2 traces written to " +
                     dir.path().string());
}

int run_command(const Options& opts, std::ostream& out, std::ostream& err) {
  try {
    const json config = load_config(opts.config_path);
    if (opts.command == "params")
      cmd_params(config, opts, out);
    else if (opts.command == "simulate")
      cmd_simulate(config, opts, out);
    else if (opts.command == "converge-time")
      cmd_converge_time(config, opts, out);
    else if (opts.command == "converge-space")
      cmd_converge_space(config, opts, out);
    else if (opts.command == "sphere")
      cmd_sphere(config, opts, out);
    else
      throw ConfigError("unknown command '" + opts.command + "'");
    return kOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ModelInvalid& e) {
    err << "invalid model: " << e.what() << "\n";
    return kModelError;
  } catch (const ModelError& e) {
    err << "invalid model: " << e.what() << "\n";
    return kModelError;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kModelError;
  }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulate fractional-in-time stochastic heat equations by spectral truncation"};
  app.require_subcommand(1);
  Options opts;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  struct Spec {
    const char* name;
    const char* help;
  };
  const Spec commands[] = {
      {"params", "Convert between parametrisations and print rates"},
      {"simulate", "Simulate coefficient paths and optional field snapshots"},
      {"converge-time", "Temporal convergence ladders for a list of gamma values"},
      {"converge-space", "Spectral convergence ladders for a list of nu_s values"},
      {"sphere", "Sphere snapshots and traces"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--config", opts.config_path, "JSON configuration file")->required();
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--out", opts.out_dir, "Output directory");
    sub->add_option("--threads", threads, "Worker threads (default: FRACSPDE_THREADS or 1)");
    sub->add_flag("--quiet", opts.quiet, "Suppress progress messages");
    sub->callback([&opts, name = std::string(c.name)] { opts.command = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return kConfigError;
  }
  opts.seed = seed;
  opts.threads = threads;
  return run_command(opts, out, err);
}

}  // namespace fracspde::cli
