#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fracspde/error.hpp"

namespace fracspde::cli {

json parse_config(std::string_view text, const std::string& origin) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    std::size_t line = 1, column = 1;
    const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (const auto pos = msg.find("parse error"); pos != std::string::npos)
      if (const auto colon = msg.find(": ", pos); colon != std::string::npos) msg = msg.substr(colon + 2);
    throw ConfigError(origin + ": JSON syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + msg);
  }
}

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

Section::Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
  if (!node_.is_object()) throw ConfigError(path_ + ": expected a JSON object");
}

bool Section::has(const char* key) const { return node_.contains(key); }

const json& Section::get(const char* key) {
  if (!node_.contains(key)) throw ConfigError(path_ + ": missing required key '" + key + "'");
  seen_.insert(key);
  return node_.at(key);
}

double Section::number(const char* key) {
  const json& v = get(key);
  if (!v.is_number()) throw ConfigError(path_ + "." + key + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path_ + "." + key + ": expected a finite number");
  return x;
}

double Section::number(const char* key, double fallback) { return has(key) ? number(key) : fallback; }

long Section::integer(const char* key) {
  const json& v = get(key);
  if (!v.is_number_integer()) throw ConfigError(path_ + "." + key + ": expected an integer");
  return v.get<long>();
}

long Section::integer(const char* key, long fallback) { return has(key) ? integer(key) : fallback; }

std::uint64_t Section::u64(const char* key) {
  const json& v = get(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0) return static_cast<std::uint64_t>(v.get<long long>());
  throw ConfigError(path_ + "." + key + ": expected a non-negative integer");
}

std::string Section::string(const char* key) {
  const json& v = get(key);
  if (!v.is_string()) throw ConfigError(path_ + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::string Section::string(const char* key, const std::string& fallback) {
  return has(key) ? string(key) : fallback;
}

std::vector<double> Section::numbers(const char* key) {
  const json& v = get(key);
  if (!v.is_array()) throw ConfigError(path_ + "." + key + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw ConfigError(path_ + "." + key + ": expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<long> Section::integers(const char* key) {
  const json& v = get(key);
  if (!v.is_array()) throw ConfigError(path_ + "." + key + ": expected an array of integers");
  std::vector<long> out;
  for (const auto& x : v) {
    if (!x.is_number_integer()) throw ConfigError(path_ + "." + key + ": expected an array of integers");
    out.push_back(x.get<long>());
  }
  return out;
}

Section Section::child(const char* key) { return Section(get(key), path_ + "." + key); }

void Section::finish() const {
  for (const auto& item : node_.items())
    if (!seen_.count(item.key())) throw ConfigError(path_ + ": unknown key '" + item.key() + "'");
}

ModelSpec parse_model(Section model, int d) {
  static constexpr const char* spde_keys[] = {"gamma", "alpha", "beta", "kappa", "r"};
  static constexpr const char* range_keys[] = {"nu_s", "nu_t", "r_s", "r_t", "beta_s"};
  bool spde = false, range = false;
  for (const char* k : spde_keys) spde = spde || model.has(k);
  for (const char* k : range_keys) range = range || model.has(k);
  if (spde && range) throw ConfigError(model.path() + ": mixes SPDE and range parameter keys");
  if (!spde && !range) throw ConfigError(model.path() + ": needs either SPDE or range parameter keys");

  ModelSpec spec;
  try {
    if (spde) {
      SpdeParams& p = spec.spde;
      p.gamma = model.number("gamma");
      p.alpha = model.number("alpha");
      p.beta = model.number("beta");
      p.kappa = model.number("kappa");
      p.r = model.number("r");
      p.sigma = model.number("sigma", 1.0);
      p.d = d;
      model.finish();
      p.validate();
    } else {
      RangeParams rp;
      rp.nu_s = model.number("nu_s");
      rp.nu_t = model.number("nu_t");
      rp.r_s = model.number("r_s");
      rp.r_t = model.number("r_t");
      rp.beta_s = model.number("beta_s");
      rp.sigma = model.number("sigma", 1.0);
      model.finish();
      spec.range = rp;
      spec.spde = to_spde(rp, d);
      spec.spde.validate();
    }
  } catch (const ModelError& e) {
    throw ModelInvalid(e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelInvalid(e.what());
  }
  return spec;
}

Domain parse_domain(Section domain) {
  const std::string type = domain.string("type");
  if (type == "sphere") {
    domain.finish();
    return SphereDomain{};
  }
  if (type == "rectangle") {
    const long d = domain.integer("d", 2);
    domain.finish();
    if (d < 1 || d > 3) throw ConfigError(domain.path() + ".d: must be 1, 2 or 3");
    return RectangleDomain{static_cast<int>(d)};
  }
  throw ConfigError(domain.path() + ".type: expected 'rectangle' or 'sphere'");
}

Scheme parse_scheme(Section scheme) {
  const std::string type = scheme.string("type");
  if (type == "leftpoint") {
    const double theta = scheme.number("theta", 0.0);
    scheme.finish();
    if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError(scheme.path() + ".theta: must lie in [0, 1]");
    return LeftPoint{theta};
  }
  if (type == "projection") {
    const long m = scheme.integer("m", 1);
    scheme.finish();
    if (m < 0 || m > kMaxPolyOrder) throw ConfigError(scheme.path() + ".m: must lie in [0, 3]");
    return Projection{static_cast<int>(m)};
  }
  throw ConfigError(scheme.path() + ".type: expected 'leftpoint' or 'projection'");
}

std::uint64_t resolve_seed(Section& root, std::optional<std::uint64_t> override_seed) {
  const bool in_config = root.has("seed");
  std::uint64_t seed = 0;
  if (in_config) seed = root.u64("seed");
  if (override_seed) return *override_seed;
  if (!in_config) throw ConfigError(root.path() + ": a seed is required (config key 'seed' or --seed)");
  return seed;
}

}  // namespace fracspde::cli
