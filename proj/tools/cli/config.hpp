#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fracspde/kernel.hpp"
#include "fracspde/spectral.hpp"

namespace fracspde::cli {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kConfigError = 1, kModelError = 2, kIoError = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ModelInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses JSON text; syntax errors become ConfigError with "line L, column C".
json parse_config(std::string_view text, const std::string& origin);
/// Reads and parses a file; an unreadable file is an IoError.
json load_config(const std::string& path);

/// Typed view of one JSON object that remembers which keys were read, so
/// finish() can reject anything unexpected.
class Section {
 public:
  Section(const json& node, std::string path);

  bool has(const char* key) const;
  double number(const char* key);
  double number(const char* key, double fallback);
  long integer(const char* key);
  long integer(const char* key, long fallback);
  std::uint64_t u64(const char* key);
  std::string string(const char* key);
  std::string string(const char* key, const std::string& fallback);
  std::vector<double> numbers(const char* key);
  std::vector<long> integers(const char* key);
  Section child(const char* key);

  /// Throws ConfigError naming the first unknown key.
  void finish() const;

  const std::string& path() const { return path_; }

 private:
  const json& get(const char* key);

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

struct ModelSpec {
  SpdeParams spde;
  std::optional<RangeParams> range;  // present when given in range form
};

/// "model" block in either parametrisation; `d` comes from the domain.
/// Invalid or non-existent models raise ModelInvalid.
ModelSpec parse_model(Section model, int d);

/// {"type": "rectangle", "d": 2} or {"type": "sphere"}.
Domain parse_domain(Section domain);

/// {"type": "leftpoint", "theta": 0} or {"type": "projection", "m": 1}.
Scheme parse_scheme(Section scheme);

/// Seed from --seed or the config; mandatory for stochastic commands.
std::uint64_t resolve_seed(Section& root, std::optional<std::uint64_t> override_seed);

}  // namespace fracspde::cli
