#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "cli/config.hpp"

namespace fracspde::cli {

struct Options {
  std::string command;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir = "out";
  std::optional<int> threads;
  bool quiet = false;
};

/// --threads, else FRACSPDE_THREADS, else 1.
int resolve_threads(std::optional<int> flag);

void cmd_params(const json& config, const Options& opts, std::ostream& out);
void cmd_simulate(const json& config, const Options& opts, std::ostream& out);
void cmd_converge_time(const json& config, const Options& opts, std::ostream& out);
void cmd_converge_space(const json& config, const Options& opts, std::ostream& out);
void cmd_sphere(const json& config, const Options& opts, std::ostream& out);

/// Loads the config, dispatches, and maps failures to exit codes.
int run_command(const Options& opts, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fracspde::cli
