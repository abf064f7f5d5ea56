#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cli/config.hpp"

namespace fracspde::cli {

/// 64-bit FNV-1a content hash.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_string(std::string_view bytes);

/// Shortest round-trip decimal form used in every CSV.
std::string fmt(double value);

/// Output directory that records every file it writes for the manifest.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path dir);

  const std::filesystem::path& path() const { return dir_; }
  void write(const std::string& name, const std::string& content);
  /// Writes manifest.json listing all files written so far.
  void write_manifest(const std::string& command, const json& config, std::uint64_t seed);
  const std::vector<std::pair<std::string, std::string>>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::string, std::string>> files_;  // name, hash
};

}  // namespace fracspde::cli
