#include "cli/output.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <system_error>

#include "fracspde/noise.hpp"

#ifndef FRACSPDE_VERSION
#define FRACSPDE_VERSION "unknown"
#endif

namespace fracspde::cli {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_string(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

std::string fmt(double value) {
  char buf[40];
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

OutputDir::OutputDir(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec || !std::filesystem::is_directory(dir_))
    throw IoError("cannot create output directory '" + dir_.string() + "'" + (ec ? ": " + ec.message() : ""));
}

void OutputDir::write(const std::string& name, const std::string& content) {
  const auto target = dir_ / name;
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + target.string() + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + target.string() + "'");
  files_.emplace_back(name, hash_string(content));
}

void OutputDir::write_manifest(const std::string& command, const json& config, std::uint64_t seed) {
  json manifest;
  manifest["tool"] = "fracspde";
  manifest["version"] = FRACSPDE_VERSION;
  manifest["command"] = command;
  manifest["config_hash"] = hash_string(config.dump());
  manifest["seed"] = seed;
  manifest["stream_policy"] = kStreamPolicy;
  json files = json::array();
  for (const auto& [name, hash] : files_) files.push_back({{"path", name}, {"hash", hash}});
  manifest["files"] = files;
  const std::string text = manifest.dump(2) + "\n";
  const auto target = dir_ / "manifest.json";
  std::ofstream out(target, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + target.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw IoError("failed writing '" + target.string() + "'");
}

}  // namespace fracspde::cli
