#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace shuffleval {

// Everything needed to reproduce a run.
struct RunManifest {
  std::string command;
  std::vector<std::string> argv;
  std::map<std::string, std::string> config;
  std::map<std::string, std::uint64_t> seeds;
  std::string rng_algorithm;
  std::map<std::string, std::string> input_sha256;  // path -> digest
  std::string version = SHUFFLEVAL_VERSION;
  std::string started_at;
  std::string finished_at;

  void add_input(const std::filesystem::path& path);
  std::string to_json() const;
};

// UTC, ISO 8601 with seconds.
std::string utc_timestamp();

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

}  // namespace shuffleval
