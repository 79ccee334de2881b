#include "shuffleval/manifest.hpp"

#include <chrono>
#include <cstdio>

#include "json.hpp"
#include "shuffleval/hash.hpp"
#include "shuffleval/text.hpp"

namespace shuffleval {

void RunManifest::add_input(const std::filesystem::path& path) {
  input_sha256[path.string()] = sha256_file(path);
}

std::string RunManifest::to_json() const {
  nlohmann::json seeds_json = nlohmann::json::object();
  for (const auto& [k, v] : seeds) seeds_json[k] = v;
  return nlohmann::json{{"command", command},
                        {"argv", argv},
                        {"config", config},
                        {"seeds", seeds_json},
                        {"rng_algorithm", rng_algorithm},
                        {"input_sha256", input_sha256},
                        {"version", version},
                        {"started_at", started_at},
                        {"finished_at", finished_at}}
      .dump(2);
}

std::string utc_timestamp() {
  const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
  const auto day = std::chrono::floor<std::chrono::days>(now);
  const std::chrono::year_month_day ymd{day};
  const std::chrono::hh_mm_ss hms{now - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                static_cast<long>(hms.seconds().count()));
  return buf;
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  text::write_file_atomic(path, manifest.to_json() + "\n");
}

}  // namespace shuffleval
