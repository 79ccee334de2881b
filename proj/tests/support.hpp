#pragma once

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "shuffleval/backend.hpp"
#include "shuffleval/corpus.hpp"
#include "shuffleval/oracles.hpp"
#include "shuffleval/text.hpp"

namespace testsupport {

inline std::string golden(const std::string& name) {
  return shuffleval::text::read_file(std::filesystem::path(SHUFFLEVAL_GOLDEN_DIR) / name);
}

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(SHUFFLEVAL_FIXTURE_DIR) / name;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("shuffleval-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline shuffleval::BackendConfig oracle_cfg(const std::string& model_id) {
  shuffleval::BackendConfig cfg;
  cfg.model_id = model_id;
  cfg.kind = shuffleval::infer_backend_kind(model_id);
  return cfg;
}

inline shuffleval::Client oracle_client(const std::string& model_id) {
  return shuffleval::Client(oracle_cfg(model_id), shuffleval::make_oracle_backend(model_id));
}

inline shuffleval::SegmentedTranslation translation(std::vector<std::string> segments,
                                                    std::string doc_id = "doc",
                                                    std::string translator_id = "mt") {
  shuffleval::SegmentedTranslation t;
  t.doc_id = std::move(doc_id);
  t.translator_id = std::move(translator_id);
  t.segments = std::move(segments);
  return t;
}

// "<tag>. filler" segments for the ascending-tag oracle.
inline std::vector<std::string> tagged(const std::vector<int>& tags) {
  std::vector<std::string> out;
  for (int t : tags) out.push_back(std::to_string(t) + ". Segment text " + std::to_string(t) + ".");
  return out;
}

}  // namespace testsupport
