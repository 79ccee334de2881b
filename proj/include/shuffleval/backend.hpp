#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>

namespace shuffleval {

enum class BackendKind { remote_chat, synthetic_oracle };

std::string_view to_string(BackendKind kind);

struct BackendConfig {
  BackendKind kind = BackendKind::synthetic_oracle;
  // Remote: the model name sent in the request body. Synthetic: one of the
  // "oracle:*" identifiers understood by make_backend.
  std::string model_id;
  // Full chat-completions URL, e.g. https://api.openai.com/v1/chat/completions.
  std::string endpoint;
  std::string api_key;
  std::chrono::milliseconds timeout{120000};
  int max_retries = 3;
  std::chrono::milliseconds backoff{500};
  // Empty disables caching.
  std::filesystem::path cache_dir;
  bool offline = false;
  std::size_t max_inflight = 8;
  // Canonical JSON object merged into each request body; "{}" means the
  // backend's own defaults.
  std::string decoding_params = "{}";

  // Throws ConfigError on max_retries < 0, timeout <= 0, max_inflight == 0.
  void validate() const;
};

// Kind implied by a model id: "oracle:" prefix means synthetic.
BackendKind infer_backend_kind(std::string_view model_id);

// Text in, text out. A single attempt; throws TransportError on failure.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const std::string& prompt) = 0;
};

// Wraps an arbitrary callable; handy for tests and canned replies.
class CallbackBackend final : public Backend {
 public:
  explicit CallbackBackend(std::function<std::string(const std::string&)> fn) : fn_(std::move(fn)) {}
  std::string complete(const std::string& prompt) override { return fn_(prompt); }

 private:
  std::function<std::string(const std::string&)> fn_;
};

// One file per key under dir; filename is the key, content is a one-line JSON
// header followed by the raw reply bytes.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);
  std::optional<std::string> get(const std::string& key) const;
  void put(const std::string& key, std::string_view model_id, std::string_view prompt,
           std::string_view reply) const;
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

// Every judge/translator/generator call goes through a Client: cache lookup,
// in-flight limiting, transport retries with exponential backoff.
// Thread-safe.
class Client {
 public:
  Client(BackendConfig cfg, std::shared_ptr<Backend> backend);

  // attempt > 0 is a content-level retry (e.g. unparseable reply); it gets
  // its own cache slot so retried runs replay from cache too.
  std::string complete(const std::string& prompt, int attempt = 0);

  const BackendConfig& config() const noexcept { return cfg_; }
  std::size_t backend_calls() const noexcept { return backend_calls_.load(); }
  std::size_t cache_hits() const noexcept { return cache_hits_.load(); }

  static std::string cache_key(std::string_view model_id, std::string_view prompt,
                               std::string_view decoding_params, int attempt);

 private:
  BackendConfig cfg_;
  std::shared_ptr<Backend> backend_;
  std::optional<ResponseCache> cache_;
  std::counting_semaphore<4096> inflight_;
  std::atomic<std::size_t> backend_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

// Builds the backend named by cfg (remote chat or an "oracle:*" synthetic).
// Remote without api_key and not offline -> ConfigError.
std::shared_ptr<Backend> make_backend(const BackendConfig& cfg);
std::shared_ptr<Client> make_client(const BackendConfig& cfg);

// OpenAI-compatible chat completion over HTTP(S).
class ChatCompletionBackend final : public Backend {
 public:
  ChatCompletionBackend(std::string endpoint, std::string model_id, std::string api_key,
                        std::chrono::milliseconds timeout, std::string decoding_params = "{}");
  std::string complete(const std::string& prompt) override;

  // Request body for a prompt (exposed for wire-format tests).
  std::string request_body(const std::string& prompt) const;
  // choices[0].message.content of a response body; TransportError otherwise.
  static std::string parse_response(std::string_view body);

 private:
  std::string base_;  // scheme://host[:port]
  std::string path_;
  std::string model_id_;
  std::string api_key_;
  std::chrono::milliseconds timeout_;
  std::string decoding_params_;
};

}  // namespace shuffleval
