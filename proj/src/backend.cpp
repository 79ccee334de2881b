#include "shuffleval/backend.hpp"

#include <thread>

#include "json.hpp"
#include "shuffleval/errors.hpp"
#include "shuffleval/hash.hpp"
#include "shuffleval/oracles.hpp"
#include "shuffleval/text.hpp"

namespace shuffleval {

using nlohmann::json;

std::string_view to_string(BackendKind kind) {
  return kind == BackendKind::remote_chat ? "remote_chat" : "synthetic_oracle";
}

BackendKind infer_backend_kind(std::string_view model_id) {
  return model_id.starts_with("oracle:") ? BackendKind::synthetic_oracle : BackendKind::remote_chat;
}

void BackendConfig::validate() const {
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
  if (max_inflight == 0) throw ConfigError("max_inflight must be >= 1");
  if (model_id.empty()) throw ConfigError("model_id is empty");
  try {
    if (!json::parse(decoding_params).is_object()) throw ConfigError("decoding_params must be a JSON object");
  } catch (const json::parse_error&) {
    throw ConfigError("decoding_params is not valid JSON");
  }
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::optional<std::string> ResponseCache::get(const std::string& key) const {
  const auto path = dir_ / key;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  const auto content = text::read_file(path);
  const auto nl = content.find('\n');
  if (nl == std::string::npos) return std::nullopt;
  try {
    const auto header = json::parse(content.substr(0, nl));
    const auto bytes = header.at("bytes").get<std::size_t>();
    if (content.size() - nl - 1 != bytes) return std::nullopt;
  } catch (const json::exception&) {
    return std::nullopt;
  }
  return content.substr(nl + 1);
}

void ResponseCache::put(const std::string& key, std::string_view model_id, std::string_view prompt,
                        std::string_view reply) const {
  json header = {{"key", key},
                 {"model_id", std::string(model_id)},
                 {"prompt_sha256", sha256_hex(prompt)},
                 {"bytes", reply.size()}};
  std::string content = header.dump() + "\n";
  content += reply;
  text::write_file_atomic(dir_ / key, content);
}

Client::Client(BackendConfig cfg, std::shared_ptr<Backend> backend)
    : cfg_(std::move(cfg)),
      backend_(std::move(backend)),
      inflight_(static_cast<std::ptrdiff_t>(std::min<std::size_t>(cfg_.max_inflight, 4096))) {
  cfg_.validate();
  if (!cfg_.cache_dir.empty()) cache_.emplace(cfg_.cache_dir);
}

std::string Client::cache_key(std::string_view model_id, std::string_view prompt,
                              std::string_view decoding_params, int attempt) {
  // Length-prefixed fields so no concatenation of two inputs collides.
  std::string material;
  auto add = [&](std::string_view field) {
    material += std::to_string(field.size());
    material += ':';
    material += field;
  };
  add(model_id);
  add(prompt);
  add(decoding_params);
  if (attempt > 0) add("attempt=" + std::to_string(attempt));
  return sha256_hex(material);
}

std::string Client::complete(const std::string& prompt, int attempt) {
  std::string key;
  if (cache_) {
    key = cache_key(cfg_.model_id, prompt, cfg_.decoding_params, attempt);
    if (auto hit = cache_->get(key)) {
      cache_hits_.fetch_add(1);
      return *hit;
    }
  }
  if (cfg_.offline && cfg_.kind == BackendKind::remote_chat)
    throw ConfigError("cache miss under --offline for model " + cfg_.model_id);

  std::string reply;
  for (int retry = 0;; ++retry) {
    try {
      inflight_.acquire();
      struct Release {
        std::counting_semaphore<4096>& s;
        ~Release() { s.release(); }
      } release{inflight_};
      backend_calls_.fetch_add(1);
      reply = backend_->complete(prompt);
      break;
    } catch (const TransportError& e) {
      if (retry >= cfg_.max_retries)
        throw TransportError(std::string(e.what()) + " (after " + std::to_string(retry + 1) + " attempts)");
      std::this_thread::sleep_for(cfg_.backoff * (1LL << std::min(retry, 16)));
    }
  }
  if (cache_) cache_->put(key, cfg_.model_id, prompt, reply);
  return reply;
}

std::shared_ptr<Backend> make_backend(const BackendConfig& cfg) {
  if (cfg.kind == BackendKind::synthetic_oracle) return make_oracle_backend(cfg.model_id);
  if (cfg.endpoint.empty()) throw ConfigError("remote backend requires an endpoint (SHUFFLEVAL_ENDPOINT)");
  if (cfg.api_key.empty() && !cfg.offline)
    throw ConfigError("remote backend requires SHUFFLEVAL_API_KEY");
  return std::make_shared<ChatCompletionBackend>(cfg.endpoint, cfg.model_id, cfg.api_key, cfg.timeout,
                                                 cfg.decoding_params);
}

std::shared_ptr<Client> make_client(const BackendConfig& cfg) {
  cfg.validate();
  return std::make_shared<Client>(cfg, make_backend(cfg));
}

}  // namespace shuffleval
