#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "json.hpp"
#include "shuffleval/backend.hpp"
#include "shuffleval/errors.hpp"

namespace shuffleval {

using nlohmann::json;

ChatCompletionBackend::ChatCompletionBackend(std::string endpoint, std::string model_id, std::string api_key,
                                             std::chrono::milliseconds timeout, std::string decoding_params)
    : model_id_(std::move(model_id)),
      api_key_(std::move(api_key)),
      timeout_(timeout),
      decoding_params_(std::move(decoding_params)) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint must be an absolute URL: " + endpoint);
  const auto path_start = endpoint.find('/', scheme_end + 3);
  if (path_start == std::string::npos) {
    base_ = endpoint;
    path_ = "/";
  } else {
    base_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
  }
}

std::string ChatCompletionBackend::request_body(const std::string& prompt) const {
  json body = json::parse(decoding_params_);
  body["model"] = model_id_;
  body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
  return body.dump();
}

std::string ChatCompletionBackend::parse_response(std::string_view body) {
  try {
    const auto j = json::parse(body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw TransportError(std::string("malformed chat-completion response: ") + e.what());
  }
}

std::string ChatCompletionBackend::complete(const std::string& prompt) {
  httplib::Client cli(base_);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  cli.set_connection_timeout(secs.count(), usecs.count());
  cli.set_read_timeout(secs.count(), usecs.count());
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = cli.Post(path_, headers, request_body(prompt), "application/json");
  if (!res) throw TransportError("request to " + base_ + path_ + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw TransportError("HTTP " + std::to_string(res->status) + " from " + base_ + path_ + ": " +
                         res->body.substr(0, 200));
  return parse_response(res->body);
}

}  // namespace shuffleval
