#pragma once

// JSON-over-HTTP calls shared by the abstractive client and the remote
// sentence encoder.

#include <chrono>
#include <cstddef>
#include <string>
#include <thread>

#include "metasumm/detail/httplib_wrap.hpp"
#include "json.hpp"
#include "metasumm/error.hpp"

namespace metasumm::detail {

struct Endpoint {
  std::string scheme_host_port;  // e.g. http://127.0.0.1:8080
  std::string base_path;         // without trailing slash, may be empty
};

inline Endpoint parse_endpoint(const std::string& url) {
  if (url.empty()) throw ConfigError("endpoint URL is empty");
  const auto scheme_end = url.find("://");
  const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  Endpoint e;
  e.scheme_host_port = url.substr(0, path_start);
  if (scheme_end == std::string::npos) e.scheme_host_port = "http://" + e.scheme_host_port;
  if (path_start != std::string::npos) {
    e.base_path = url.substr(path_start);
    while (!e.base_path.empty() && e.base_path.back() == '/') e.base_path.pop_back();
  }
  return e;
}

struct HttpOptions {
  double timeout_seconds = 30.0;
  std::size_t retries = 2;
};

/// POSTs `body` and returns the parsed JSON response. Transport failures are
/// retried `retries` times; HTTP errors and malformed bodies are not.
inline nlohmann::json post_json(const Endpoint& endpoint, const std::string& path, const nlohmann::json& body,
                                const HttpOptions& opts) {
  const auto timeout = std::chrono::duration<double>(opts.timeout_seconds);
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  const std::string payload = body.dump();
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= opts.retries; ++attempt) {
    httplib::Client client(endpoint.scheme_host_port);
    client.set_connection_timeout(micros);
    client.set_read_timeout(micros);
    client.set_write_timeout(micros);
    auto res = client.Post(endpoint.base_path + path, payload, "application/json; charset=utf-8");
    if (!res) {
      last_error = httplib::to_string(res.error());
      if (attempt < opts.retries) std::this_thread::sleep_for(std::chrono::milliseconds(50 * (attempt + 1)));
      continue;
    }
    if (res->status < 200 || res->status >= 300) throw ServiceError(res->status, res->body);
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw ProtocolError("response is not valid JSON: " + std::string(e.what()));
    }
  }
  throw TransportError("POST " + endpoint.scheme_host_port + endpoint.base_path + path + " failed after " +
                       std::to_string(opts.retries + 1) + " attempt(s): " + last_error);
}

inline nlohmann::json get_json(const Endpoint& endpoint, const std::string& path, const HttpOptions& opts) {
  const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(opts.timeout_seconds));
  httplib::Client client(endpoint.scheme_host_port);
  client.set_connection_timeout(micros);
  client.set_read_timeout(micros);
  auto res = client.Get(endpoint.base_path + path);
  if (!res) throw TransportError("GET " + path + " failed: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) throw ServiceError(res->status, res->body);
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ProtocolError("response is not valid JSON: " + std::string(e.what()));
  }
}

}  // namespace metasumm::detail
