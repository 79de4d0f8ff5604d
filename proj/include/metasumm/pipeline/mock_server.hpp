#pragma once

// Deterministic stand-in for the abstractive service: answers with the first
// N sentences of the input, cut to `max_length` words when given.

#include <atomic>
#include <memory>
#include <string>
#include <thread>

#include "metasumm/detail/httplib_wrap.hpp"
#include "json.hpp"
#include "metasumm/error.hpp"
#include "metasumm/summarizers/abstractive_client.hpp"
#include "metasumm/textproc.hpp"

namespace metasumm {

/// The mock's summarization rule, independent of HTTP.
inline std::string mock_summary(std::string_view text, std::size_t lead_sentences,
                                std::optional<std::size_t> max_length) {
  const auto sentences = segment_sentences(text);
  std::string out;
  for (std::size_t i = 0; i < sentences.size() && i < lead_sentences; ++i) {
    if (!out.empty()) out += ' ';
    out += sentences[i].text;
  }
  if (max_length) out = truncate_to_tokens(out, *max_length);
  return out;
}

class MockAbstractiveServer {
 public:
  explicit MockAbstractiveServer(std::size_t lead_sentences = 2) : lead_sentences_(lead_sentences) {
    server_ = std::make_unique<httplib::Server>();
    // SO_REUSEADDR only, so a busy port fails to bind.
    server_->set_socket_options([](socket_t sock) {
      int yes = 1;
      setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
    });
    server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    server_->Post("/summarize", [this](const httplib::Request& req, httplib::Response& res) {
      handle_summarize(req, res);
    });
  }

  MockAbstractiveServer(const MockAbstractiveServer&) = delete;
  MockAbstractiveServer& operator=(const MockAbstractiveServer&) = delete;

  ~MockAbstractiveServer() { stop(); }

  /// Binds and starts serving on a background thread. Port 0 picks a free port.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    bind(host, port);
    thread_ = std::thread([this] { server_->listen_after_bind(); });
    server_->wait_until_ready();
    return port_;
  }

  /// Binds and serves on the calling thread until stop() is called.
  void serve_forever(const std::string& host, int port) {
    bind(host, port);
    server_->listen_after_bind();
  }

  void stop() {
    if (server_) server_->stop();
    if (thread_.joinable()) thread_.join();
  }

  int port() const { return port_; }
  std::string url() const { return "http://" + host_ + ":" + std::to_string(port_); }
  std::size_t requests_served() const { return requests_.load(); }

 private:
  void bind(const std::string& host, int port) {
    host_ = host;
    if (port == 0) {
      port_ = server_->bind_to_any_port(host);
      if (port_ < 0) throw TransportError("mock server could not bind to " + host);
    } else {
      if (!server_->bind_to_port(host, port)) {
        throw TransportError("mock server could not bind to " + host + ":" + std::to_string(port) +
                             " (port busy?)");
      }
      port_ = port;
    }
  }

  void handle_summarize(const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    auto fail = [&](const std::string& message) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", message}}.dump(), "application/json");
    };
    nlohmann::json body;
    try {
      body = nlohmann::json::parse(req.body);
    } catch (const nlohmann::json::parse_error&) {
      return fail("invalid JSON body");
    }
    if (!body.is_object() || !body.contains("text") || !body["text"].is_string()) {
      return fail("body must be an object with a string \"text\"");
    }
    std::optional<std::size_t> max_length;
    if (body.contains("max_length") && !body["max_length"].is_null()) {
      if (!body["max_length"].is_number_integer() || body["max_length"].get<long long>() <= 0) {
        return fail("\"max_length\" must be a positive integer");
      }
      max_length = body["max_length"].get<std::size_t>();
    }
    const auto text = body["text"].get<std::string>();
    if (tokenize(text).empty()) return fail("\"text\" is empty");
    res.set_content(nlohmann::json{{"summary", mock_summary(text, lead_sentences_, max_length)}}.dump(),
                    "application/json; charset=utf-8");
  }

  std::size_t lead_sentences_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_ = "127.0.0.1";
  int port_ = -1;
  std::atomic<std::size_t> requests_{0};
};

}  // namespace metasumm
