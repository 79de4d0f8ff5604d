#pragma once

// Client for the external abstractive summarization service.
//
// Wire contract:
//   POST /summarize  {"text": string, "max_length": integer?} -> 200 {"summary": string}
//   GET  /health     -> 200 {"status": "ok"}

#include <cstdlib>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>

#include "metasumm/detail/http.hpp"
#include "metasumm/summarizers/summarizer_id.hpp"
#include "metasumm/textproc.hpp"

namespace metasumm {

inline constexpr const char* kAbstractiveUrlEnv = "METASUMM_ABSTRACTIVE_URL";

struct AbstractiveClientConfig {
  std::string endpoint;
  double timeout_seconds = 30.0;
  std::size_t max_input_tokens = 512;
  std::size_t retries = 2;
  std::size_t max_in_flight = 4;
  std::optional<std::size_t> max_length;  // forwarded as "max_length" when set

  void validate() const {
    if (endpoint.empty()) throw ConfigError("abstractive endpoint is not configured (set " +
                                            std::string(kAbstractiveUrlEnv) + " or pass --abstractive-url)");
    if (!(timeout_seconds > 0.0)) throw ConfigError("abstractive timeout must be positive");
    if (max_input_tokens == 0) throw ConfigError("max input tokens must be positive");
    if (max_in_flight == 0 || max_in_flight > 64) throw ConfigError("max in-flight requests must be in [1, 64]");
  }

  /// Endpoint from the environment, if set.
  static std::optional<std::string> endpoint_from_env() {
    const char* v = std::getenv(kAbstractiveUrlEnv);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  }
};

/// Prefix of `text` ending after its `max_tokens`-th token.
inline std::string truncate_to_tokens(std::string_view text, std::size_t max_tokens) {
  const auto tokens = tokenize(text);
  if (tokens.size() <= max_tokens) return std::string(text);
  if (max_tokens == 0) return {};
  return std::string(text.substr(0, tokens[max_tokens - 1].end));
}

class AbstractiveClient {
 public:
  explicit AbstractiveClient(AbstractiveClientConfig cfg)
      : cfg_(std::move(cfg)), slots_(std::make_shared<std::counting_semaphore<64>>(
                                  static_cast<std::ptrdiff_t>(cfg_.max_in_flight))) {
    cfg_.validate();
    endpoint_ = detail::parse_endpoint(cfg_.endpoint);
  }

  const AbstractiveClientConfig& config() const { return cfg_; }

  /// Summary of arbitrary text, truncated to the configured input cap.
  std::string summarize_text(std::string_view text) const {
    nlohmann::json body = {{"text", truncate_to_tokens(text, cfg_.max_input_tokens)}};
    if (cfg_.max_length) body["max_length"] = *cfg_.max_length;

    nlohmann::json response;
    {
      SlotGuard slot(*slots_);
      response = detail::post_json(endpoint_, "/summarize", body, {cfg_.timeout_seconds, cfg_.retries});
    }

    if (!response.is_object() || !response.contains("summary") || !response["summary"].is_string()) {
      throw ProtocolError("response lacks a string \"summary\" field");
    }
    auto summary = response["summary"].get<std::string>();
    if (summary.empty() && !text.empty()) throw ProtocolError("service returned an empty summary");
    return summary;
  }

  SummaryResult summarize(const Document& doc) const {
    if (doc.empty()) throw DataError("empty input");
    SummaryResult r;
    r.summarizer = SummarizerId::t5_article;
    r.text = summarize_text(doc.raw_text);
    return r;
  }

  bool healthy() const {
    try {
      auto j = detail::get_json(endpoint_, "/health", {cfg_.timeout_seconds, 0});
      return j.is_object() && j.value("status", "") == "ok";
    } catch (const Error&) {
      return false;
    }
  }

 private:
  struct SlotGuard {
    explicit SlotGuard(std::counting_semaphore<64>& s) : sem(s) { sem.acquire(); }
    ~SlotGuard() { sem.release(); }
    std::counting_semaphore<64>& sem;
  };

  AbstractiveClientConfig cfg_;
  detail::Endpoint endpoint_;
  std::shared_ptr<std::counting_semaphore<64>> slots_;
};

inline SummaryResult abstractive_summarize(const Document& doc, const AbstractiveClientConfig& cfg) {
  return AbstractiveClient(cfg).summarize(doc);
}

}  // namespace metasumm
