#pragma once

// Sentence encoder backed by an external service:
//   POST /encode {"sentences": [string...]} -> {"vectors": [[number...]...]}

#include <string>
#include <vector>

#include "metasumm/detail/http.hpp"
#include "metasumm/summarizers/encoder.hpp"

namespace metasumm {

class RemoteEncoder final : public SentenceEncoder {
 public:
  explicit RemoteEncoder(const std::string& url, double timeout_seconds = 30.0, std::size_t retries = 2)
      : endpoint_(detail::parse_endpoint(url)), opts_{timeout_seconds, retries} {}

  std::vector<Vector> encode(std::span<const Sentence> sentences) const override {
    if (sentences.empty()) throw DataError("encode_sentences requires at least one sentence");
    nlohmann::json body;
    body["sentences"] = nlohmann::json::array();
    for (const auto& s : sentences) body["sentences"].push_back(s.text);
    const auto response = detail::post_json(endpoint_, "/encode", body, opts_);
    if (!response.is_object() || !response.contains("vectors") || !response["vectors"].is_array()) {
      throw ProtocolError("encoder response lacks a \"vectors\" array");
    }
    const auto& vectors = response["vectors"];
    if (vectors.size() != sentences.size()) throw ProtocolError("encoder returned a wrong number of vectors");
    std::vector<Vector> out;
    out.reserve(vectors.size());
    for (const auto& v : vectors) {
      if (!v.is_array()) throw ProtocolError("encoder vector is not an array");
      Vector row;
      row.reserve(v.size());
      for (const auto& x : v) {
        if (!x.is_number()) throw ProtocolError("encoder vector has a non-numeric entry");
        row.push_back(x.get<double>());
      }
      if (!out.empty() && row.size() != out.front().size()) throw ProtocolError("encoder vectors differ in dimension");
      out.push_back(std::move(row));
    }
    return out;
  }

  std::string name() const override { return "remote"; }

 private:
  detail::Endpoint endpoint_;
  detail::HttpOptions opts_;
};

}  // namespace metasumm
