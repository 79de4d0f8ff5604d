#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "metasumm/summarizers/centrality.hpp"
#include "metasumm/textproc.hpp"

namespace metasumm {

using Vector = std::vector<double>;

/// Maps the sentences of one document to fixed-dimension vectors.
class SentenceEncoder {
 public:
  virtual ~SentenceEncoder() = default;
  virtual std::vector<Vector> encode(std::span<const Sentence> sentences) const = 0;
  virtual std::string name() const = 0;
};

/// Bag-of-words TF-IDF over the document's own vocabulary, L2-normalized.
/// idf = ln((1 + n) / (1 + df)) + 1.
class TfidfEncoder final : public SentenceEncoder {
 public:
  TfidfEncoder() = default;
  explicit TfidfEncoder(NormalizationConfig cfg) : cfg_(std::move(cfg)) {}

  std::vector<Vector> encode(std::span<const Sentence> sentences) const override {
    if (sentences.empty()) throw DataError("encode_sentences requires at least one sentence");
    std::vector<std::map<std::string, double>> tf(sentences.size());
    std::map<std::string, std::size_t> df;
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      for (const auto& t : normalize(sentences[i].tokens, cfg_)) tf[i][t.normalized] += 1.0;
      for (const auto& [w, c] : tf[i]) ++df[w];
    }
    std::map<std::string, std::size_t> column;
    for (const auto& [w, d] : df) column.emplace(w, column.size());

    const double n = static_cast<double>(sentences.size());
    std::vector<Vector> out(sentences.size(), Vector(column.size(), 0.0));
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      double norm = 0.0;
      for (const auto& [w, c] : tf[i]) {
        const double idf = std::log((1.0 + n) / (1.0 + static_cast<double>(df.at(w)))) + 1.0;
        const double v = c * idf;
        out[i][column.at(w)] = v;
        norm += v * v;
      }
      if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& v : out[i]) v /= norm;
      }
    }
    return out;
  }

  std::string name() const override { return "tfidf"; }

 private:
  NormalizationConfig cfg_;
};

inline std::vector<Vector> encode_sentences(std::span<const Sentence> sentences) {
  return TfidfEncoder().encode(sentences);
}

inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionError("cosine of vectors with different dimensions");
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na <= 0.0 || nb <= 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

/// Pairwise cosine similarities clamped to [0, 1]. Zero vectors have zero
/// similarity to everything, including themselves.
inline SimilarityMatrix cosine_similarity_matrix(const std::vector<Vector>& vectors) {
  const std::size_t n = vectors.size();
  SimilarityMatrix sim(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double c = std::clamp(cosine(vectors[i], vectors[j]), 0.0, 1.0);
      sim[i][j] = sim[j][i] = c;
    }
    bool nonzero = false;
    for (double v : vectors[i]) nonzero = nonzero || v != 0.0;
    if (nonzero) sim[i][i] = 1.0;
  }
  return sim;
}

}  // namespace metasumm
