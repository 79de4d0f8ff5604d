#pragma once

// Graph-based extractive summarizer: sentences ranked by centrality on the
// cosine-similarity graph of their encodings.

#include <algorithm>
#include <memory>
#include <numeric>
#include <vector>

#include "metasumm/summarizers/centrality.hpp"
#include "metasumm/summarizers/encoder.hpp"
#include "metasumm/summarizers/sumbasic.hpp"

namespace metasumm {

class GraphSummarizer {
 public:
  GraphSummarizer() : encoder_(std::make_shared<TfidfEncoder>()) {}
  explicit GraphSummarizer(std::shared_ptr<const SentenceEncoder> encoder, CentralityConfig cfg = {})
      : encoder_(std::move(encoder)), cfg_(cfg) {}

  const SentenceEncoder& encoder() const { return *encoder_; }
  const CentralityConfig& centrality_config() const { return cfg_; }

  /// Centrality of each sentence on the graph without self-loops.
  CentralityScores score(const Document& doc) const {
    auto sim = cosine_similarity_matrix(encoder_->encode(doc.sentences));
    for (std::size_t i = 0; i < sim.size(); ++i) sim[i][i] = 0.0;
    return centrality(sim, cfg_);
  }

  SummaryResult summarize(const Document& doc, const SummaryBudget& budget) const {
    budget.validate();
    if (doc.empty()) throw DataError("empty input");
    return select(doc, score(doc).scores, budget);
  }

  /// Takes sentences by descending score (ties: lowest index) until the
  /// next one would overflow the budget; at least one is always taken.
  static SummaryResult select(const Document& doc, const std::vector<double>& scores, const SummaryBudget& budget) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
    std::vector<std::size_t> picked;
    std::size_t used = 0;
    for (std::size_t i : order) {
      const std::size_t length = doc.sentences[i].tokens.size();
      if (!picked.empty() && used + length > budget.target_words) break;
      picked.push_back(i);
      used += length;
    }
    return detail::extractive_result(doc, SummarizerId::graph_based, std::move(picked));
  }

 private:
  std::shared_ptr<const SentenceEncoder> encoder_;
  CentralityConfig cfg_;
};

inline SummaryResult graph_summarize(const Document& doc, const SummaryBudget& budget = {}) {
  return GraphSummarizer().summarize(doc, budget);
}

}  // namespace metasumm
