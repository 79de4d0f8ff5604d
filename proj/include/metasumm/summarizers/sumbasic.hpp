#pragma once

// SumBasic: greedy sentence selection by mean word probability, squaring the
// probability of every word in a chosen sentence to penalize redundancy.

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "metasumm/summarizers/summarizer_id.hpp"
#include "metasumm/textproc.hpp"

namespace metasumm {

using WordProbabilityTable = std::map<std::string, double>;

struct SumBasicRound {
  std::vector<double> weights;  // per sentence; already selected sentences are 0
  std::size_t picked = 0;
  WordProbabilityTable probabilities_after;
};

struct SumBasicTrace {
  WordProbabilityTable initial;
  std::vector<SumBasicRound> rounds;
};

namespace detail {

/// Joins the chosen sentences in document order.
inline SummaryResult extractive_result(const Document& doc, SummarizerId id, std::vector<std::size_t> picked) {
  std::sort(picked.begin(), picked.end());
  SummaryResult r;
  r.summarizer = id;
  for (std::size_t i : picked) {
    if (!r.text.empty()) r.text += ' ';
    r.text += doc.sentences[i].text;
  }
  r.selected_sentence_indices = std::move(picked);
  return r;
}

inline std::size_t argmax_lowest_index(const std::vector<double>& values, const std::vector<bool>& excluded) {
  std::size_t best = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (excluded[i]) continue;
    if (best == values.size() || values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace detail

class SumBasic {
 public:
  SumBasic() = default;
  explicit SumBasic(NormalizationConfig cfg) : cfg_(std::move(cfg)) {}

  const NormalizationConfig& normalization() const { return cfg_; }

  SummaryResult summarize(const Document& doc, const SummaryBudget& budget, SumBasicTrace* trace = nullptr) const {
    budget.validate();
    if (doc.empty()) throw DataError("empty input");

    std::vector<std::vector<std::string>> words(doc.sentences.size());
    WordProbabilityTable p;
    std::size_t total = 0;
    for (std::size_t i = 0; i < doc.sentences.size(); ++i) {
      for (auto& t : normalize(doc.sentences[i].tokens, cfg_)) words[i].push_back(std::move(t.normalized));
      for (const auto& w : words[i]) p[w] += 1.0;
      total += words[i].size();
    }
    for (auto& [w, v] : p) v /= static_cast<double>(total);
    if (trace != nullptr) trace->initial = p;

    std::vector<bool> selected(doc.sentences.size(), false);
    std::vector<std::size_t> picked;
    std::size_t used_words = 0;
    while (picked.size() < doc.sentences.size()) {
      std::vector<double> weights(doc.sentences.size(), 0.0);
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (selected[i] || words[i].empty()) continue;
        double sum = 0.0;
        for (const auto& w : words[i]) sum += p.at(w);
        weights[i] = sum / static_cast<double>(words[i].size());
      }
      const std::size_t best = detail::argmax_lowest_index(weights, selected);
      const std::size_t length = doc.sentences[best].tokens.size();
      if (!picked.empty() && used_words + length > budget.target_words) break;

      selected[best] = true;
      picked.push_back(best);
      used_words += length;
      for (const auto& w : std::set<std::string>(words[best].begin(), words[best].end())) {
        p[w] = p[w] * p[w];
      }
      if (trace != nullptr) trace->rounds.push_back({std::move(weights), best, p});
    }
    return detail::extractive_result(doc, SummarizerId::sumbasic, std::move(picked));
  }

 private:
  NormalizationConfig cfg_;
};

inline SummaryResult sumbasic(const Document& doc, const SummaryBudget& budget = {},
                              const NormalizationConfig& cfg = {}) {
  return SumBasic(cfg).summarize(doc, budget);
}

}  // namespace metasumm
