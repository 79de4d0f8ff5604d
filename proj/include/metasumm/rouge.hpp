#pragma once

// ROUGE-N, ROUGE-L and summary-level ROUGE-Lsum (union LCS), reported as
// precision/recall/F1. Zero denominators yield 0, never NaN.

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metasumm/textproc.hpp"

namespace metasumm {

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static PrecisionRecallF1 from_counts(std::size_t hits, std::size_t candidate_total,
                                       std::size_t reference_total) {
    PrecisionRecallF1 r;
    r.precision = candidate_total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(candidate_total);
    r.recall = reference_total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(reference_total);
    r.f1 = (r.precision + r.recall) > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
    return r;
  }

  friend bool operator==(const PrecisionRecallF1&, const PrecisionRecallF1&) = default;
};

struct RougeSuite {
  PrecisionRecallF1 rouge1;
  PrecisionRecallF1 rouge2;
  PrecisionRecallF1 rougeL;
  PrecisionRecallF1 rougeLsum;

  std::array<double, 4> f1s() const { return {rouge1.f1, rouge2.f1, rougeL.f1, rougeLsum.f1}; }

  friend bool operator==(const RougeSuite&, const RougeSuite&) = default;
};

using TokenSeq = std::span<const std::string>;

namespace detail {

inline std::map<std::vector<std::string>, std::size_t> ngram_counts(TokenSeq tokens, std::size_t n) {
  std::map<std::vector<std::string>, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

/// suffix[i][j] = LCS length of a[i:] and b[j:].
inline std::vector<std::vector<std::size_t>> lcs_suffix_table(TokenSeq a, TokenSeq b) {
  std::vector<std::vector<std::size_t>> t(a.size() + 1, std::vector<std::size_t>(b.size() + 1, 0));
  for (std::size_t i = a.size(); i-- > 0;) {
    for (std::size_t j = b.size(); j-- > 0;) {
      t[i][j] = a[i] == b[j] ? t[i + 1][j + 1] + 1 : std::max(t[i + 1][j], t[i][j + 1]);
    }
  }
  return t;
}

}  // namespace detail

inline std::size_t lcs_length(TokenSeq a, TokenSeq b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Positions in `reference` of one canonical LCS alignment with `candidate`:
/// the alignment whose reference positions are lexicographically smallest.
inline std::vector<std::size_t> lcs_reference_positions(TokenSeq reference, TokenSeq candidate) {
  const auto t = detail::lcs_suffix_table(reference, candidate);
  std::vector<std::size_t> positions;
  std::size_t i = 0, j = 0;
  while (i < reference.size() && j < candidate.size()) {
    if (reference[i] == candidate[j]) {
      positions.push_back(i);
      ++i;
      ++j;
    } else if (t[i][j + 1] == t[i][j]) {
      ++j;  // keep reference position i available
    } else {
      ++i;
    }
  }
  return positions;
}

inline PrecisionRecallF1 rouge_n(TokenSeq candidate, TokenSeq reference, std::size_t n) {
  if (n == 0) throw ConfigError("rouge_n requires n >= 1");
  const auto cand = detail::ngram_counts(candidate, n);
  const auto ref = detail::ngram_counts(reference, n);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    if (auto it = ref.find(gram); it != ref.end()) overlap += std::min(count, it->second);
  }
  const std::size_t cand_total = candidate.size() >= n ? candidate.size() - n + 1 : 0;
  const std::size_t ref_total = reference.size() >= n ? reference.size() - n + 1 : 0;
  return PrecisionRecallF1::from_counts(overlap, cand_total, ref_total);
}

inline PrecisionRecallF1 rouge_l(TokenSeq candidate, TokenSeq reference) {
  return PrecisionRecallF1::from_counts(lcs_length(candidate, reference), candidate.size(), reference.size());
}

/// Summary-level LCS. For each reference sentence the union of its canonical
/// LCS positions against every candidate sentence is taken; each unioned
/// token is a hit while both the candidate and reference still have an
/// unconsumed occurrence of that word.
inline PrecisionRecallF1 rouge_lsum(std::span<const std::vector<std::string>> candidate,
                                    std::span<const std::vector<std::string>> reference) {
  std::map<std::string, std::size_t> cand_left, ref_left;
  std::size_t cand_total = 0, ref_total = 0;
  for (const auto& s : candidate) {
    for (const auto& w : s) ++cand_left[w];
    cand_total += s.size();
  }
  for (const auto& s : reference) {
    for (const auto& w : s) ++ref_left[w];
    ref_total += s.size();
  }
  std::size_t hits = 0;
  for (const auto& ref_sentence : reference) {
    std::vector<bool> in_union(ref_sentence.size(), false);
    for (const auto& cand_sentence : candidate) {
      for (std::size_t p : lcs_reference_positions(ref_sentence, cand_sentence)) in_union[p] = true;
    }
    for (std::size_t p = 0; p < ref_sentence.size(); ++p) {
      if (!in_union[p]) continue;
      const auto& w = ref_sentence[p];
      auto c = cand_left.find(w);
      auto r = ref_left.find(w);
      if (c != cand_left.end() && r != ref_left.end() && c->second > 0 && r->second > 0) {
        ++hits;
        --c->second;
        --r->second;
      }
    }
  }
  return PrecisionRecallF1::from_counts(hits, cand_total, ref_total);
}

/// Lowercased alphanumeric tokens, grouped by sentence.
inline std::vector<std::vector<std::string>> rouge_sentences(std::string_view text) {
  std::vector<std::vector<std::string>> out;
  for (const auto& s : segment_sentences(text)) {
    std::vector<std::string> words;
    words.reserve(s.tokens.size());
    for (const auto& t : s.tokens) words.push_back(t.normalized);
    out.push_back(std::move(words));
  }
  return out;
}

inline RougeSuite rouge_suite(std::string_view candidate, std::string_view reference) {
  const auto cand_sentences = rouge_sentences(candidate);
  const auto ref_sentences = rouge_sentences(reference);
  std::vector<std::string> cand, ref;
  for (const auto& s : cand_sentences) cand.insert(cand.end(), s.begin(), s.end());
  for (const auto& s : ref_sentences) ref.insert(ref.end(), s.begin(), s.end());
  RougeSuite suite;
  suite.rouge1 = rouge_n(cand, ref, 1);
  suite.rouge2 = rouge_n(cand, ref, 2);
  suite.rougeL = rouge_l(cand, ref);
  suite.rougeLsum = rouge_lsum(cand_sentences, ref_sentences);
  return suite;
}

/// 100 x mean of the four F1 scores.
inline double aggregate_score(const RougeSuite& suite) {
  const auto f = suite.f1s();
  return 100.0 * (f[0] + f[1] + f[2] + f[3]) / 4.0;
}

}  // namespace metasumm
