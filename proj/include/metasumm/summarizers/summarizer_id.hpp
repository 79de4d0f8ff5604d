#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metasumm/error.hpp"

namespace metasumm {

/// The four engines, in the canonical order shared with meta-dataset target columns.
enum class SummarizerId : std::size_t { sumbasic = 0, graph_based = 1, t5_article = 2, hybrid_long = 3 };

inline constexpr std::size_t kNumSummarizers = 4;

inline constexpr std::array<SummarizerId, kNumSummarizers> kAllSummarizers = {
    SummarizerId::sumbasic, SummarizerId::graph_based, SummarizerId::t5_article, SummarizerId::hybrid_long};

constexpr std::size_t index_of(SummarizerId id) { return static_cast<std::size_t>(id); }

inline SummarizerId summarizer_at(std::size_t index) {
  if (index >= kNumSummarizers) throw DimensionError("summarizer index out of range");
  return kAllSummarizers[index];
}

inline std::string_view to_string(SummarizerId id) {
  switch (id) {
    case SummarizerId::sumbasic: return "sumbasic";
    case SummarizerId::graph_based: return "graph_based";
    case SummarizerId::t5_article: return "t5_article";
    case SummarizerId::hybrid_long: return "hybrid_long";
  }
  return "?";
}

/// Accepts canonical names and the short CLI aliases (graph, t5, hybrid).
inline SummarizerId parse_summarizer(std::string_view name) {
  if (name == "sumbasic") return SummarizerId::sumbasic;
  if (name == "graph_based" || name == "graph" || name == "graph-based") return SummarizerId::graph_based;
  if (name == "t5_article" || name == "t5" || name == "t5-article") return SummarizerId::t5_article;
  if (name == "hybrid_long" || name == "hybrid" || name == "hybrid-long") return SummarizerId::hybrid_long;
  throw ConfigError("unknown summarizer '" + std::string(name) + "'");
}

struct SummaryResult {
  SummarizerId summarizer = SummarizerId::sumbasic;
  std::string text;
  std::optional<std::vector<std::size_t>> selected_sentence_indices;
};

struct SummaryBudget {
  std::size_t target_words = 80;

  void validate() const {
    if (target_words == 0) throw ConfigError("summary budget must be positive");
  }
};

}  // namespace metasumm
