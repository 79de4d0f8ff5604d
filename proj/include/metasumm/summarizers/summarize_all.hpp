#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>

#include "metasumm/summarizers/abstractive_client.hpp"
#include "metasumm/summarizers/graph.hpp"
#include "metasumm/summarizers/sumbasic.hpp"

namespace metasumm {

/// Extract with the graph summarizer up to the abstractive input cap, then
/// summarize the extract abstractively.
inline SummaryResult hybrid_long(const Document& doc, const AbstractiveClient& client,
                                 const GraphSummarizer& graph = GraphSummarizer()) {
  if (doc.empty()) throw DataError("empty input");
  const auto extract = graph.summarize(doc, SummaryBudget{client.config().max_input_tokens});
  SummaryResult r;
  r.summarizer = SummarizerId::hybrid_long;
  r.text = client.summarize_text(extract.text);
  return r;
}

inline SummaryResult hybrid_long(const Document& doc, const AbstractiveClientConfig& cfg) {
  return hybrid_long(doc, AbstractiveClient(cfg));
}

/// Outcome of one engine on one document: a result or an error message.
struct EngineOutcome {
  std::optional<SummaryResult> result;
  std::string error;
  bool transport_failure = false;

  bool ok() const { return result.has_value(); }
};

using SummarizerOutcomes = std::array<EngineOutcome, kNumSummarizers>;

/// The four engines behind one interface. The abstractive client is optional;
/// without it the abstractive engines report an error.
class SummarizerSuite {
 public:
  SummarizerSuite() = default;
  SummarizerSuite(SumBasic sumbasic, GraphSummarizer graph, std::optional<AbstractiveClient> abstractive,
                  SummaryBudget budget)
      : sumbasic_(std::move(sumbasic)),
        graph_(std::move(graph)),
        abstractive_(std::move(abstractive)),
        budget_(budget) {}

  const SummaryBudget& budget() const { return budget_; }
  const GraphSummarizer& graph() const { return graph_; }
  bool has_abstractive() const { return abstractive_.has_value(); }

  SummaryResult run(SummarizerId id, const Document& doc) const {
    switch (id) {
      case SummarizerId::sumbasic: return sumbasic_.summarize(doc, budget_);
      case SummarizerId::graph_based: return graph_.summarize(doc, budget_);
      case SummarizerId::t5_article: return require_abstractive().summarize(doc);
      case SummarizerId::hybrid_long: return hybrid_long(doc, require_abstractive(), graph_);
    }
    throw ConfigError("unknown summarizer");
  }

  /// Runs all four engines. Failures are recorded per engine, never dropped.
  SummarizerOutcomes run_all(const Document& doc) const {
    if (doc.empty()) throw DataError("empty input");
    SummarizerOutcomes out;
    for (auto id : kAllSummarizers) {
      auto& slot = out[index_of(id)];
      try {
        slot.result = run(id, doc);
      } catch (const TransportError& e) {
        slot.error = e.what();
        slot.transport_failure = true;
      } catch (const Error& e) {
        slot.error = e.what();
      }
    }
    return out;
  }

 private:
  const AbstractiveClient& require_abstractive() const {
    if (!abstractive_) throw ConfigError("abstractive endpoint is not configured");
    return *abstractive_;
  }

  SumBasic sumbasic_;
  GraphSummarizer graph_;
  std::optional<AbstractiveClient> abstractive_;
  SummaryBudget budget_;
};

inline SummarizerOutcomes summarize_all(const Document& doc, const SummarizerSuite& suite) {
  return suite.run_all(doc);
}

}  // namespace metasumm
