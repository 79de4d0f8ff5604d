#pragma once

#include <array>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "metasumm/metamodel/dataset.hpp"
#include "metasumm/metamodel/predictor.hpp"

namespace metasumm {

/// Mean over records and outputs of the squared error.
inline double evaluate_mse(const Predictor& p, const MetaDataset& test) {
  if (test.empty()) throw DataError("cannot evaluate on an empty dataset");
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : test.records) {
    const auto y = p.predict(r.features);
    if (y.size() != r.targets.size()) throw DimensionError("predictor and dataset target widths differ");
    for (std::size_t o = 0; o < y.size(); ++o) {
      const double e = y[o] - r.targets[o];
      sum += e * e;
    }
    count += y.size();
  }
  return sum / static_cast<double>(count);
}

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct ClassificationReport {
  std::array<ClassMetrics, kNumSummarizers> per_class{};
  ClassMetrics macro_avg;
  ClassMetrics weighted_avg;
  double accuracy = 0.0;
  std::size_t total = 0;
  std::array<std::array<std::size_t, kNumSummarizers>, kNumSummarizers> confusion{};  // [true][predicted]
};

/// True class: argmax of the true targets. Predicted class: recommend().
/// Support counts records by true class.
inline ClassificationReport classification_report(const Predictor& p, const MetaDataset& test) {
  ClassificationReport rep;
  rep.total = test.size();
  for (const auto& r : test.records) {
    const auto t = index_of(true_class(r));
    const auto q = index_of(recommend(p, r.features));
    ++rep.confusion[t][q];
  }
  std::size_t correct = 0;
  for (std::size_t c = 0; c < kNumSummarizers; ++c) {
    std::size_t predicted = 0, actual = 0;
    for (std::size_t k = 0; k < kNumSummarizers; ++k) {
      predicted += rep.confusion[k][c];
      actual += rep.confusion[c][k];
    }
    const auto tp = rep.confusion[c][c];
    correct += tp;
    auto& m = rep.per_class[c];
    m.support = actual;
    m.precision = predicted ? static_cast<double>(tp) / static_cast<double>(predicted) : 0.0;
    m.recall = actual ? static_cast<double>(tp) / static_cast<double>(actual) : 0.0;
    m.f1 = m.precision + m.recall > 0 ? 2 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    rep.macro_avg.precision += m.precision / kNumSummarizers;
    rep.macro_avg.recall += m.recall / kNumSummarizers;
    rep.macro_avg.f1 += m.f1 / kNumSummarizers;
    if (rep.total) {
      const double w = static_cast<double>(actual) / static_cast<double>(rep.total);
      rep.weighted_avg.precision += w * m.precision;
      rep.weighted_avg.recall += w * m.recall;
      rep.weighted_avg.f1 += w * m.f1;
    }
  }
  rep.macro_avg.support = rep.weighted_avg.support = rep.total;
  rep.accuracy = rep.total ? static_cast<double>(correct) / static_cast<double>(rep.total) : 0.0;
  return rep;
}

using RecommendationCounts = std::array<std::size_t, kNumSummarizers>;

inline RecommendationCounts recommendation_frequencies(const Predictor& p, const MetaDataset& docs) {
  RecommendationCounts counts{};
  for (const auto& r : docs.records) ++counts[index_of(recommend(p, r.features))];
  return counts;
}

struct RougeRow {
  std::string model;
  double rouge1 = 0, rouge2 = 0, rougeL = 0, rougeLsum = 0;  // mean F1
  double aggregate = 0;                                    // 100 x mean of the four

  void finish(std::size_t n) {
    for (double* v : {&rouge1, &rouge2, &rougeL, &rougeLsum}) *v /= static_cast<double>(n);
    aggregate = 100.0 * (rouge1 + rouge2 + rougeL + rougeLsum) / 4.0;
  }
};

/// Mean ROUGE F1s per fixed summarizer, for the meta-selected summaries,
/// and for the oracle that selects by true targets. `rouge` must cover
/// every record of `test` (matched by id).
inline std::vector<RougeRow> final_rouge_comparison(const MetaDataset& test, std::span<const EngineRouge> rouge,
                                                    const Predictor& p) {
  if (test.empty()) throw DataError("cannot compare on an empty dataset");
  std::map<std::string, const EngineRouge*> by_id;
  for (const auto& r : rouge) by_id[r.id] = &r;
  std::vector<RougeRow> rows;
  for (auto id : kAllSummarizers) rows.push_back({std::string(to_string(id))});
  rows.push_back({"meta_model"});
  rows.push_back({"oracle"});
  auto add = [](RougeRow& row, const std::array<double, 4>& f) {
    row.rouge1 += f[0];
    row.rouge2 += f[1];
    row.rougeL += f[2];
    row.rougeLsum += f[3];
  };
  for (const auto& rec : test.records) {
    const auto it = by_id.find(rec.id);
    if (it == by_id.end()) throw DataError("no engine ROUGE scores for '" + rec.id + "'");
    const auto& er = *it->second;
    for (std::size_t e = 0; e < kNumSummarizers; ++e) add(rows[e], er.f1[e]);
    add(rows[kNumSummarizers], er.f1[index_of(recommend(p, rec.features))]);
    add(rows[kNumSummarizers + 1], er.f1[index_of(true_class(rec))]);
  }
  for (auto& row : rows) row.finish(test.size());
  return rows;
}

// ---- tables ----

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const {
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
  }

  /// First column left-aligned, the rest right-aligned.
  std::string text() const {
    std::vector<std::size_t> width(header.size(), 0);
    auto measure = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) {
        width[i] = std::max(width[i], display_width(cells[i]));
      }
    };
    measure(header);
    for (const auto& r : rows) measure(r);
    std::ostringstream out;
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::string pad(width[i] - display_width(cells[i]), ' ');
        if (i) out << "  ";
        out << (i == 0 ? cells[i] + pad : pad + cells[i]);
      }
      out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return out.str();
  }

 private:
  static std::size_t display_width(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
  }
};

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << v;
  return out.str();
}

inline Table mse_table(const std::vector<std::pair<std::string, double>>& rows) {
  Table t{{"model", "mse"}, {}};
  for (const auto& [name, mse] : rows) t.rows.push_back({name, fixed(mse)});
  return t;
}

inline Table classification_table(const ClassificationReport& rep) {
  Table t{{"class", "precision", "recall", "f1", "support"}, {}};
  auto row = [&](const std::string& name, const ClassMetrics& m) {
    t.rows.push_back({name, fixed(m.precision), fixed(m.recall), fixed(m.f1), std::to_string(m.support)});
  };
  for (auto id : kAllSummarizers) row(std::string(to_string(id)), rep.per_class[index_of(id)]);
  t.rows.push_back({"accuracy", "", "", fixed(rep.accuracy), std::to_string(rep.total)});
  row("macro_avg", rep.macro_avg);
  row("weighted_avg", rep.weighted_avg);
  return t;
}

inline Table frequency_table(const RecommendationCounts& counts) {
  Table t{{"summarizer", "count"}, {}};
  std::size_t total = 0;
  for (auto id : kAllSummarizers) {
    t.rows.push_back({std::string(to_string(id)), std::to_string(counts[index_of(id)])});
    total += counts[index_of(id)];
  }
  t.rows.push_back({"total", std::to_string(total)});
  return t;
}

inline Table rouge_table(const std::vector<RougeRow>& rows) {
  Table t{{"model", "rouge1", "rouge2", "rougeL", "rougeLsum", "aggregate"}, {}};
  for (const auto& r : rows) {
    t.rows.push_back({r.model, fixed(r.rouge1), fixed(r.rouge2), fixed(r.rougeL), fixed(r.rougeLsum), fixed(r.aggregate)});
  }
  return t;
}

}  // namespace metasumm
