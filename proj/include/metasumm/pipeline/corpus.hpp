#pragma once

// JSON-lines corpora: one object per line, {"id", "text", "summary"?}.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <regex>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "metasumm/error.hpp"
#include "metasumm/textproc.hpp"

namespace metasumm {

struct CorpusRecord {
  std::string id;
  std::string text;
  std::optional<std::string> summary;
};

enum class SummarySource { Field, FirstParagraph };

inline SummarySource parse_summary_source(std::string_view s) {
  if (s == "field" || s == "summary") return SummarySource::Field;
  if (s == "first-paragraph" || s == "first_paragraph") return SummarySource::FirstParagraph;
  throw ConfigError("unknown summary source '" + std::string(s) + "' (expected field or first-paragraph)");
}

inline std::string_view to_string(SummarySource s) {
  return s == SummarySource::FirstParagraph ? "first-paragraph" : "field";
}

inline nlohmann::json to_json(const CorpusRecord& r) {
  nlohmann::json j{{"id", r.id}, {"text", r.text}};
  if (r.summary) j["summary"] = *r.summary;
  return j;
}

/// Splits off the leading paragraph (up to the first blank line). Returns
/// nullopt when there is no second paragraph.
inline std::optional<std::pair<std::string, std::string>> split_first_paragraph(const std::string& text) {
  static const std::regex blank_line(R"(\r?\n[ \t]*\r?\n\s*)");
  std::smatch m;
  if (!std::regex_search(text, m, blank_line)) return std::nullopt;
  auto head = text.substr(0, static_cast<std::size_t>(m.position(0)));
  auto rest = text.substr(static_cast<std::size_t>(m.position(0) + m.length(0)));
  if (tokenize(head).empty() || tokenize(rest).empty()) return std::nullopt;
  return std::make_pair(std::move(head), std::move(rest));
}

struct CorpusReadResult {
  std::vector<CorpusRecord> records;
  std::vector<std::string> skipped;  // ids with no usable first paragraph
};

/// Validates every line: object, string non-empty "id" and "text", optional
/// string or null "summary", unique ids. Blank lines are ignored.
inline CorpusReadResult read_corpus(std::istream& in, SummarySource source = SummarySource::Field) {
  CorpusReadResult out;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto fail = [&](const std::string& what) -> DataError {
      return DataError("corpus line " + std::to_string(line_no) + ": " + what);
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error&) {
      throw fail("not valid JSON");
    }
    if (!j.is_object()) throw fail("expected a JSON object");
    if (!j.contains("id") || !j["id"].is_string() || j["id"].get<std::string>().empty()) {
      throw fail("missing or non-string \"id\"");
    }
    if (!j.contains("text") || !j["text"].is_string()) throw fail("missing or non-string \"text\"");
    CorpusRecord r{j["id"].get<std::string>(), j["text"].get<std::string>(), std::nullopt};
    if (tokenize(r.text).empty()) throw fail("\"text\" is empty");
    if (j.contains("summary") && !j["summary"].is_null()) {
      if (!j["summary"].is_string()) throw fail("\"summary\" must be a string");
      r.summary = j["summary"].get<std::string>();
    }
    if (!seen.insert(r.id).second) throw fail("duplicate id '" + r.id + "'");
    if (source == SummarySource::FirstParagraph && !r.summary) {
      auto parts = split_first_paragraph(r.text);
      if (!parts) {
        out.skipped.push_back(r.id);
        continue;
      }
      r.summary = std::move(parts->first);
      r.text = std::move(parts->second);
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

inline CorpusReadResult read_corpus(const std::string& path, SummarySource source = SummarySource::Field) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus '" + path + "'");
  return read_corpus(in, source);
}

inline void write_corpus(std::span<const CorpusRecord> records, std::ostream& out) {
  for (const auto& r : records) out << to_json(r).dump() << '\n';
}

inline std::vector<Document> to_documents(std::span<const CorpusRecord> records) {
  std::vector<Document> docs;
  docs.reserve(records.size());
  for (const auto& r : records) docs.push_back(make_document(r.id, r.text, r.summary));
  return docs;
}

struct IngestStats {
  std::size_t documents = 0;
  std::size_t with_summary = 0;
  std::size_t skipped = 0;
  std::size_t min_tokens = 0, max_tokens = 0, median_tokens = 0, p90_tokens = 0;
  double mean_tokens = 0.0;
  std::size_t length_threshold = kDefaultLengthThreshold;
  std::size_t short_docs = 0, long_docs = 0;
  double long_ratio = 0.0;  // long / documents
};

/// Median and p90 use the nearest-rank method.
inline IngestStats compute_ingest_stats(std::span<const Document> docs, std::size_t skipped = 0,
                                        std::size_t length_threshold = kDefaultLengthThreshold) {
  IngestStats s;
  s.documents = docs.size();
  s.skipped = skipped;
  s.length_threshold = length_threshold;
  if (docs.empty()) return s;
  std::vector<std::size_t> counts;
  for (const auto& d : docs) {
    counts.push_back(d.token_count);
    s.with_summary += d.reference_summary.has_value();
    (classify_length(d, length_threshold) == LengthClass::Long ? s.long_docs : s.short_docs) += 1;
  }
  std::sort(counts.begin(), counts.end());
  auto rank = [&](double q) {
    const auto r = static_cast<std::size_t>(std::ceil(q * static_cast<double>(counts.size())));
    return counts[std::clamp<std::size_t>(r, 1, counts.size()) - 1];
  };
  s.min_tokens = counts.front();
  s.max_tokens = counts.back();
  s.median_tokens = rank(0.5);
  s.p90_tokens = rank(0.9);
  double sum = 0;
  for (auto c : counts) sum += static_cast<double>(c);
  s.mean_tokens = sum / static_cast<double>(counts.size());
  s.long_ratio = static_cast<double>(s.long_docs) / static_cast<double>(s.documents);
  return s;
}

inline nlohmann::json to_json(const IngestStats& s) {
  return {{"documents", s.documents},
          {"with_summary", s.with_summary},
          {"skipped", s.skipped},
          {"tokens",
           {{"min", s.min_tokens},
            {"max", s.max_tokens},
            {"mean", s.mean_tokens},
            {"median", s.median_tokens},
            {"p90", s.p90_tokens}}},
          {"length_threshold", s.length_threshold},
          {"short", s.short_docs},
          {"long", s.long_docs},
          {"long_ratio", s.long_ratio}};
}

}  // namespace metasumm
