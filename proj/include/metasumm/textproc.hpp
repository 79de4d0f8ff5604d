#pragma once

// Sentence segmentation, tokenization and normalization shared by the ROUGE
// scorer, the summarizers and the document embedder.

#include <algorithm>
#include <cstddef>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "metasumm/detail/unicode.hpp"
#include "metasumm/error.hpp"

namespace metasumm {

struct Token {
  std::string surface;
  std::string normalized;
  std::size_t begin = 0;  // byte offsets into the tokenized text
  std::size_t end = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

struct Sentence {
  std::size_t index = 0;
  std::string text;
  std::vector<Token> tokens;
  std::size_t begin = 0;  // byte offsets of `text` within the document
  std::size_t end = 0;
};

struct Document {
  std::string id;
  std::string raw_text;
  std::optional<std::string> reference_summary;
  std::vector<Sentence> sentences;
  std::size_t token_count = 0;

  bool empty() const { return sentences.empty(); }
};

enum class LengthClass { Short, Long };

inline constexpr std::size_t kDefaultLengthThreshold = 512;

inline std::string_view to_string(LengthClass c) { return c == LengthClass::Long ? "long" : "short"; }

inline LengthClass parse_length_class(std::string_view s) {
  if (s == "long") return LengthClass::Long;
  if (s == "short") return LengthClass::Short;
  throw DataError("unknown length class '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Word lists

/// Reads a UTF-8 word list: one entry per line, `#` starts a comment, blank
/// lines are ignored, entries are lowercased.
inline std::set<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open word list '" + path + "'");
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r\n");
    words.insert(detail::to_lower(std::string_view(line).substr(first, last - first + 1)));
  }
  return words;
}

inline const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> words = {
      // Slovene function words
      "in", "je", "da", "se", "na", "za", "so", "v", "z", "s", "pa", "ki", "ne", "bi", "tudi", "po",
      "od", "do", "kot", "ali", "ter", "to", "ta", "pri", "iz", "o", "k", "h", "sem", "smo", "ste",
      "bo", "bodo", "ga", "jih", "mu", "jo", "ker", "če", "saj", "še", "že",
      // English function words
      "the", "a", "an", "and", "or", "of", "to", "is", "are", "was", "were", "be", "it", "its",
      "this", "that", "on", "at", "by", "for", "with", "as", "from"};
  return words;
}

inline const std::set<std::string>& default_abbreviations() {
  static const std::set<std::string> abbrevs = {
      "dr", "mr", "mrs", "ms", "prof", "st", "jr", "sr", "vs", "etc", "npr", "itd", "ipd",
      "tj", "oz", "mag", "doc", "gl", "str", "št", "jan", "feb", "avg", "sept", "okt", "nov", "dec"};
  return abbrevs;
}

// ---------------------------------------------------------------------------
// Tokenization

/// Maximal runs of letters/digits, in surface order. `normalized` is the
/// lowercased surface.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t pos = 0;
  std::size_t start = std::string_view::npos;
  auto flush = [&](std::size_t end) {
    if (start == std::string_view::npos) return;
    Token t;
    t.surface = std::string(text.substr(start, end - start));
    t.normalized = detail::to_lower(t.surface);
    t.begin = start;
    t.end = end;
    tokens.push_back(std::move(t));
    start = std::string_view::npos;
  };
  while (pos < text.size()) {
    const auto d = detail::decode_utf8(text, pos);
    if (detail::is_word_char(d.cp)) {
      if (start == std::string_view::npos) start = pos;
    } else {
      flush(pos);
    }
    pos += d.length;
  }
  flush(text.size());
  return tokens;
}

// ---------------------------------------------------------------------------
// Sentence segmentation

/// Rule-based splitter: a sentence ends after a run of `.`, `!` or `?`
/// (plus trailing closing quotes/brackets) when whitespace follows and the
/// next sentence starts with an uppercase letter, optionally behind an
/// opening quote or bracket. A lone `.` after a listed abbreviation never
/// ends a sentence.
class SentenceSplitter {
 public:
  SentenceSplitter() : abbreviations_(default_abbreviations()) {}
  explicit SentenceSplitter(std::set<std::string> abbreviations)
      : abbreviations_(normalize_abbreviations(std::move(abbreviations))) {}

  const std::set<std::string>& abbreviations() const { return abbreviations_; }

  std::vector<Sentence> split(std::string_view text) const {
    std::vector<Sentence> out;
    std::size_t sentence_start = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto d = detail::decode_utf8(text, pos);
      if (!is_terminator(d.cp)) {
        pos += d.length;
        continue;
      }
      const std::size_t run_start = pos;
      std::size_t run_len = 0;
      while (pos < text.size()) {
        const auto t = detail::decode_utf8(text, pos);
        if (!is_terminator(t.cp)) break;
        pos += t.length;
        ++run_len;
      }
      while (pos < text.size()) {
        const auto c = detail::decode_utf8(text, pos);
        if (!is_closing(c.cp)) break;
        pos += c.length;
      }
      const std::size_t boundary = pos;
      if (run_len == 1 && text[run_start] == '.' && is_abbreviation(text, run_start)) continue;
      if (!starts_new_sentence(text, boundary)) continue;
      emit(text, sentence_start, boundary, out);
      sentence_start = boundary;
    }
    emit(text, sentence_start, text.size(), out);
    return out;
  }

 private:
  static std::set<std::string> normalize_abbreviations(std::set<std::string> in) {
    std::set<std::string> out;
    for (const auto& a : in) {
      std::string s = detail::to_lower(a);
      while (!s.empty() && s.back() == '.') s.pop_back();
      if (!s.empty()) out.insert(s);
    }
    return out;
  }

  static bool is_terminator(char32_t cp) { return cp == U'.' || cp == U'!' || cp == U'?'; }

  static bool is_closing(char32_t cp) {
    return cp == U'"' || cp == U'\'' || cp == U')' || cp == U']' || cp == 0x201D || cp == 0x2019 ||
           cp == 0xBB || cp == 0x201C;
  }

  static bool is_opening(char32_t cp) {
    return cp == U'"' || cp == U'\'' || cp == U'(' || cp == U'[' || cp == 0x201E || cp == 0x201C ||
           cp == 0x2018 || cp == 0xAB;
  }

  bool is_abbreviation(std::string_view text, std::size_t dot) const {
    std::size_t begin = dot;
    while (begin > 0) {
      // step back one code point
      std::size_t prev = begin - 1;
      while (prev > 0 && (static_cast<unsigned char>(text[prev]) & 0xC0) == 0x80) --prev;
      if (!detail::is_word_char(detail::decode_utf8(text, prev).cp)) break;
      begin = prev;
    }
    if (begin == dot) return false;
    return abbreviations_.count(detail::to_lower(text.substr(begin, dot - begin))) > 0;
  }

  static bool starts_new_sentence(std::string_view text, std::size_t pos) {
    bool saw_space = false;
    while (pos < text.size()) {
      const auto d = detail::decode_utf8(text, pos);
      if (!detail::is_space(d.cp)) break;
      saw_space = true;
      pos += d.length;
    }
    if (!saw_space || pos >= text.size()) return false;
    auto d = detail::decode_utf8(text, pos);
    if (is_opening(d.cp)) {
      pos += d.length;
      if (pos >= text.size()) return false;
      d = detail::decode_utf8(text, pos);
    }
    return detail::is_upper(d.cp);
  }

  static void emit(std::string_view text, std::size_t begin, std::size_t end, std::vector<Sentence>& out) {
    while (begin < end) {
      const auto d = detail::decode_utf8(text, begin);
      if (!detail::is_space(d.cp)) break;
      begin += d.length;
    }
    while (end > begin) {
      std::size_t prev = end - 1;
      while (prev > begin && (static_cast<unsigned char>(text[prev]) & 0xC0) == 0x80) --prev;
      if (!detail::is_space(detail::decode_utf8(text, prev).cp)) break;
      end = prev;
    }
    if (begin >= end) return;
    Sentence s;
    s.index = out.size();
    s.text = std::string(text.substr(begin, end - begin));
    s.tokens = tokenize(s.text);
    s.begin = begin;
    s.end = end;
    out.push_back(std::move(s));
  }

  std::set<std::string> abbreviations_;
};

inline std::vector<Sentence> segment_sentences(std::string_view raw_text) {
  static const SentenceSplitter splitter;
  return splitter.split(raw_text);
}

inline std::vector<Sentence> segment_sentences(std::string_view raw_text, const SentenceSplitter& splitter) {
  return splitter.split(raw_text);
}

inline Document make_document(std::string id, std::string raw_text,
                              std::optional<std::string> reference_summary = std::nullopt,
                              const SentenceSplitter& splitter = SentenceSplitter()) {
  Document doc;
  doc.id = std::move(id);
  doc.raw_text = std::move(raw_text);
  doc.reference_summary = std::move(reference_summary);
  doc.sentences = splitter.split(doc.raw_text);
  for (const auto& s : doc.sentences) doc.token_count += s.tokens.size();
  return doc;
}

/// Builds a document whose sentences are given explicitly.
inline Document make_document_from_sentences(std::string id, const std::vector<std::string>& sentences) {
  Document doc;
  doc.id = std::move(id);
  for (const auto& text : sentences) {
    if (!doc.raw_text.empty()) doc.raw_text += ' ';
    Sentence s;
    s.index = doc.sentences.size();
    s.begin = doc.raw_text.size();
    doc.raw_text += text;
    s.end = doc.raw_text.size();
    s.text = text;
    s.tokens = tokenize(text);
    doc.token_count += s.tokens.size();
    doc.sentences.push_back(std::move(s));
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Normalization

using Lemmatizer = std::function<std::string(std::string_view)>;

/// Named lemmatizers. `identity` is always present; callers may register
/// their own (for example a wrapper around an external morphological tool).
class LemmatizerRegistry {
 public:
  static LemmatizerRegistry& instance() {
    static LemmatizerRegistry registry;
    return registry;
  }

  void add(const std::string& name, Lemmatizer fn) {
    std::lock_guard lock(mutex_);
    entries_[name] = std::move(fn);
  }

  Lemmatizer get(const std::string& name) const {
    std::lock_guard lock(mutex_);
    auto it = entries_.find(name);
    if (it == entries_.end()) throw ConfigError("unknown lemmatizer '" + name + "'");
    return it->second;
  }

  bool contains(const std::string& name) const {
    std::lock_guard lock(mutex_);
    return entries_.count(name) > 0;
  }

 private:
  LemmatizerRegistry() {
    entries_["identity"] = [](std::string_view w) { return std::string(w); };
  }

  mutable std::mutex mutex_;
  std::map<std::string, Lemmatizer> entries_;
};

struct NormalizationConfig {
  bool lowercase = true;
  std::set<std::string> stopwords = default_stopwords();
  std::string lemmatizer = "identity";

  static NormalizationConfig without_stopwords() {
    NormalizationConfig c;
    c.stopwords.clear();
    return c;
  }
};

/// Recomputes `normalized` from each surface (lowercase, then lemmatize) and
/// drops stopwords. The result is a subsequence of the input.
inline std::vector<Token> normalize(std::span<const Token> tokens, const NormalizationConfig& cfg) {
  const Lemmatizer lemmatize = LemmatizerRegistry::instance().get(cfg.lemmatizer);
  std::vector<Token> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    std::string form = cfg.lowercase ? detail::to_lower(t.surface) : t.surface;
    form = lemmatize(form);
    if (form.empty()) continue;
    if (cfg.stopwords.count(detail::to_lower(form)) > 0) continue;
    Token n = t;
    n.normalized = std::move(form);
    out.push_back(std::move(n));
  }
  return out;
}

/// Normalized word forms of a whole document, in order.
inline std::vector<std::string> normalized_words(const Document& doc, const NormalizationConfig& cfg) {
  std::vector<std::string> words;
  words.reserve(doc.token_count);
  for (const auto& s : doc.sentences) {
    for (auto& t : normalize(s.tokens, cfg)) words.push_back(std::move(t.normalized));
  }
  return words;
}

inline LengthClass classify_length(const Document& doc, std::size_t threshold = kDefaultLengthThreshold) {
  if (threshold == 0) throw ConfigError("length threshold must be positive");
  return doc.token_count > threshold ? LengthClass::Long : LengthClass::Short;
}

}  // namespace metasumm
