#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace topicmine {

/// One report as loaded from disk, before any text processing.
struct RawDocument {
  std::string doc_id;
  std::string company_id;
  std::string text;
  std::optional<int> year;
  std::optional<std::string> report_type;
  std::optional<std::string> category;
};

/// The cleaned token stream of a document. `empty` is set when nothing
/// survived preprocessing; such documents are kept so counts reconcile.
struct TokenizedDocument {
  std::string doc_id;
  std::vector<std::string> tokens;
  bool empty = false;
};

enum class CorpusFormat { kJsonl, kTextDir };

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);

struct Corpus {
  std::vector<RawDocument> documents;
  std::vector<std::string> warnings;
};

/// Loads a corpus. JSONL: one object per line with doc_id, company_id, text
/// and optional year, report_type, category. Text-dir: every *.txt file is a
/// document named by its stem, with companies from `manifest` (defaults to
/// manifest.csv inside the directory). Documents keep file order; text-dir
/// files are taken in filename order.
///
/// Throws CorpusError on unreadable paths, malformed records (with line
/// number), duplicate doc_id, or text that is blank after trimming.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const std::optional<std::filesystem::path>& manifest = std::nullopt);

/// Metadata filter applied before preprocessing. Unset fields match all.
struct MetadataFilter {
  std::optional<int> year_min;
  std::optional<int> year_max;
  std::optional<std::string> category;
  std::optional<std::string> report_type;

  bool matches(const RawDocument& doc) const;
};

std::vector<RawDocument> filter_documents(std::span<const RawDocument> docs,
                                          const MetadataFilter& filter);

/// The 179-word English list compiled in from data/stopwords_english.txt.
const std::vector<std::string>& english_stopwords();

/// Domain stop-words added on top of the English list.
const std::vector<std::string>& default_extra_stopwords();

struct StopwordList {
  std::set<std::string, std::less<>> base;
  std::set<std::string, std::less<>> extra;

  /// English base list plus the 13 domain extras.
  static StopwordList defaults();

  bool contains(std::string_view word) const;
};

/// Splits on anything that is not a letter or digit, drops pieces that
/// contain a digit or are shorter than three letters, and lowercases the
/// rest. Letters are Unicode letters; length is counted in code points.
std::vector<std::string> tokenize(std::string_view text);

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens,
                                          const StopwordList& stops);

/// Porter stemmer, following the reference implementation published by
/// Martin Porter (words of one or two letters are returned unchanged).
/// Tokens containing anything outside a-z are returned as-is.
std::string stem(std::string_view token);

/// tokenize, then remove_stopwords, then stem.
TokenizedDocument preprocess(const RawDocument& doc, const StopwordList& stops);

/// Runs preprocess over all documents, using up to `jobs` threads. Output
/// order always matches input order.
std::vector<TokenizedDocument> preprocess_all(std::span<const RawDocument> docs,
                                              const StopwordList& stops,
                                              std::size_t jobs = 1);

}  // namespace topicmine
