#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "topicmine/corpus.hpp"
#include "topicmine/evaluate.hpp"
#include "topicmine/lda.hpp"
#include "topicmine/nmf.hpp"
#include "topicmine/ntf.hpp"
#include "topicmine/vectorize.hpp"

namespace topicmine {

struct RunConfig {
  std::filesystem::path corpus;
  CorpusFormat format = CorpusFormat::kJsonl;
  std::optional<std::filesystem::path> manifest;
  MetadataFilter filter;
  /// Replaces the default domain stop-words when set.
  std::optional<std::vector<std::string>> extra_stopwords;
  std::int64_t min_df = 1;
  std::vector<Method> methods{Method::kLda, Method::kNmf, Method::kNtf};
  std::vector<int> k_values;
  std::uint64_t seed = 0;
  LdaConfig lda;    // k and seed are filled per cell
  NmfOptions nmf;   // seed is filled per cell
  NtfOptions ntf;   // seed is filled per cell
  std::filesystem::path out = "out";
  std::size_t jobs = 1;
  std::size_t keyword_n = 30;
  double selection_margin = 0.02;

  /// Throws ConfigError on empty or duplicate methods / k values, k < 1,
  /// min_df < 1, jobs < 1, keyword_n < 1 or a negative margin.
  void validate() const;
  StopwordList stopwords() const;
};

/// Reads a config document. Unknown keys are rejected with ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json to_json(const RunConfig& config);

/// Everything the models consume, built once per run.
struct PreparedCorpus {
  std::size_t loaded = 0;
  std::size_t after_filter = 0;
  /// Documents with no in-vocabulary tokens. They are left out of every matrix.
  std::vector<std::string> excluded;
  std::vector<std::string> doc_ids;
  std::vector<TokenizedDocument> docs;
  Vocabulary vocab;
  DocTermMatrix tf;
  DocTermMatrix tfidf;
  DocCompanyTermTensor tensor;
  std::vector<std::string> warnings;
};

/// Filters, preprocesses and vectorizes. Throws CorpusError when nothing
/// usable is left.
PreparedCorpus prepare_corpus(std::span<const RawDocument> docs, const RunConfig& config);

/// One fitted and evaluated (method, K) cell.
struct CellResult {
  Method method = Method::kLda;
  int k = 0;
  Matrix doc_topic;                     // D x K as exported
  Matrix topic_term;                    // K x V
  std::optional<Matrix> company_topic;  // C x K, tensor model only
  Assignment doc_assignment;
  SilhouetteResult doc_silhouette;      // per_sample empty when skipped
  std::optional<SilhouetteResult> company_silhouette;
  std::optional<Assignment> company_assignment;
  std::vector<std::vector<std::string>> keywords;
  GroupTerms group_terms;
  EvaluationReport report;
  nlohmann::ordered_json model_info;    // solver settings and trace
};

/// Fits and evaluates one cell. Model errors propagate unchanged.
CellResult run_cell(const PreparedCorpus& corpus, Method method, int k, const RunConfig& config);

/// Writes out/<method>/k<k>/ for one cell.
void write_cell(const std::filesystem::path& out, const PreparedCorpus& corpus, const CellResult& cell);

struct CellSummary {
  Method method = Method::kLda;
  int k = 0;
  std::optional<double> silhouette;
  std::optional<double> company_silhouette;
  std::optional<double> keyword_match;
  std::optional<double> decisiveness;
  /// Set when the cell failed.
  std::optional<std::string> error;
};

struct MethodChoice {
  Method method = Method::kLda;
  int k = 0;
  std::optional<double> silhouette;
  std::optional<double> keyword_match;
  std::vector<int> candidates;
  std::vector<std::string> notices;
};

struct Selection {
  std::vector<MethodChoice> per_method;
  std::optional<MethodChoice> overall;
};

/// Per method: the Ks whose mean silhouette is within `margin` of the
/// method's best are candidates, and the candidate with the highest keyword
/// match wins (missing values rank lowest, ties go to the smaller K). The
/// overall winner maximizes (silhouette, keyword match) in that order.
/// Failed cells are ignored. Throws InputError for empty input.
Selection select_best(std::span<const CellSummary> summaries, double margin = 0.02);

nlohmann::ordered_json to_json(const Selection& selection);

struct CellRecord {
  CellSummary summary;
  double seconds = 0.0;
};

struct RunManifest {
  RunConfig config;
  std::size_t documents_loaded = 0;
  std::size_t documents_after_filter = 0;
  std::size_t documents_used = 0;
  std::vector<std::string> excluded_documents;
  std::size_t companies = 0;
  std::size_t vocabulary_size = 0;
  std::size_t tf_nnz = 0;
  std::vector<CellRecord> cells;
  Selection selection;
  std::vector<std::string> warnings;
  std::string version;

  bool partial_failure() const;
};

nlohmann::ordered_json to_json(const RunManifest& manifest);

/// Summary CSV bodies, exposed for tests.
std::string silhouette_by_k_csv(std::span<const CellSummary> cells);
std::string keyword_match_by_k_csv(std::span<const CellSummary> cells);
std::string decisiveness_by_method_csv(std::span<const CellSummary> cells, const Selection& selection);

/// Loads the corpus, runs every (method, K) cell and writes all artifacts.
/// Throws ConfigError / CorpusError before any cell runs; cell failures are
/// recorded in the manifest instead of thrown.
RunManifest run_experiment(const RunConfig& config);

/// Same, on documents already in memory (config.corpus is ignored).
RunManifest run_experiment(std::span<const RawDocument> docs, const RunConfig& config);

}  // namespace topicmine
