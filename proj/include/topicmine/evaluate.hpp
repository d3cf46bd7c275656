#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "topicmine/types.hpp"
#include "topicmine/vectorize.hpp"

namespace topicmine {

/// Hard topic label per entity (document or company).
struct Assignment {
  std::vector<std::string> entity_ids;
  std::vector<int> labels;
  int k = 0;

  /// Entities per topic; empty topics show up as zeros.
  std::vector<std::int64_t> topic_sizes() const;
};

/// Label = smallest column index attaining the row maximum. Throws
/// InputError for an empty matrix, NaN entries, or an id count that does not
/// match the row count.
Assignment argmax_assign(const Matrix& weights, std::span<const std::string> ids);

enum class DistanceMetric { kEuclidean };

std::string_view to_string(DistanceMetric metric);

struct SilhouetteResult {
  std::vector<double> per_sample;
  double mean = 0.0;
  int k = 0;
  DistanceMetric distance = DistanceMetric::kEuclidean;
};

/// Per-sample (b - a) / max(a, b). a is the mean distance to the other
/// members of the sample's cluster, b the smallest mean distance to another
/// non-empty cluster. Members of singleton clusters score 0.
/// Throws InputError when fewer than two samples or fewer than two distinct
/// labels are present.
SilhouetteResult silhouette(const Matrix& points, std::span<const int> labels,
                            DistanceMetric metric = DistanceMetric::kEuclidean);

/// The n highest-weight terms of each topic row, ties broken by term
/// string. Throws ConfigError when n exceeds the vocabulary size.
std::vector<std::vector<std::string>> top_keywords(const Matrix& topic_term, const Vocabulary& vocab,
                                                   std::size_t n = 30);

struct GroupTerms {
  /// One list per topic, ranked by summed tf over the topic's documents.
  std::vector<std::vector<std::string>> terms;
  /// True for topics with no documents (their list is empty).
  std::vector<bool> empty;
};

/// Throws ConfigError when n exceeds the vocabulary size and DimensionError
/// when the assignment does not cover every row of tf.
GroupTerms group_frequent_terms(const DocTermMatrix& tf, const Assignment& assignment,
                                const Vocabulary& vocab, std::size_t n = 30);

struct KeywordMatch {
  /// |model ∩ group| / n per topic; unset for empty groups.
  std::vector<std::optional<double>> per_topic;
  /// Mean over the defined topics; unset when none is defined.
  std::optional<double> mean;
};

/// Throws InputError when a non-empty group list and its keyword list differ
/// in length, or when the topic counts differ.
KeywordMatch keyword_match_ratio(const std::vector<std::vector<std::string>>& model_keywords,
                                 const std::vector<std::vector<std::string>>& group_terms);

struct Decisiveness {
  double value = 0.0;
  /// Rows that were all zero and left out of the mean.
  std::vector<Eigen::Index> skipped_rows;
};

/// Mean over rows of the population standard deviation of each
/// L1-normalized row. Ranges from 0 (uniform rows) to sqrt(K-1)/K (one-hot).
/// Throws ConfigError for K < 2 and InputError if every row is zero or an
/// entry is negative or not finite.
Decisiveness decisiveness(const Matrix& doc_topic);

/// companies x K table of document counts per (company, label).
Eigen::MatrixXi company_topic_crosstab(std::span<const std::int64_t> doc_company,
                                       std::int64_t n_companies, const Assignment& docs);

enum class Method { kLda, kNmf, kNtf };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct SilhouetteSummary {
  std::optional<double> mean;
  /// Why the score is missing, when it is.
  std::string notice;
};

/// Everything computed for one (method, K) cell.
struct EvaluationReport {
  Method method = Method::kLda;
  int k = 0;
  std::int64_t n_docs = 0;
  SilhouetteSummary doc_silhouette;
  std::optional<SilhouetteSummary> company_silhouette;  // tensor model only
  std::size_t keyword_n = 0;
  KeywordMatch keyword_match;
  std::optional<Decisiveness> decisiveness;
  std::string decisiveness_notice;
  std::vector<std::int64_t> topic_sizes;
  std::vector<std::int64_t> company_topic_sizes;  // tensor model only
  std::vector<std::string> company_ids;
  Eigen::MatrixXi crosstab;
  std::vector<std::string> notices;
};

nlohmann::ordered_json to_json(const EvaluationReport& report);

}  // namespace topicmine
