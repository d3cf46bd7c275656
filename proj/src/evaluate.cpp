#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "topicmine/error.hpp"
#include "topicmine/evaluate.hpp"
#include "topicmine/export.hpp"

namespace topicmine {
namespace {

// Highest weight first, ties by term string.
std::vector<std::string> rank_terms(const std::vector<double>& weights, const Vocabulary& vocab,
                                    std::size_t n) {
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto better = [&](std::size_t a, std::size_t b) {
    if (weights[a] != weights[b]) return weights[a] > weights[b];
    return vocab.index_to_term[a] < vocab.index_to_term[b];
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(), better);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(vocab.index_to_term[order[i]]);
  return out;
}

void check_n(std::size_t n, const Vocabulary& vocab) {
  if (n > vocab.size()) {
    throw ConfigError("asked for " + std::to_string(n) + " terms from a vocabulary of " +
                      std::to_string(vocab.size()));
  }
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(output_rounded(*v)) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json silhouette_json(const SilhouetteSummary& s) {
  nlohmann::ordered_json j;
  j["mean"] = optional_number(s.mean);
  j["metric"] = to_string(DistanceMetric::kEuclidean);
  if (!s.notice.empty()) j["notice"] = s.notice;
  return j;
}

}  // namespace

std::vector<std::int64_t> Assignment::topic_sizes() const {
  std::vector<std::int64_t> sizes(static_cast<std::size_t>(k), 0);
  for (int label : labels) ++sizes[static_cast<std::size_t>(label)];
  return sizes;
}

Assignment argmax_assign(const Matrix& weights, std::span<const std::string> ids) {
  if (weights.rows() == 0 || weights.cols() == 0) throw InputError("argmax_assign: empty matrix");
  if (static_cast<Eigen::Index>(ids.size()) != weights.rows()) {
    throw InputError("argmax_assign: " + std::to_string(ids.size()) + " ids for " +
                     std::to_string(weights.rows()) + " rows");
  }
  if (weights.hasNaN()) throw InputError("argmax_assign: matrix contains NaN");

  Assignment a;
  a.entity_ids.assign(ids.begin(), ids.end());
  a.k = static_cast<int>(weights.cols());
  a.labels.reserve(ids.size());
  for (Eigen::Index r = 0; r < weights.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < weights.cols(); ++c) {
      if (weights(r, c) > weights(r, best)) best = c;
    }
    a.labels.push_back(static_cast<int>(best));
  }
  return a;
}

std::string_view to_string(DistanceMetric) { return "euclidean"; }

SilhouetteResult silhouette(const Matrix& points, std::span<const int> labels, DistanceMetric metric) {
  const auto n = static_cast<std::size_t>(points.rows());
  if (labels.size() != n) throw InputError("silhouette: label count does not match point count");
  if (n < 2) throw InputError("silhouette needs at least two samples");

  std::map<int, std::size_t> cluster_index;
  for (int label : labels) cluster_index.emplace(label, 0);
  if (cluster_index.size() < 2) throw InputError("silhouette is undefined for a single cluster");
  std::size_t next = 0;
  for (auto& [label, index] : cluster_index) index = next++;
  const std::size_t n_clusters = cluster_index.size();

  std::vector<std::size_t> cluster(n);
  std::vector<std::size_t> cluster_size(n_clusters, 0);
  for (std::size_t i = 0; i < n; ++i) {
    cluster[i] = cluster_index.at(labels[i]);
    ++cluster_size[cluster[i]];
  }

  SilhouetteResult result;
  result.distance = metric;
  result.k = static_cast<int>(n_clusters);
  result.per_sample.resize(n);
  std::vector<double> sums(n_clusters);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = cluster[i];
    if (cluster_size[own] == 1) {
      result.per_sample[i] = 0.0;
      continue;
    }
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      sums[cluster[j]] += (points.row(static_cast<Eigen::Index>(i)) - points.row(static_cast<Eigen::Index>(j))).norm();
    }
    const double a = sums[own] / static_cast<double>(cluster_size[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (c == own) continue;
      b = std::min(b, sums[c] / static_cast<double>(cluster_size[c]));
    }
    const double denom = std::max(a, b);
    result.per_sample[i] = denom > 0.0 ? (b - a) / denom : 0.0;
  }
  double total = 0.0;
  for (double s : result.per_sample) total += s;
  result.mean = total / static_cast<double>(n);
  return result;
}

std::vector<std::vector<std::string>> top_keywords(const Matrix& topic_term, const Vocabulary& vocab,
                                                   std::size_t n) {
  check_n(n, vocab);
  if (topic_term.cols() != static_cast<Eigen::Index>(vocab.size())) {
    throw DimensionError("top_keywords: topic-term matrix has " + std::to_string(topic_term.cols()) +
                         " columns for a vocabulary of " + std::to_string(vocab.size()));
  }
  std::vector<std::vector<std::string>> out;
  std::vector<double> weights(vocab.size());
  for (Eigen::Index k = 0; k < topic_term.rows(); ++k) {
    for (std::size_t t = 0; t < weights.size(); ++t) weights[t] = topic_term(k, static_cast<Eigen::Index>(t));
    out.push_back(rank_terms(weights, vocab, n));
  }
  return out;
}

GroupTerms group_frequent_terms(const DocTermMatrix& tf, const Assignment& assignment,
                                const Vocabulary& vocab, std::size_t n) {
  check_n(n, vocab);
  if (static_cast<Eigen::Index>(assignment.labels.size()) != tf.docs()) {
    throw DimensionError("group_frequent_terms: assignment covers " +
                         std::to_string(assignment.labels.size()) + " of " +
                         std::to_string(tf.docs()) + " documents");
  }
  const auto k = static_cast<std::size_t>(assignment.k);
  std::vector<std::vector<double>> totals(k, std::vector<double>(vocab.size(), 0.0));
  std::vector<bool> populated(k, false);
  for (Eigen::Index d = 0; d < tf.values.outerSize(); ++d) {
    const auto label = static_cast<std::size_t>(assignment.labels[static_cast<std::size_t>(d)]);
    populated[label] = true;
    for (SparseMatrix::InnerIterator it(tf.values, d); it; ++it) {
      totals[label][static_cast<std::size_t>(it.col())] += it.value();
    }
  }
  GroupTerms out;
  for (std::size_t g = 0; g < k; ++g) {
    out.empty.push_back(!populated[g]);
    out.terms.push_back(populated[g] ? rank_terms(totals[g], vocab, n) : std::vector<std::string>{});
  }
  return out;
}

KeywordMatch keyword_match_ratio(const std::vector<std::vector<std::string>>& model_keywords,
                                 const std::vector<std::vector<std::string>>& group_terms) {
  if (model_keywords.size() != group_terms.size()) {
    throw InputError("keyword_match_ratio: " + std::to_string(model_keywords.size()) +
                     " keyword lists for " + std::to_string(group_terms.size()) + " groups");
  }
  KeywordMatch out;
  double total = 0.0;
  std::size_t defined = 0;
  for (std::size_t t = 0; t < model_keywords.size(); ++t) {
    const auto& keywords = model_keywords[t];
    const auto& group = group_terms[t];
    if (group.empty()) {
      out.per_topic.emplace_back();
      continue;
    }
    if (keywords.size() != group.size()) {
      throw InputError("keyword_match_ratio: topic " + std::to_string(t) + " has " +
                       std::to_string(keywords.size()) + " keywords but " +
                       std::to_string(group.size()) + " group terms");
    }
    const std::set<std::string> a(keywords.begin(), keywords.end());
    const std::set<std::string> b(group.begin(), group.end());
    std::vector<std::string> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    const double ratio = static_cast<double>(common.size()) / static_cast<double>(group.size());
    out.per_topic.emplace_back(ratio);
    total += ratio;
    ++defined;
  }
  if (defined > 0) out.mean = total / static_cast<double>(defined);
  return out;
}

Decisiveness decisiveness(const Matrix& doc_topic) {
  const Eigen::Index k = doc_topic.cols();
  if (k < 2) throw ConfigError("decisiveness needs K >= 2");
  if (!doc_topic.allFinite() || (doc_topic.array() < 0.0).any()) {
    throw InputError("decisiveness: entries must be finite and nonnegative");
  }
  Decisiveness out;
  double total = 0.0;
  std::size_t used = 0;
  for (Eigen::Index r = 0; r < doc_topic.rows(); ++r) {
    const double sum = doc_topic.row(r).sum();
    if (sum == 0.0) {
      out.skipped_rows.push_back(r);
      continue;
    }
    const auto p = (doc_topic.row(r) / sum).array();
    const double mean = p.sum() / static_cast<double>(k);
    total += std::sqrt((p - mean).square().sum() / static_cast<double>(k));
    ++used;
  }
  if (used == 0) throw InputError("decisiveness: every row is zero");
  out.value = total / static_cast<double>(used);
  return out;
}

Eigen::MatrixXi company_topic_crosstab(std::span<const std::int64_t> doc_company,
                                       std::int64_t n_companies, const Assignment& docs) {
  if (doc_company.size() != docs.labels.size()) {
    throw DimensionError("company_topic_crosstab: company list and assignment differ in length");
  }
  Eigen::MatrixXi table = Eigen::MatrixXi::Zero(n_companies, docs.k);
  for (std::size_t d = 0; d < doc_company.size(); ++d) ++table(doc_company[d], docs.labels[d]);
  return table;
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::kLda:
      return "lda";
    case Method::kNmf:
      return "nmf";
    case Method::kNtf:
      return "ntf";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  if (name == "lda") return Method::kLda;
  if (name == "nmf") return Method::kNmf;
  if (name == "ntf") return Method::kNtf;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected lda, nmf or ntf)");
}

nlohmann::ordered_json to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["method"] = to_string(report.method);
  j["k"] = report.k;
  j["n_docs"] = report.n_docs;
  j["silhouette_documents"] = silhouette_json(report.doc_silhouette);
  if (report.company_silhouette) j["silhouette_companies"] = silhouette_json(*report.company_silhouette);

  nlohmann::ordered_json kw;
  kw["n"] = report.keyword_n;
  kw["per_topic"] = nlohmann::ordered_json::array();
  for (const auto& r : report.keyword_match.per_topic) kw["per_topic"].push_back(optional_number(r));
  kw["mean"] = optional_number(report.keyword_match.mean);
  j["keyword_match"] = kw;

  nlohmann::ordered_json dec;
  if (report.decisiveness) {
    dec["value"] = output_rounded(report.decisiveness->value);
    dec["skipped_rows"] = report.decisiveness->skipped_rows;
  } else {
    dec["value"] = nullptr;
    dec["notice"] = report.decisiveness_notice;
  }
  j["decisiveness"] = dec;

  j["topic_sizes"] = report.topic_sizes;
  if (!report.company_topic_sizes.empty()) j["company_topic_sizes"] = report.company_topic_sizes;
  nlohmann::ordered_json crosstab = nlohmann::ordered_json::array();
  for (Eigen::Index c = 0; c < report.crosstab.rows(); ++c) {
    nlohmann::ordered_json row;
    row["company_id"] = report.company_ids[static_cast<std::size_t>(c)];
    std::vector<int> counts(static_cast<std::size_t>(report.crosstab.cols()));
    for (Eigen::Index t = 0; t < report.crosstab.cols(); ++t) counts[static_cast<std::size_t>(t)] = report.crosstab(c, t);
    row["counts"] = counts;
    crosstab.push_back(row);
  }
  j["company_topic_crosstab"] = crosstab;
  j["notices"] = report.notices;
  return j;
}

}  // namespace topicmine
