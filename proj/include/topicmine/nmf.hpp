#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "topicmine/types.hpp"
#include "topicmine/vectorize.hpp"

namespace topicmine {

/// X ~= doc_topic * topic_term, both factors nonnegative.
struct NmfModel {
  Matrix doc_topic;   // D x K
  Matrix topic_term;  // K x V
  /// Objective after initialization, then after each iteration.
  std::vector<double> objective_trace;
  int k = 0;
  std::uint64_t seed = 0;
  int iterations = 0;
  bool converged = false;
};

struct NmfOptions {
  int max_iter = 300;
  double tol = 1e-6;
  std::uint64_t seed = 0;
  /// Added to update denominators.
  double epsilon = 1e-12;
};

/// Entries at or below this after NNDSVD are raised to it, since
/// multiplicative updates can never move an exact zero.
inline constexpr double kNndsvdFloor = 1e-12;

struct NmfFactors {
  Matrix doc_topic;
  Matrix topic_term;
};

/// NNDSVD initialization from the k leading singular triplets of x.
/// Throws ConfigError unless 1 <= k <= min(D, V), InputError for negative
/// entries, NumericalError if the SVD fails.
NmfFactors nndsvd_init(const SparseMatrix& x, int k);

/// 0.5 * ||x - doc_topic * topic_term||_F^2. Throws DimensionError on shape
/// mismatch.
double nmf_objective(const SparseMatrix& x, const Matrix& doc_topic, const Matrix& topic_term);

/// Multiplicative updates from an NNDSVD start. Works on any nonnegative
/// matrix; tf-idf is what the pipeline passes in.
NmfModel fit_nmf(const SparseMatrix& x, int k, const NmfOptions& options = {});
NmfModel fit_nmf(const DocTermMatrix& x, int k, const NmfOptions& options = {});

/// Multiplicative updates from caller-supplied factors.
NmfModel fit_nmf_from(const SparseMatrix& x, NmfFactors init, const NmfOptions& options = {});

/// Rescales topic_term rows to unit L2 norm, moving the scale into the
/// matching doc_topic columns. The product is unchanged.
void normalize_topic_rows(NmfModel& model);

}  // namespace topicmine
