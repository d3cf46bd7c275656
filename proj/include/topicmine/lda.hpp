#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "topicmine/types.hpp"
#include "topicmine/vectorize.hpp"

namespace topicmine {

struct LdaConfig {
  int k = 2;
  /// Document-topic Dirichlet prior. Unset means 1/k.
  std::optional<double> alpha;
  /// Topic-word Dirichlet prior. Unset means 1/k.
  std::optional<double> beta;
  int max_iter = 200;
  /// Relative ELBO change below which fitting stops.
  double tol = 1e-6;
  std::uint64_t seed = 0;
  /// Per-document inner loop: stop when the mean absolute change of the
  /// variational Dirichlet drops below this.
  double e_step_tol = 1e-4;
  int e_step_max_iter = 100;
  std::size_t jobs = 1;

  double resolved_alpha() const { return alpha.value_or(1.0 / k); }
  double resolved_beta() const { return beta.value_or(1.0 / k); }
};

/// Batch variational Bayes fit. doc_topic and topic_term are the row
/// normalized variational Dirichlet parameters, which are kept alongside
/// so the bound can be recomputed.
struct LdaModel {
  Matrix doc_topic;         // D x K, rows sum to 1
  Matrix topic_term;        // K x V, rows sum to 1
  Matrix doc_dirichlet;     // gamma, D x K
  Matrix topic_dirichlet;   // lambda, K x V
  std::vector<double> elbo_trace;
  LdaConfig config;
  int iterations = 0;
  bool converged = false;
};

/// Throws ConfigError for k < 1, k > D, non-positive priors; InputError for
/// non-tf weighting, non-integer or negative counts, and all-zero rows.
/// Hitting max_iter is not an error: the model comes back with
/// converged == false.
LdaModel fit_lda(const DocTermMatrix& tf, const LdaConfig& config);

/// Evidence lower bound of `tf` under the model's variational parameters,
/// with the per-word responsibilities optimized out.
double lda_elbo(const LdaModel& model, const DocTermMatrix& tf);

}  // namespace topicmine
