#include <cmath>
#include <random>
#include <string>

#include <boost/math/special_functions/digamma.hpp>

#include "parallel.hpp"
#include "topicmine/error.hpp"
#include "topicmine/lda.hpp"

namespace topicmine {
namespace {

using boost::math::digamma;

// Documents are processed in fixed-size chunks whose partial statistics are
// summed in chunk order, so results do not depend on the thread count.
constexpr std::size_t kChunk = 32;

struct DocWords {
  std::vector<Eigen::Index> ids;
  std::vector<double> counts;
};

std::vector<DocWords> doc_words(const SparseMatrix& x) {
  std::vector<DocWords> docs(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index d = 0; d < x.outerSize(); ++d) {
    auto& doc = docs[static_cast<std::size_t>(d)];
    for (SparseMatrix::InnerIterator it(x, d); it; ++it) {
      if (it.value() == 0.0) continue;
      doc.ids.push_back(it.col());
      doc.counts.push_back(it.value());
    }
  }
  return docs;
}

// E[log theta] or E[log beta] for one Dirichlet row.
Vector dirichlet_expectation(const Eigen::Ref<const Vector>& params) {
  const double total = digamma(params.sum());
  Vector out(params.size());
  for (Eigen::Index i = 0; i < params.size(); ++i) out[i] = digamma(params[i]) - total;
  return out;
}

Matrix dirichlet_expectation_rows(const Matrix& params) {
  Matrix out(params.rows(), params.cols());
  for (Eigen::Index r = 0; r < params.rows(); ++r) out.row(r) = dirichlet_expectation(params.row(r).transpose()).transpose();
  return out;
}

double log_sum_exp(const Vector& v) {
  const double m = v.maxCoeff();
  return m + std::log((v.array() - m).exp().sum());
}

double corpus_elbo(const std::vector<DocWords>& docs, const Matrix& gamma, const Matrix& lambda,
                   double alpha, double beta) {
  const Eigen::Index k = lambda.rows();
  const Eigen::Index v = lambda.cols();
  const Matrix elog_beta = dirichlet_expectation_rows(lambda);

  double total = 0.0;
  Vector scratch(k);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    const Vector g = gamma.row(static_cast<Eigen::Index>(d)).transpose();
    const Vector elog_theta = dirichlet_expectation(g);
    double doc_term = 0.0;
    const auto& doc = docs[d];
    for (std::size_t n = 0; n < doc.ids.size(); ++n) {
      scratch = elog_theta + elog_beta.col(doc.ids[n]);
      doc_term += doc.counts[n] * log_sum_exp(scratch);
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      doc_term += (alpha - g[j]) * elog_theta[j] + std::lgamma(g[j]);
    }
    doc_term += std::lgamma(alpha * static_cast<double>(k)) - std::lgamma(g.sum()) -
                static_cast<double>(k) * std::lgamma(alpha);
    total += doc_term;
  }

  for (Eigen::Index j = 0; j < k; ++j) {
    double topic_term = 0.0;
    for (Eigen::Index w = 0; w < v; ++w) {
      topic_term += (beta - lambda(j, w)) * elog_beta(j, w) + std::lgamma(lambda(j, w));
    }
    topic_term += std::lgamma(beta * static_cast<double>(v)) - std::lgamma(lambda.row(j).sum()) -
                  static_cast<double>(v) * std::lgamma(beta);
    total += topic_term;
  }
  return total;
}

void validate_counts(const DocTermMatrix& tf) {
  if (tf.weighting != Weighting::kTf) {
    throw InputError("LDA needs a tf-weighted matrix, got " + std::string(to_string(tf.weighting)));
  }
  for (Eigen::Index d = 0; d < tf.values.outerSize(); ++d) {
    double row_total = 0.0;
    for (SparseMatrix::InnerIterator it(tf.values, d); it; ++it) {
      if (it.value() < 0.0 || it.value() != std::floor(it.value())) {
        throw InputError("LDA input has a non-integer or negative count at (" + std::to_string(d) +
                         ", " + std::to_string(it.col()) + ")");
      }
      row_total += it.value();
    }
    if (row_total == 0.0) throw InputError("LDA input row " + std::to_string(d) + " is empty");
  }
}

Matrix row_normalized(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index r = 0; r < out.rows(); ++r) out.row(r) /= out.row(r).sum();
  return out;
}

}  // namespace

LdaModel fit_lda(const DocTermMatrix& tf, const LdaConfig& config) {
  const Eigen::Index n_docs = tf.docs();
  const Eigen::Index n_terms = tf.terms();
  const int k = config.k;
  if (k < 1) throw ConfigError("LDA needs k >= 1");
  if (k > n_docs) {
    throw ConfigError("LDA k=" + std::to_string(k) + " exceeds document count " + std::to_string(n_docs));
  }
  const double alpha = config.resolved_alpha();
  const double beta = config.resolved_beta();
  if (!(alpha > 0.0) || !(beta > 0.0)) throw ConfigError("LDA priors must be positive");
  if (config.max_iter < 1) throw ConfigError("LDA max_iter must be positive");
  validate_counts(tf);

  const auto docs = doc_words(tf.values);

  std::mt19937_64 rng(config.seed);
  std::gamma_distribution<double> noise(100.0, 0.01);
  Matrix lambda(k, n_terms);
  for (Eigen::Index j = 0; j < k; ++j) {
    for (Eigen::Index w = 0; w < n_terms; ++w) lambda(j, w) = noise(rng);
  }

  Matrix gamma(n_docs, k);
  for (Eigen::Index d = 0; d < n_docs; ++d) {
    const auto& doc = docs[static_cast<std::size_t>(d)];
    double length = 0.0;
    for (double c : doc.counts) length += c;
    gamma.row(d).setConstant(alpha + length / k);
  }

  LdaModel model;
  model.config = config;
  model.config.alpha = alpha;
  model.config.beta = beta;

  const std::size_t n_chunks = (docs.size() + kChunk - 1) / kChunk;
  std::vector<Matrix> chunk_stats(n_chunks);

  double previous = 0.0;
  for (int iter = 1; iter <= config.max_iter; ++iter) {
    const Matrix exp_elog_beta = dirichlet_expectation_rows(lambda).array().exp().matrix();

    detail::parallel_for(n_chunks, config.jobs, [&](std::size_t c) {
      Matrix& stats = chunk_stats[c];
      stats.setZero(k, n_terms);
      Vector exp_elog_theta(k);
      Vector next(k);
      std::vector<double> ratio;
      const std::size_t end = std::min(docs.size(), (c + 1) * kChunk);
      for (std::size_t d = c * kChunk; d < end; ++d) {
        const auto& doc = docs[d];
        const auto row = static_cast<Eigen::Index>(d);
        ratio.assign(doc.ids.size(), 0.0);
        for (int inner = 0; inner < config.e_step_max_iter; ++inner) {
          exp_elog_theta = dirichlet_expectation(gamma.row(row).transpose()).array().exp();
          next.setZero();
          for (std::size_t n = 0; n < doc.ids.size(); ++n) {
            const auto beta_w = exp_elog_beta.col(doc.ids[n]);
            const double phinorm = exp_elog_theta.dot(beta_w) + 1e-100;
            ratio[n] = doc.counts[n] / phinorm;
            next += ratio[n] * beta_w;
          }
          next = (alpha + exp_elog_theta.array() * next.array()).matrix();
          const double change = (next.transpose() - gamma.row(row)).cwiseAbs().mean();
          gamma.row(row) = next.transpose();
          if (change < config.e_step_tol) break;
        }
        // Responsibilities that produced the final gamma.
        for (std::size_t n = 0; n < doc.ids.size(); ++n) {
          const Eigen::Index w = doc.ids[n];
          stats.col(w) += ratio[n] * exp_elog_theta.cwiseProduct(exp_elog_beta.col(w));
        }
      }
    });

    lambda.setConstant(beta);
    for (const auto& stats : chunk_stats) lambda += stats;

    const double bound = corpus_elbo(docs, gamma, lambda, alpha, beta);
    if (!std::isfinite(bound)) {
      throw NumericalError("LDA bound became non-finite at iteration " + std::to_string(iter));
    }
    model.elbo_trace.push_back(bound);
    model.iterations = iter;
    if (iter > 1 && std::abs(bound - previous) <= config.tol * std::abs(previous)) {
      model.converged = true;
      break;
    }
    previous = bound;
  }

  model.doc_dirichlet = std::move(gamma);
  model.topic_dirichlet = std::move(lambda);
  model.doc_topic = row_normalized(model.doc_dirichlet);
  model.topic_term = row_normalized(model.topic_dirichlet);
  return model;
}

double lda_elbo(const LdaModel& model, const DocTermMatrix& tf) {
  if (model.doc_dirichlet.rows() != tf.docs() || model.topic_dirichlet.cols() != tf.terms() ||
      model.doc_dirichlet.cols() != model.topic_dirichlet.rows()) {
    throw DimensionError("lda_elbo: model is " + std::to_string(model.doc_dirichlet.rows()) + "x" +
                         std::to_string(model.topic_dirichlet.cols()) + ", matrix is " +
                         std::to_string(tf.docs()) + "x" + std::to_string(tf.terms()));
  }
  return corpus_elbo(doc_words(tf.values), model.doc_dirichlet, model.topic_dirichlet,
                     model.config.resolved_alpha(), model.config.resolved_beta());
}

}  // namespace topicmine
