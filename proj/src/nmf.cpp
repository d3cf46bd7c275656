#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/SVD>

#include "topicmine/error.hpp"
#include "topicmine/nmf.hpp"

namespace topicmine {
namespace {

void check_rank(const SparseMatrix& x, int k) {
  const auto limit = std::min(x.rows(), x.cols());
  if (k < 1 || k > limit) {
    throw ConfigError("NMF k=" + std::to_string(k) + " outside [1, " + std::to_string(limit) + "]");
  }
}

void check_nonnegative(const SparseMatrix& x) {
  for (Eigen::Index r = 0; r < x.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(x, r); it; ++it) {
      if (!(it.value() >= 0.0)) throw InputError("NMF input has a negative or NaN entry");
    }
  }
}

bool all_finite_nonnegative(const Matrix& m) {
  return m.allFinite() && (m.array() >= 0.0).all();
}

}  // namespace

NmfFactors nndsvd_init(const SparseMatrix& x, int k) {
  check_rank(x, k);
  check_nonnegative(x);

  const Eigen::MatrixXd dense = Eigen::MatrixXd(x);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("NNDSVD: SVD did not converge");
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::MatrixXd& u = svd.matrixU();
  const Eigen::MatrixXd& v = svd.matrixV();

  // Singular values this small relative to the largest are rounding noise.
  const double rank_tol = s.size() > 0 ? s[0] * static_cast<double>(std::max(x.rows(), x.cols())) *
                                             std::numeric_limits<double>::epsilon()
                                       : 0.0;

  NmfFactors f;
  f.doc_topic = Matrix::Zero(x.rows(), k);
  f.topic_term = Matrix::Zero(k, x.cols());

  if (s[0] > rank_tol) {
    const double root = std::sqrt(s[0]);
    f.doc_topic.col(0) = root * u.col(0).cwiseAbs();
    f.topic_term.row(0) = root * v.col(0).cwiseAbs().transpose();
  }

  for (int j = 1; j < k; ++j) {
    if (s[j] <= rank_tol) continue;
    const Eigen::VectorXd xp = u.col(j).cwiseMax(0.0);
    const Eigen::VectorXd xn = (-u.col(j)).cwiseMax(0.0);
    const Eigen::VectorXd yp = v.col(j).cwiseMax(0.0);
    const Eigen::VectorXd yn = (-v.col(j)).cwiseMax(0.0);
    const double xp_norm = xp.norm(), yp_norm = yp.norm();
    const double xn_norm = xn.norm(), yn_norm = yn.norm();
    const double mp = xp_norm * yp_norm;
    const double mn = xn_norm * yn_norm;

    // Keep whichever sign section carries more mass.
    Eigen::VectorXd left, right;
    double sigma = 0.0;
    if (mp > mn) {
      left = xp / xp_norm;
      right = yp / yp_norm;
      sigma = mp;
    } else if (mn > 0.0) {
      left = xn / xn_norm;
      right = yn / yn_norm;
      sigma = mn;
    } else {
      continue;
    }
    const double scale = std::sqrt(s[j] * sigma);
    f.doc_topic.col(j) = scale * left;
    f.topic_term.row(j) = scale * right.transpose();
  }

  f.doc_topic = f.doc_topic.cwiseMax(kNndsvdFloor);
  f.topic_term = f.topic_term.cwiseMax(kNndsvdFloor);
  return f;
}

double nmf_objective(const SparseMatrix& x, const Matrix& doc_topic, const Matrix& topic_term) {
  if (doc_topic.rows() != x.rows() || topic_term.cols() != x.cols() ||
      doc_topic.cols() != topic_term.rows()) {
    throw DimensionError("nmf_objective: X is " + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + ", factors are " +
                         std::to_string(doc_topic.rows()) + "x" + std::to_string(doc_topic.cols()) +
                         " and " + std::to_string(topic_term.rows()) + "x" +
                         std::to_string(topic_term.cols()));
  }
  Matrix residual = -(doc_topic * topic_term);
  for (Eigen::Index r = 0; r < x.outerSize(); ++r) {
    for (SparseMatrix::InnerIterator it(x, r); it; ++it) residual(it.row(), it.col()) += it.value();
  }
  return 0.5 * residual.squaredNorm();
}

NmfModel fit_nmf_from(const SparseMatrix& x, NmfFactors init, const NmfOptions& options) {
  check_nonnegative(x);
  if (init.doc_topic.rows() != x.rows() || init.topic_term.cols() != x.cols() ||
      init.doc_topic.cols() != init.topic_term.rows()) {
    throw DimensionError("fit_nmf_from: initial factors do not match X");
  }
  if (!all_finite_nonnegative(init.doc_topic) || !all_finite_nonnegative(init.topic_term)) {
    throw InputError("fit_nmf_from: initial factors must be finite and nonnegative");
  }

  NmfModel model;
  model.k = static_cast<int>(init.doc_topic.cols());
  model.seed = options.seed;
  Matrix& w = init.doc_topic;
  Matrix& h = init.topic_term;
  const double eps = options.epsilon;

  double previous = nmf_objective(x, w, h);
  model.objective_trace.push_back(previous);

  // Lee-Seung updates. The common shorthand W <- W (XH)/(WHH) and
  // H <- H (WX)/(WWH) drops the transposes; with X (D x V) = W (D x K) H (K x V)
  // they are W (X H^T)/(W H H^T) and H (W^T X)/(W^T W H).
  for (int iter = 1; iter <= options.max_iter && previous > 0.0; ++iter) {
    const Matrix xht = x * h.transpose();
    const Matrix hht = h * h.transpose();
    w = (w.array() * xht.array() / ((w * hht).array() + eps)).matrix();

    const Matrix wtx = (x.transpose() * w).transpose();
    const Matrix wtw = w.transpose() * w;
    h = (h.array() * wtx.array() / ((wtw * h).array() + eps)).matrix();

    if (!all_finite_nonnegative(w) || !all_finite_nonnegative(h)) {
      throw NumericalError("NMF factors became non-finite at iteration " + std::to_string(iter));
    }
    const double current = nmf_objective(x, w, h);
    model.objective_trace.push_back(current);
    model.iterations = iter;
    if (std::abs(previous - current) <= options.tol * previous) {
      model.converged = true;
      previous = current;
      break;
    }
    previous = current;
  }
  if (previous == 0.0) model.converged = true;

  model.doc_topic = std::move(w);
  model.topic_term = std::move(h);
  return model;
}

NmfModel fit_nmf(const SparseMatrix& x, int k, const NmfOptions& options) {
  check_rank(x, k);
  return fit_nmf_from(x, nndsvd_init(x, k), options);
}

NmfModel fit_nmf(const DocTermMatrix& x, int k, const NmfOptions& options) {
  return fit_nmf(x.values, k, options);
}

void normalize_topic_rows(NmfModel& model) {
  for (Eigen::Index j = 0; j < model.topic_term.rows(); ++j) {
    const double norm = model.topic_term.row(j).norm();
    if (norm == 0.0) continue;
    model.topic_term.row(j) /= norm;
    model.doc_topic.col(j) *= norm;
  }
}

}  // namespace topicmine
