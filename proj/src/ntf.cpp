#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <string>

#include "topicmine/error.hpp"
#include "topicmine/ntf.hpp"

namespace topicmine {
namespace {

using Entry = DocCompanyTermTensor::Entry;

// Mode 0 = documents, 1 = companies, 2 = terms.
std::int64_t index_of(const Entry& e, int mode) {
  return mode == 0 ? e.doc : (mode == 1 ? e.company : e.term);
}

struct Factors {
  std::array<Matrix, 3> m;
};

// Matricized tensor times Khatri-Rao product of the other two factors.
Matrix mttkrp(const DocCompanyTermTensor& x, const Factors& f, int mode) {
  const int a = (mode + 1) % 3;
  const int b = (mode + 2) % 3;
  const Eigen::Index k = f.m[0].cols();
  Matrix out = Matrix::Zero(f.m[static_cast<std::size_t>(mode)].rows(), k);
  for (const auto& e : x.entries) {
    out.row(index_of(e, mode)) +=
        e.value * f.m[static_cast<std::size_t>(a)].row(index_of(e, a)).cwiseProduct(
                      f.m[static_cast<std::size_t>(b)].row(index_of(e, b)));
  }
  return out;
}

Matrix gram_except(const Factors& f, int mode) {
  const auto a = static_cast<std::size_t>((mode + 1) % 3);
  const auto b = static_cast<std::size_t>((mode + 2) % 3);
  const Matrix ga = f.m[a].transpose() * f.m[a];
  const Matrix gb = f.m[b].transpose() * f.m[b];
  return ga.cwiseProduct(gb);
}

double model_value(const Factors& f, const Entry& e) {
  return f.m[0].row(e.doc).cwiseProduct(f.m[1].row(e.company)).dot(f.m[2].row(e.term));
}

double squared_error(const DocCompanyTermTensor& x, const Factors& f) {
  // Split into the observed entries plus the model's mass everywhere else:
  // sum over zeros of m^2 = ||M||^2 - sum over nonzeros of m^2.
  double observed = 0.0;
  double model_on_support = 0.0;
  for (const auto& e : x.entries) {
    const double m = model_value(f, e);
    observed += (e.value - m) * (e.value - m);
    model_on_support += m * m;
  }
  const Matrix g = (f.m[0].transpose() * f.m[0])
                       .cwiseProduct(f.m[1].transpose() * f.m[1])
                       .cwiseProduct(f.m[2].transpose() * f.m[2]);
  const double off_support = std::max(0.0, g.sum() - model_on_support);
  return observed + off_support;
}

// Replaces a collapsed component with the positive part of the residual
// fiber through the largest positive residual, running along `mode`.
// The component contributed nothing before, so this lowers the error by the
// fiber's squared norm. Returns false when no residual entry is positive.
bool reseed_component(const DocCompanyTermTensor& x, Factors& f, int mode, Eigen::Index r) {
  const Entry* peak = nullptr;
  double peak_residual = 0.0;
  for (const auto& e : x.entries) {
    const double residual = e.value - model_value(f, e);
    if (residual > peak_residual) {
      peak_residual = residual;
      peak = &e;
    }
  }
  if (peak == nullptr) return false;

  const int a = (mode + 1) % 3;
  const int b = (mode + 2) % 3;
  const std::int64_t ia = index_of(*peak, a);
  const std::int64_t ib = index_of(*peak, b);
  Vector fiber = Vector::Zero(f.m[static_cast<std::size_t>(mode)].rows());
  for (const auto& e : x.entries) {
    if (index_of(e, a) != ia || index_of(e, b) != ib) continue;
    const double residual = e.value - model_value(f, e);
    if (residual > 0.0) fiber[index_of(e, mode)] = residual;
  }
  f.m[static_cast<std::size_t>(mode)].col(r) = fiber;
  f.m[static_cast<std::size_t>(a)].col(r).setZero();
  f.m[static_cast<std::size_t>(a)](ia, r) = 1.0;
  f.m[static_cast<std::size_t>(b)].col(r).setZero();
  f.m[static_cast<std::size_t>(b)](ib, r) = 1.0;
  return true;
}

void check_finite(const Factors& f, int sweep) {
  for (const auto& m : f.m) {
    if (!m.allFinite()) {
      throw NumericalError("NTF factors became non-finite in sweep " + std::to_string(sweep));
    }
  }
}

}  // namespace

void HalsKernel::update(Matrix& factor, const Matrix& mttkrp, const Matrix& gram) const {
  for (Eigen::Index r = 0; r < factor.cols(); ++r) {
    const double diag = gram(r, r);
    if (!(diag > 0.0)) {
      // The other modes' column r is zero, so this column cannot affect the fit.
      factor.col(r).setZero();
      continue;
    }
    const Vector step = (mttkrp.col(r) - factor * gram.col(r)) / diag;
    factor.col(r) = (factor.col(r) + step).cwiseMax(0.0);
  }
}

NtfModel fit_ntf(const DocCompanyTermTensor& x, int k, const NtfOptions& options,
                 const NtfUpdateKernel& kernel) {
  if (x.docs == 0 || x.companies == 0 || x.terms == 0) {
    throw InputError("NTF input tensor is empty");
  }
  const std::int64_t limit = std::min({x.docs, x.companies, x.terms});
  if (k < 1 || k > limit) {
    throw ConfigError("NTF k=" + std::to_string(k) + " outside [1, " + std::to_string(limit) + "]");
  }
  for (const auto& e : x.entries) {
    if (!(e.value >= 0.0)) throw InputError("NTF input tensor has a negative or NaN entry");
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Factors f;
  const std::array<std::int64_t, 3> dims{x.docs, x.companies, x.terms};
  for (std::size_t mode = 0; mode < 3; ++mode) {
    Matrix& m = f.m[mode];
    m.resize(dims[mode], k);
    for (Eigen::Index c = 0; c < k; ++c) {
      for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = std::abs(gauss(rng));
      const double norm = m.col(c).norm();
      if (norm > 0.0) m.col(c) /= norm;
    }
  }

  NtfModel model;
  model.k = k;
  model.seed = options.seed;
  std::vector<bool> rescued(static_cast<std::size_t>(k), false);

  double previous = squared_error(x, f);
  model.error_trace.push_back(previous);

  for (int sweep = 1; sweep <= options.max_sweeps && previous > 0.0; ++sweep) {
    for (int mode = 0; mode < 3; ++mode) {
      const Matrix m = mttkrp(x, f, mode);
      const Matrix g = gram_except(f, mode);
      kernel.update(f.m[static_cast<std::size_t>(mode)], m, g);
      for (Eigen::Index r = 0; r < k; ++r) {
        if (rescued[static_cast<std::size_t>(r)]) continue;
        if (f.m[static_cast<std::size_t>(mode)].col(r).any()) continue;
        rescued[static_cast<std::size_t>(r)] = true;
        if (reseed_component(x, f, mode, r)) {
          model.rescued_columns.emplace_back(mode, static_cast<int>(r));
        }
      }
    }
    check_finite(f, sweep);

    const double current = squared_error(x, f);
    model.error_trace.push_back(current);
    model.sweeps = sweep;
    const bool done = std::abs(previous - current) <= options.tol * previous;
    previous = current;
    if (done) {
      model.converged = true;
      break;
    }
  }
  if (previous == 0.0) model.converged = true;

  // Unit company and term columns; the weight moves into the document factor.
  for (Eigen::Index r = 0; r < k; ++r) {
    const double nb = f.m[1].col(r).norm();
    const double nc = f.m[2].col(r).norm();
    if (nb == 0.0 || nc == 0.0) {
      for (auto& m : f.m) m.col(r).setZero();
      continue;
    }
    f.m[1].col(r) /= nb;
    f.m[2].col(r) /= nc;
    f.m[0].col(r) *= nb * nc;
  }

  model.doc_factor = std::move(f.m[0]);
  model.company_factor = std::move(f.m[1]);
  model.term_factor = std::move(f.m[2]);
  return model;
}

double cp_reconstruction_error(const DocCompanyTermTensor& x, const Matrix& doc_factor,
                               const Matrix& company_factor, const Matrix& term_factor) {
  const Eigen::Index k = doc_factor.cols();
  if (doc_factor.rows() != x.docs || company_factor.rows() != x.companies ||
      term_factor.rows() != x.terms || company_factor.cols() != k || term_factor.cols() != k) {
    throw DimensionError("cp_reconstruction_error: factor shapes do not match the tensor");
  }
  Factors f;
  f.m = {doc_factor, company_factor, term_factor};
  return squared_error(x, f);
}

double cp_reconstruction_error(const DocCompanyTermTensor& x, const NtfModel& model) {
  return cp_reconstruction_error(x, model.doc_factor, model.company_factor, model.term_factor);
}

}  // namespace topicmine
