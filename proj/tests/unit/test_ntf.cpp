#include <doctest.h>

#include <map>
#include <random>
#include <tuple>

#include "oracles.hpp"
#include "topicmine/error.hpp"
#include "topicmine/ntf.hpp"

using namespace topicmine;

namespace {

using Cells = std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, double>;

DocCompanyTermTensor make_tensor(std::int64_t d, std::int64_t c, std::int64_t t, const Cells& cells) {
  DocCompanyTermTensor x;
  x.docs = d;
  x.companies = c;
  x.terms = t;
  for (const auto& [key, value] : cells) {
    x.entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), value});
  }
  return x;
}

Cells random_cells(std::mt19937_64& rng, std::int64_t d, std::int64_t c, std::int64_t t, int nnz) {
  std::uniform_int_distribution<std::int64_t> di(0, d - 1), ci(0, c - 1), ti(0, t - 1);
  std::uniform_real_distribution<double> value(0.1, 3.0);
  Cells cells;
  while (static_cast<int>(cells.size()) < nnz) cells[{di(rng), ci(rng), ti(rng)}] = value(rng);
  return cells;
}

Matrix random_factor(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index k) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix m(rows, k);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
  return m;
}

oracle::Dense to_dense(const Matrix& m) {
  oracle::Dense out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(r)].push_back(m(r, c));
  }
  return out;
}

class CountingKernel final : public NtfUpdateKernel {
 public:
  mutable int calls = 0;
  void update(Matrix& factor, const Matrix& mttkrp, const Matrix& gram) const override {
    ++calls;
    HalsKernel{}.update(factor, mttkrp, gram);
  }
};

}  // namespace

TEST_CASE("rank-one tensor is recovered") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.2, 2.0);
  std::vector<double> a(10), b(5), g(12);
  for (auto* v : {&a, &b, &g}) {
    for (double& x : *v) x = u(rng);
  }
  Cells cells;
  double norm2 = 0.0;
  for (int d = 0; d < 10; ++d) {
    for (int c = 0; c < 5; ++c) {
      for (int t = 0; t < 12; ++t) {
        const double v = a[d] * b[c] * g[t];
        cells[{d, c, t}] = v;
        norm2 += v * v;
      }
    }
  }
  const auto x = make_tensor(10, 5, 12, cells);
  NtfOptions options;
  options.tol = 1e-12;
  options.max_sweeps = 500;
  const NtfModel m = fit_ntf(x, 1, options);
  CHECK(std::sqrt(cp_reconstruction_error(x, m) / norm2) < 1e-6);
  CHECK(m.company_factor.col(0).norm() == doctest::Approx(1.0));
  CHECK(m.term_factor.col(0).norm() == doctest::Approx(1.0));
}

TEST_CASE("zero tensor fits to zero") {
  const auto x = make_tensor(4, 3, 5, {});
  const NtfModel m = fit_ntf(x, 2);
  CHECK(m.error_trace.back() == 0.0);
  CHECK(m.doc_factor.isZero(0.0));
  CHECK(m.converged);
}

TEST_CASE("error is monotone per sweep and factors stay nonnegative") {
  std::mt19937_64 rng(40);
  for (int trial = 0; trial < 20; ++trial) {
    const auto x = make_tensor(12, 6, 15, random_cells(rng, 12, 6, 15, 150));
    NtfOptions options;
    options.seed = static_cast<std::uint64_t>(trial);
    const NtfModel m = fit_ntf(x, 3, options);
    for (std::size_t i = 1; i < m.error_trace.size(); ++i) {
      CHECK(m.error_trace[i] <= m.error_trace[i - 1] * (1.0 + 1e-8));
    }
    CHECK((m.doc_factor.array() >= 0.0).all());
    CHECK((m.company_factor.array() >= 0.0).all());
    CHECK((m.term_factor.array() >= 0.0).all());
    CHECK(cp_reconstruction_error(x, m) == doctest::Approx(m.error_trace.back()).epsilon(1e-9));
  }
}

TEST_CASE("reconstruction error against the dense triple loop") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const Cells cells = random_cells(rng, 5, 4, 6, 30);
    const auto x = make_tensor(5, 4, 6, cells);
    const Matrix a = random_factor(rng, 5, 2), b = random_factor(rng, 4, 2), c = random_factor(rng, 6, 2);
    const double expected = oracle::cp_error(5, 4, 6, cells, to_dense(a), to_dense(b), to_dense(c));
    CHECK(std::abs(cp_reconstruction_error(x, a, b, c) - expected) <= 1e-10 * std::max(1.0, expected));
  }

  // Exact model and zero model.
  const Matrix a = random_factor(rng, 3, 2), b = random_factor(rng, 2, 2), c = random_factor(rng, 4, 2);
  Cells exact;
  for (int d = 0; d < 3; ++d) {
    for (int co = 0; co < 2; ++co) {
      for (int t = 0; t < 4; ++t) exact[{d, co, t}] = (a.row(d).cwiseProduct(b.row(co))).dot(c.row(t));
    }
  }
  const auto x = make_tensor(3, 2, 4, exact);
  CHECK(std::abs(cp_reconstruction_error(x, a, b, c)) <= 1e-12);
  CHECK(cp_reconstruction_error(x, Matrix::Zero(3, 2), Matrix::Zero(2, 2), Matrix::Zero(4, 2)) ==
        doctest::Approx(x.squared_norm()).epsilon(1e-14));
  CHECK_THROWS_AS(cp_reconstruction_error(x, Matrix::Zero(2, 2), b, c), DimensionError);
}

TEST_CASE("argument checks") {
  const auto x = make_tensor(4, 2, 5, {{{0, 0, 0}, 1.0}});
  CHECK_THROWS_AS(fit_ntf(x, 0), ConfigError);
  CHECK_THROWS_AS(fit_ntf(x, 3), ConfigError);
  CHECK_THROWS_AS(fit_ntf(make_tensor(0, 2, 5, {}), 1), InputError);
  CHECK_THROWS_AS(fit_ntf(make_tensor(4, 2, 5, {{{1, 1, 1}, -2.0}}), 1), InputError);
}

TEST_CASE("seeded determinism and the kernel hook") {
  std::mt19937_64 rng(43);
  const auto x = make_tensor(12, 6, 15, random_cells(rng, 12, 6, 15, 120));
  NtfOptions options;
  options.seed = 5;
  const NtfModel a = fit_ntf(x, 3, options);
  const CountingKernel kernel;
  const NtfModel b = fit_ntf(x, 3, options, kernel);
  CHECK(a.doc_factor == b.doc_factor);
  CHECK(a.term_factor == b.term_factor);
  CHECK(kernel.calls == 3 * b.sweeps);
}

TEST_CASE("one company per document gives a consistent crosstab") {
  // Two companies, each writing about its own terms.
  Cells cells;
  for (int d = 0; d < 6; ++d) {
    const int company = d % 2;
    for (int t = 0; t < 3; ++t) cells[{d, company, t + 3 * company}] = 1.0 + t;
  }
  const auto x = make_tensor(6, 2, 6, cells);
  const NtfModel m = fit_ntf(x, 2);
  std::vector<int> doc_label, company_label;
  for (Eigen::Index d = 0; d < 6; ++d) {
    Eigen::Index j;
    m.doc_factor.row(d).maxCoeff(&j);
    doc_label.push_back(static_cast<int>(j));
  }
  for (Eigen::Index c = 0; c < 2; ++c) {
    Eigen::Index j;
    m.company_factor.row(c).maxCoeff(&j);
    company_label.push_back(static_cast<int>(j));
  }
  CHECK(company_label[0] != company_label[1]);
  for (int d = 0; d < 6; ++d) CHECK(doc_label[static_cast<std::size_t>(d)] == company_label[static_cast<std::size_t>(d % 2)]);
}
