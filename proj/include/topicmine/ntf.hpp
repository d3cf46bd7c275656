#pragma once

#include <cstdint>
#include <vector>

#include "topicmine/types.hpp"
#include "topicmine/vectorize.hpp"

namespace topicmine {

/// Rank-K nonnegative CP model: X[d,c,t] ~= sum_r doc[d,r] company[c,r] term[t,r].
/// After fitting, company and term columns have unit L2 norm and the
/// component weight lives in doc_factor.
struct NtfModel {
  Matrix doc_factor;      // D x K
  Matrix company_factor;  // C x K
  Matrix term_factor;     // V x K
  /// Squared reconstruction error after initialization, then after each sweep.
  std::vector<double> error_trace;
  int k = 0;
  std::uint64_t seed = 0;
  int sweeps = 0;
  bool converged = false;
  /// Columns reseeded after collapsing to zero, as (mode, column) pairs.
  std::vector<std::pair<int, int>> rescued_columns;
};

struct NtfOptions {
  int max_sweeps = 200;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

/// One block-coordinate pass over a single factor. Isolated so a different
/// column kernel can be dropped in without touching the sweep logic.
class NtfUpdateKernel {
 public:
  virtual ~NtfUpdateKernel() = default;
  /// Updates `factor` (rows x K) in place given the MTTKRP result `mttkrp`
  /// (rows x K) and the Gram product `gram` (K x K) of the other two factors.
  virtual void update(Matrix& factor, const Matrix& mttkrp, const Matrix& gram) const = 0;
};

/// Hierarchical ALS: exact nonnegative least-squares for each column in turn.
class HalsKernel final : public NtfUpdateKernel {
 public:
  void update(Matrix& factor, const Matrix& mttkrp, const Matrix& gram) const override;
};

/// Throws ConfigError unless 1 <= k <= min(D, C, V), InputError for an empty
/// (zero-sized) or negative tensor, NumericalError on NaN/Inf.
NtfModel fit_ntf(const DocCompanyTermTensor& x, int k, const NtfOptions& options = {},
                 const NtfUpdateKernel& kernel = HalsKernel{});

/// ||X - [[doc, company, term]]||_F^2. Throws DimensionError on mismatch.
double cp_reconstruction_error(const DocCompanyTermTensor& x, const Matrix& doc_factor,
                               const Matrix& company_factor, const Matrix& term_factor);
double cp_reconstruction_error(const DocCompanyTermTensor& x, const NtfModel& model);

}  // namespace topicmine
