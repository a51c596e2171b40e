#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "chaoslab/field_models.hpp"

namespace chaoslab {

/// Cumulative variances V_n = sum_{k<=n} E X_k(0)^2 for n <= n_cap and the
/// variance blocks t_j (t_0 = 1, t_j the smallest t with V_t >= j log 2).
class BlockIndexTable {
 public:
  BlockIndexTable(const FieldModel& model, std::size_t n_cap);

  std::size_t n_cap() const noexcept { return v_.size() - 1; }
  /// V_n for 0 <= n <= n_cap.
  double cumulative_variance(std::size_t n) const;
  /// t_j; throws BudgetExhaustedError if V_{n_cap} < j log 2.
  std::size_t t(std::size_t j) const;
  /// Largest j whose block index is within the cap.
  std::size_t max_block() const noexcept { return t_.size() - 1; }

 private:
  std::vector<double> v_;
  std::vector<std::size_t> t_;
};

std::size_t t_index(const FieldModel& model, std::size_t j, std::size_t n_cap);

/// sum_{k<=n} E X_k(x) X_k(y).
double partial_covariance(const FieldModel& model, std::size_t n, double x, double y);

struct CovRow {
  double x;
  double y;
  double cov;
  double target;
  double deviation;
};

struct CovProfile {
  std::size_t n = 0;
  std::vector<CovRow> rows;
  double sup_deviation = 0.0;
};

/// Deviation of the partial covariance from min(log 1/|x-y|, V_n); coincident
/// points use V_n. Throws DomainError for pairs farther apart than delta.
CovProfile log_corr_deviation(const FieldModel& model, std::size_t n,
                              std::span<const std::pair<double, double>> pairs);

struct TailValue {
  double remainder;
  double bound;
};

/// R_n(t) = -log(2 sin(pi |t|)) - sum_{k<=n} cos(2 pi k t)/k and its bound,
/// 1/(n+1) for |t| >= 1/4, 1/((n+1) sin(2 pi |t|)) otherwise. 0 < |t| <= 1/2.
TailValue fourier_tail(std::size_t n, double t);
/// fourier_tail(n, t) for n = 0..n_max, sharing the partial sums.
std::vector<TailValue> fourier_tail_range(std::size_t n_max, double t);

/// Per-block Gaussian-approximation error of the joint level mgf:
/// eps_j = sum_{k<t_j} [log E exp(xi1 X_k(x) + xi2 X_k(y)) - quadratic part],
/// each level's logarithm taken on the branch nearest its quadratic part.
/// Returns eps_j for j = 0..j_max. Throws BranchTrackingError if a level
/// factor is within 1e-12 of zero.
std::vector<std::complex<double>> joint_mgf_error_profile(const FieldModel& model, const BlockIndexTable& table,
                                                          std::size_t j_max, double x, double y,
                                                          std::complex<double> xi1, std::complex<double> xi2);
std::complex<double> joint_mgf_error(const FieldModel& model, const BlockIndexTable& table, std::size_t j,
                                     double x, double y, std::complex<double> xi1, std::complex<double> xi2);

struct ExpSumMargin {
  double lhs;
  double rhs;
  double c_alpha;
};

/// C_alpha = S/(1 - exp(-alpha S)) with S = max a_k^2 for alpha > 0, -1/alpha for alpha < 0.
double exp_sum_constant(std::span<const double> a, double alpha);

/// lhs = sum_{k=m}^n a_k^2 exp(alpha A_k), rhs = C_alpha |exp(alpha A_n) - exp(alpha A_{m-1})|,
/// A_k = sum_{j<=k} a_j^2. Indices are 1-based.
ExpSumMargin exp_sum_margin(std::span<const double> a, double alpha, std::size_t m, std::size_t n);

struct ExpSumSweep {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double max_ratio = 0.0;  // max lhs/rhs over all pairs
  std::size_t worst_m = 0;
  std::size_t worst_n = 0;
};

/// Checks lhs <= rhs (1 + rel_slack) for every 1 <= m <= n <= a.size().
/// Both sides are accumulated from same-signed increments, so no pair
/// suffers cancellation.
ExpSumSweep exp_sum_sweep(std::span<const double> a, double alpha, double rel_slack = 1e-12);

}  // namespace chaoslab
