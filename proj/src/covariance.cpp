#include "chaoslab/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

}  // namespace

BlockIndexTable::BlockIndexTable(const FieldModel& model, std::size_t n_cap) {
  if (n_cap < 1) throw DomainError("BlockIndexTable: n_cap must be at least 1");
  if (n_cap > model.max_level())
    throw BudgetExhaustedError("BlockIndexTable: n_cap " + std::to_string(n_cap) + " exceeds the model's " +
                               std::to_string(model.max_level()) + " levels");
  v_.resize(n_cap + 1);
  v_[0] = 0.0;
  for (std::size_t k = 1; k <= n_cap; ++k) v_[k] = v_[k - 1] + model.level_variance(k);
  t_.push_back(1);
  std::size_t t = 1;
  for (std::size_t j = 1;; ++j) {
    const double level = static_cast<double>(j) * kLn2;
    while (t <= n_cap && v_[t] < level) ++t;
    if (t > n_cap) break;
    t_.push_back(t);
  }
}

double BlockIndexTable::cumulative_variance(std::size_t n) const {
  if (n >= v_.size()) throw BudgetExhaustedError("cumulative variance requested beyond the level cap");
  return v_[n];
}

std::size_t BlockIndexTable::t(std::size_t j) const {
  if (j >= t_.size()) {
    std::ostringstream os;
    os << "block " << j << " needs V >= " << static_cast<double>(j) * kLn2 << " but V_" << n_cap()
       << " = " << v_.back();
    throw BudgetExhaustedError(os.str());
  }
  return t_[j];
}

std::size_t t_index(const FieldModel& model, std::size_t j, std::size_t n_cap) {
  return BlockIndexTable(model, n_cap).t(j);
}

double partial_covariance(const FieldModel& model, std::size_t n, double x, double y) {
  double acc = 0.0;
  for (std::size_t k = 1; k <= n; ++k) acc += model.level_second_moments(k, x, y).cov;
  return acc;
}

CovProfile log_corr_deviation(const FieldModel& model, std::size_t n,
                              std::span<const std::pair<double, double>> pairs) {
  const double delta = model.delta();
  for (const auto& [x, y] : pairs) {
    if (std::abs(x - y) > delta) {
      std::ostringstream os;
      os << "pair (" << x << ", " << y << ") is farther apart than delta = " << delta;
      throw DomainError(os.str());
    }
  }
  CovProfile prof;
  prof.n = n;
  prof.rows.reserve(pairs.size());
  double vn = 0.0;
  for (std::size_t k = 1; k <= n; ++k) vn += model.level_variance(k);
  for (const auto& [x, y] : pairs) {
    const double c = partial_covariance(model, n, x, y);
    const double d = std::abs(x - y);
    const double target = d == 0.0 ? vn : std::min(-std::log(d), vn);
    const double dev = std::abs(c - target);
    prof.rows.push_back({x, y, c, target, dev});
    prof.sup_deviation = std::max(prof.sup_deviation, dev);
  }
  return prof;
}

namespace {

void check_lag(double t) {
  const double a = std::abs(t);
  if (!(a > 0.0 && a <= 0.5)) throw DomainError("fourier_tail: lag must satisfy 0 < |t| <= 1/2");
}

double tail_bound(std::size_t n, double t) {
  const double a = std::abs(t);
  const double inv = 1.0 / static_cast<double>(n + 1);
  return a >= 0.25 ? inv : inv / std::sin(2.0 * kPi * a);
}

}  // namespace

TailValue fourier_tail(std::size_t n, double t) {
  check_lag(t);
  const double a = std::abs(t);
  double s = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double kt = static_cast<double>(k) * a;
    s += std::cos(2.0 * kPi * (kt - std::nearbyint(kt))) / static_cast<double>(k);
  }
  return {-std::log(2.0 * std::sin(kPi * a)) - s, tail_bound(n, t)};
}

std::vector<TailValue> fourier_tail_range(std::size_t n_max, double t) {
  check_lag(t);
  const double a = std::abs(t);
  const double head = -std::log(2.0 * std::sin(kPi * a));
  std::vector<TailValue> out(n_max + 1);
  double s = 0.0;
  out[0] = {head, tail_bound(0, t)};
  for (std::size_t k = 1; k <= n_max; ++k) {
    const double kt = static_cast<double>(k) * a;
    s += std::cos(2.0 * kPi * (kt - std::nearbyint(kt))) / static_cast<double>(k);
    out[k] = {head - s, tail_bound(k, t)};
  }
  return out;
}

std::vector<std::complex<double>> joint_mgf_error_profile(const FieldModel& model, const BlockIndexTable& table,
                                                          std::size_t j_max, double x, double y,
                                                          std::complex<double> xi1, std::complex<double> xi2) {
  const std::size_t last = table.t(j_max) - 1;
  std::vector<std::complex<double>> out(j_max + 1);
  std::complex<double> eps{0.0, 0.0};
  std::size_t j = 0;
  // eps_j covers levels k < t_j; record it whenever k reaches t_j - 1.
  auto record = [&](std::size_t k) {
    while (j <= j_max && table.t(j) - 1 == k) out[j++] = eps;
  };
  record(0);
  const std::complex<double> q11 = 0.5 * xi1 * xi1, q22 = 0.5 * xi2 * xi2, q12 = xi1 * xi2;
  for (std::size_t k = 1; k <= last; ++k) {
    const SecondMoments sm = model.level_second_moments(k, x, y);
    const std::complex<double> quad = q11 * sm.var_x + q22 * sm.var_y + q12 * sm.cov;
    const std::complex<double> lg = model.log_joint_level_mgf(k, x, y, xi1, xi2);
    if (!(lg.real() >= std::log(1e-12))) {
      std::ostringstream os;
      os << "joint mgf at level " << k << " has modulus " << std::exp(lg.real())
         << " for xi1 = " << xi1 << ", xi2 = " << xi2;
      throw BranchTrackingError(os.str());
    }
    std::complex<double> d = lg - quad;
    d.imag(std::remainder(d.imag(), 2.0 * kPi));
    eps += d;
    record(k);
  }
  return out;
}

std::complex<double> joint_mgf_error(const FieldModel& model, const BlockIndexTable& table, std::size_t j,
                                     double x, double y, std::complex<double> xi1, std::complex<double> xi2) {
  return joint_mgf_error_profile(model, table, j, x, y, xi1, xi2).back();
}

double exp_sum_constant(std::span<const double> a, double alpha) {
  if (alpha == 0.0) throw DomainError("exp_sum: alpha must be nonzero");
  if (alpha < 0.0) return -1.0 / alpha;
  double s = 0.0;
  for (double v : a) s = std::max(s, v * v);
  if (s == 0.0) throw DomainError("exp_sum: sequence is identically zero");
  return s / -std::expm1(-alpha * s);
}

namespace {

// Per-level lhs terms a_k^2 exp(alpha A_k) and rhs increments
// |exp(alpha A_k) - exp(alpha A_{k-1})|, 0-based by k - 1.
void exp_sum_terms(std::span<const double> a, double alpha, std::vector<double>& lhs_term,
                   std::vector<double>& rhs_term) {
  const std::size_t n = a.size();
  lhs_term.resize(n);
  rhs_term.resize(n);
  double cum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a2 = a[i] * a[i];
    const double prev = std::exp(alpha * cum);
    cum += a2;
    lhs_term[i] = a2 * std::exp(alpha * cum);
    rhs_term[i] = prev * std::abs(std::expm1(alpha * a2));
  }
}

}  // namespace

ExpSumMargin exp_sum_margin(std::span<const double> a, double alpha, std::size_t m, std::size_t n) {
  if (!(m >= 1 && m <= n && n <= a.size())) throw DomainError("exp_sum: need 1 <= m <= n <= length(a)");
  const double c = exp_sum_constant(a, alpha);
  std::vector<double> lt, rt;
  exp_sum_terms(a.first(n), alpha, lt, rt);
  double lhs = 0.0, rhs = 0.0;
  for (std::size_t k = m; k <= n; ++k) {
    lhs += lt[k - 1];
    rhs += rt[k - 1];
  }
  return {lhs, c * rhs, c};
}

ExpSumSweep exp_sum_sweep(std::span<const double> a, double alpha, double rel_slack) {
  const double c = exp_sum_constant(a, alpha);
  std::vector<double> lt, rt;
  exp_sum_terms(a, alpha, lt, rt);
  for (double& v : rt) v *= c;
  const std::size_t n = a.size();
  ExpSumSweep out;
  const double tol = 1.0 + rel_slack;
  for (std::size_t m = 0; m < n; ++m) {
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t k = m; k < n; ++k) {
      lhs += lt[k];
      rhs += rt[k];
      if (lhs > tol * rhs) ++out.violations;
      if (lhs > out.max_ratio * rhs) {
        out.max_ratio = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
        out.worst_m = m + 1;
        out.worst_n = k + 1;
      }
    }
    out.pairs += n - m;
  }
  return out;
}

}  // namespace chaoslab
