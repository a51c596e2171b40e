#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chaoslab/covariance.hpp"
#include "chaoslab/errors.hpp"

using namespace chaoslab;
using cplx = std::complex<double>;

namespace {

FieldModel fourier(CoefficientLaw law = CoefficientLaw::rademacher()) { return FieldModel(FourierModel{law}); }

double harmonic(std::size_t n) {
  double h = 0.0;
  for (std::size_t k = n; k >= 1; --k) h += 1.0 / static_cast<double>(k);
  return h;
}

}  // namespace

TEST(BlockIndex, HarmonicOracle) {
  const auto m = fourier();
  const double ln2 = std::log(2.0);
  EXPECT_EQ(t_index(m, 0, 10), 1u);
  EXPECT_EQ(t_index(m, 1, 10), 1u);
  EXPECT_EQ(t_index(m, 3, 10), 4u);
  EXPECT_EQ(t_index(m, 4, 10), 9u);
  const BlockIndexTable table(m, 5000);
  for (std::size_t j = 1; j <= table.max_block(); ++j) {
    const std::size_t t = table.t(j);
    EXPECT_LT(harmonic(t - 1), j * ln2 + 1e-12);
    EXPECT_GE(harmonic(t), j * ln2 - 1e-12);
    EXPECT_LT(table.cumulative_variance(t - 1), j * ln2);
    EXPECT_GE(table.cumulative_variance(t), j * ln2);
  }
  EXPECT_THROW(t_index(m, 40, 100), BudgetExhaustedError);
}

TEST(PartialCovariance, Examples) {
  const auto m = fourier();
  EXPECT_NEAR(partial_covariance(m, 4, 0.3, 0.3), 25.0 / 12.0, 1e-15);
  EXPECT_NEAR(partial_covariance(m, 2, 0.25, 0.0), -0.5, 1e-15);
  const FieldModel d(DilatedModel{StationaryBase::gaussian_stationary(), build_schedule(ScheduleFamily::harmonic, 5)});
  EXPECT_NEAR(partial_covariance(d, 3, 0.7, 0.7), 11.0 / 6.0, 1e-15);
}

TEST(LogCorrelation, Examples) {
  const auto m = fourier();
  std::vector<std::pair<double, double>> pairs{{0.2, 0.2}, {0.0, 1.0 / 16.0}};
  const auto prof = log_corr_deviation(m, 256, pairs);
  EXPECT_EQ(prof.rows[0].deviation, 0.0);
  EXPECT_LE(prof.rows[1].deviation, 2.0);
  std::vector<std::pair<double, double>> bad{{0.0, 0.6}};
  EXPECT_THROW(log_corr_deviation(m, 8, bad), DomainError);
}

TEST(FourierTail, Examples) {
  const auto a = fourier_tail(0, 0.25);
  EXPECT_NEAR(a.remainder, -0.5 * std::log(2.0), 1e-15);
  const auto b = fourier_tail(1, 0.5);
  EXPECT_NEAR(b.remainder, 1.0 - std::log(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(b.bound, 0.5);
  const auto c = fourier_tail(512, 0.3);
  EXPECT_LE(std::abs(c.remainder), 1.0 / 513.0);
  EXPECT_THROW(fourier_tail(3, 0.0), DomainError);
  const auto range = fourier_tail_range(64, 0.1);
  for (std::size_t n = 0; n <= 64; n += 8) EXPECT_NEAR(range[n].remainder, fourier_tail(n, 0.1).remainder, 1e-13);
}

TEST(FourierTail, SeriesOracle) {
  // Direct summation of the tail sum_{n<k<=K} cos(2 pi k t)/k.
  for (double t : {0.07, 0.19, 0.33, 0.5}) {
    const std::size_t n = 40, big = 2000000;
    double s = 0.0;
    for (std::size_t k = big; k > n; --k) {
      const double kt = static_cast<double>(k) * t;
      s += std::cos(2.0 * std::numbers::pi * (kt - std::nearbyint(kt))) / static_cast<double>(k);
    }
    EXPECT_NEAR(fourier_tail(n, t).remainder, s, 2e-5) << t;
  }
}

TEST(JointMgf, GaussianIsExactlyQuadratic) {
  const auto m = fourier(CoefficientLaw::gaussian());
  const BlockIndexTable table(m, 4096);
  const auto eps = joint_mgf_error_profile(m, table, 10, 0.1, 0.35, cplx(2.0, 0.4), cplx(-1.5, -0.3));
  for (const auto& e : eps) EXPECT_LT(std::abs(e), 1e-10);
}

TEST(JointMgf, ZeroArgumentsAndConjugation) {
  const auto m = fourier();
  const BlockIndexTable table(m, 4096);
  EXPECT_EQ(joint_mgf_error(m, table, 8, 0.1, 0.2, 0.0, 0.0), cplx(0.0));
  const cplx x1(1.7, 0.3), x2(-0.8, 0.45);
  const cplx a = joint_mgf_error(m, table, 9, 0.0, 0.125, std::conj(x1), std::conj(x2));
  const cplx b = std::conj(joint_mgf_error(m, table, 9, 0.0, 0.125, x1, x2));
  EXPECT_LT(std::abs(a - b), 1e-12);
}

TEST(JointMgf, VanishingFactorIsReported) {
  const auto m = fourier();
  const BlockIndexTable table(m, 64);
  // cosh(i pi/2) = 0 at level 1, x = y = 0 with xi1 + xi2 = i pi/2.
  EXPECT_THROW(joint_mgf_error(m, table, 2, 0.0, 0.0, cplx(0.0, std::numbers::pi / 4), cplx(0.0, std::numbers::pi / 4)),
               BranchTrackingError);
}

TEST(ExpSum, Examples) {
  std::vector<double> a(10000);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = 1.0 / std::sqrt(static_cast<double>(k + 1));
  const auto r = exp_sum_margin(a, 1.0, 1, 2);
  EXPECT_NEAR(r.lhs, std::exp(1.0) + 0.5 * std::exp(1.5), 1e-13);
  EXPECT_NEAR(r.c_alpha, 1.0 / (1.0 - std::exp(-1.0)), 1e-14);
  EXPECT_NEAR(r.rhs, r.c_alpha * (std::exp(1.5) - 1.0), 1e-12);
  EXPECT_NEAR(r.rhs, 5.5079, 1e-4);
  const auto neg = exp_sum_margin(a, -1.0, 1, 10000);
  EXPECT_DOUBLE_EQ(neg.c_alpha, 1.0);
  EXPECT_LE(neg.lhs, neg.rhs);
  EXPECT_THROW(exp_sum_margin(a, 0.0, 1, 2), DomainError);
  // Single term: a_1^2 e^{a_1^2} <= C (e^{a_1^2} - 1).
  const auto one = exp_sum_margin(a, 2.0, 1, 1);
  EXPECT_LE(one.lhs, one.rhs * (1.0 + 1e-12));
}

TEST(ExpSum, SweepSmallMatchesPairwise) {
  const auto s = build_schedule(ScheduleFamily::log_harmonic, 60);
  for (double alpha : {-2.0, 0.5}) {
    const auto sweep = exp_sum_sweep(s.a, alpha);
    EXPECT_EQ(sweep.violations, 0u);
    EXPECT_EQ(sweep.pairs, 60u * 61u / 2u);
    const auto worst = exp_sum_margin(s.a, alpha, sweep.worst_m, sweep.worst_n);
    EXPECT_NEAR(worst.lhs / worst.rhs, sweep.max_ratio, 1e-12);
  }
}
