#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "chaoslab/chaos.hpp"
#include "chaoslab/mc_runtime.hpp"

namespace chaoslab {

/// m equispaced points on the circle |beta - center| = radius.
struct BetaCircle {
  std::complex<double> center = 1.0;
  double radius = 0.1;
  std::size_t m = 64;

  std::vector<std::complex<double>> points() const;
};

/// Axis-aligned rectangle [re_lo, re_hi] x [im_lo, im_hi] sampled on an nx x ny grid.
struct BetaRectangle {
  double re_lo = 0.6, re_hi = 1.1;
  double im_lo = -0.2, im_hi = 0.2;
  std::size_t nx = 6, ny = 5;

  std::vector<std::complex<double>> points() const;
};

/// Radius > 0, m a power of two and at least 32.
void validate(const BetaCircle& c);

/// min over betas, points and k <= n of |E exp(beta X_k(x))|.
double normalizer_floor(const FieldModel& model, std::size_t n, std::span<const std::complex<double>> betas,
                        std::span<const double> points);

enum class WeightMode {
  analytic,
  /// Control: beta replaced by |beta| in the exponent and the normalizer.
  modulus_control
};

struct CauchyResidual {
  std::complex<double> loop_integral;
  std::complex<double> mean_value_gap;
  double max_abs_mu = 0.0;
  /// |loop| / (radius max|mu|) and |gap| / max|mu|.
  double loop_rel = 0.0;
  double gap_rel = 0.0;
  std::vector<std::pair<std::complex<double>, std::complex<double>>> samples;  // (beta, mu)
};

/// Per-path normalizers for every circle point and the center, so several
/// paths at the same level share them.
class CircleNormalizers {
 public:
  CircleNormalizers(const FieldModel& model, std::span<const double> points, std::size_t level,
                    const BetaCircle& circle, WeightMode mode, double floor = 1e-6);

  const BetaCircle& circle() const noexcept { return circle_; }
  WeightMode mode() const noexcept { return mode_; }
  std::size_t level() const noexcept { return level_; }
  const LogNormalizer& at(std::size_t i) const { return norms_.at(i); }
  const LogNormalizer& center() const { return norms_.back(); }

 private:
  BetaCircle circle_;
  WeightMode mode_;
  std::size_t level_;
  std::vector<LogNormalizer> norms_;  // circle points then center
};

/// Trapezoidal loop integral of mu(beta) = integrate(path, beta, f) around the
/// circle and the gap between the circle average and mu(center).
CauchyResidual cauchy_residual(const PathState& path, const TestFunction& f, const CircleNormalizers& norms);
CauchyResidual cauchy_residual(const PathState& path, const TestFunction& f, const BetaCircle& circle,
                               WeightMode mode = WeightMode::analytic);

struct CauchyGapRow {
  std::size_t n1;
  std::size_t n2;
  double sup_moment;
};

/// For each level pair, sup over the beta grid of the empirical E|mu_{n1} - mu_{n2}|^p.
/// Every beta must be admissible (d = 1, r_cap) else ParameterError.
std::vector<CauchyGapRow> uniform_cauchy_gap(std::shared_ptr<const FieldModel> model, const TestFunction& f,
                                             std::span<const std::complex<double>> betas,
                                             std::span<const std::pair<std::size_t, std::size_t>> pairs, double p,
                                             std::size_t replicas, const SeedPlan& plan, std::size_t threads,
                                             const QuadratureSpec& quad, double r_cap = 0.5);

}  // namespace chaoslab
