#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chaoslab/rng.hpp"

namespace chaoslab {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Coefficient laws
// ---------------------------------------------------------------------------

enum class LawKind { rademacher, uniform, gaussian, two_point };

/// A centered, unit-variance scalar law with an entire moment generating
/// function. Construction validates the moment constraints, so an instance
/// that exists is always usable.
class CoefficientLaw {
 public:
  static CoefficientLaw rademacher();
  /// Uniform on [-sqrt 3, sqrt 3].
  static CoefficientLaw uniform();
  static CoefficientLaw gaussian();
  /// P(A = a) = p, P(A = b) = 1 - p; throws ParameterError unless mean 0 and variance 1.
  static CoefficientLaw two_point(double p, double a, double b);
  /// Standardized two-point law with P(A < 0) = p.
  static CoefficientLaw two_point(double p);

  LawKind kind() const noexcept { return kind_; }
  std::string name() const;

  /// E exp(zA), closed form.
  cplx mgf(cplx z) const;
  /// log E exp(zA). Principal branch per factor, evaluated without overflow
  /// for large |Re z| and without cancellation near z = 0.
  cplx log_mgf(cplx z) const;

  double sample(Stream& rng) const;

  /// E|A|^q for q > 0.
  double abs_moment(double q) const;

  bool finitely_supported() const noexcept {
    return kind_ == LawKind::rademacher || kind_ == LawKind::two_point;
  }
  /// Atoms (value, probability); empty for continuous laws.
  std::vector<std::pair<double, double>> support() const;

  double p() const noexcept { return p_; }
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }

 private:
  CoefficientLaw(LawKind kind, double p, double a, double b) : kind_(kind), p_(p), a_(a), b_(b) {}

  LawKind kind_;
  double p_;
  double a_;
  double b_;
};

/// log(1 + u) for complex u, accurate when |u| is small.
cplx clog1p(cplx u);

// ---------------------------------------------------------------------------
// Field families
// ---------------------------------------------------------------------------

/// X_k(x) = (A_k cos(2 pi k x) + B_k sin(2 pi k x)) / sqrt(k).
struct FourierModel {
  CoefficientLaw law = CoefficientLaw::rademacher();
  static constexpr double delta = 0.5;
};

enum class CovarianceKind { squared_exponential, exponential };

/// Stationary unit-variance base process Y with covariance f(|x - y|).
class StationaryBase {
 public:
  /// Gaussian process with f(t) = exp(-(t/l)^2) or exp(-t/l).
  static StationaryBase gaussian_stationary(CovarianceKind cov = CovarianceKind::squared_exponential,
                                            double length = 1.0);
  /// Y(x) = A cos(x + U), A = sqrt(2) L with L drawn from `amplitude`, U uniform on [0, 2 pi).
  static StationaryBase cosine_process(CoefficientLaw amplitude = CoefficientLaw::rademacher());

  bool is_gaussian() const noexcept { return gaussian_; }
  CovarianceKind covariance_kind() const noexcept { return cov_; }
  double length() const noexcept { return length_; }
  const CoefficientLaw& amplitude_law() const noexcept { return amplitude_; }

  double covariance(double t) const;
  /// f(t) = O(t^-delta) holds for the Gaussian bases, not for the cosine process.
  bool decay_assumption_met() const noexcept { return gaussian_; }
  std::string name() const;

 private:
  StationaryBase(bool gaussian, CovarianceKind cov, double length, CoefficientLaw amplitude)
      : gaussian_(gaussian), cov_(cov), length_(length), amplitude_(std::move(amplitude)) {}

  bool gaussian_;
  CovarianceKind cov_;
  double length_;
  CoefficientLaw amplitude_;
};

enum class ScheduleFamily { power, harmonic, log_harmonic, explicit_sequence };

/// Level amplitudes a_k and dilations b_k, k = 1..size(). Index 0 is level 1.
struct ScalingSchedule {
  std::vector<double> a;
  std::vector<double> b;
  ScheduleFamily family = ScheduleFamily::explicit_sequence;
  double exponent = 0.0;  // only for ScheduleFamily::power

  std::size_t size() const noexcept { return a.size(); }
  /// c_k = log b_k - sum_{j<=k} a_j^2 for levels with b_k > 0 (nullopt otherwise).
  std::vector<std::optional<double>> offsets() const;
};

/// Built-in dilation schedules:
///   power:        a_k = k^-exponent, b_k = exp(k^(1-2 exponent) / (1 - 2 exponent)), exponent in (1/3, 1/2)
///   harmonic:     a_k = k^-1/2, b_k = k
///   log_harmonic: a_k = (k log k)^-1/2, b_k = log k, a_1 = b_1 = 0
ScalingSchedule build_schedule(ScheduleFamily family, std::size_t n_max, double exponent = 0.4);
/// Explicit sequences; validated for equal length, finiteness and a_k, b_k >= 0.
ScalingSchedule build_schedule(std::vector<double> a, std::vector<double> b);

/// X_k(x) = a_k Y_k(b_k x).
struct DilatedModel {
  StationaryBase base;
  ScalingSchedule schedule;
};

/// Coefficients drawn for one level. Fourier: (A_k, B_k). Cosine process:
/// (L, U) with amplitude sqrt(2) L and phase U. Gaussian bases keep nothing;
/// their realization is regenerated from the level stream.
struct LevelDraw {
  double first = 0.0;
  double second = 0.0;
};

struct SecondMoments {
  double var_x;
  double var_y;
  double cov;
};

/// Either concrete family behind one interface. Immutable.
class FieldModel {
 public:
  FieldModel(FourierModel m) : model_(std::move(m)) {}
  FieldModel(DilatedModel m) : model_(std::move(m)) {}

  bool is_fourier() const noexcept { return std::holds_alternative<FourierModel>(model_); }
  const FourierModel* fourier() const noexcept { return std::get_if<FourierModel>(&model_); }
  const DilatedModel* dilated() const noexcept { return std::get_if<DilatedModel>(&model_); }
  std::string name() const;

  /// Largest level the model can produce (schedule length for dilated models).
  std::size_t max_level() const noexcept;
  /// Largest pair distance at which the covariance is log-correlated.
  double delta() const noexcept;
  /// Highest frequency or dilation active among levels 1..n.
  double max_frequency(std::size_t n) const;

  /// E X_k(x)^2; independent of x for both families.
  double level_variance(std::size_t k) const;
  SecondMoments level_second_moments(std::size_t k, double x, double y) const;

  /// E exp(beta X_k(x)), exact (quadrature for the cosine process).
  cplx level_normalizer(std::size_t k, double x, cplx beta) const;
  cplx log_level_normalizer(std::size_t k, double x, cplx beta) const;

  /// E exp(xi1 X_k(x) + xi2 X_k(y)).
  cplx joint_level_mgf(std::size_t k, double x, double y, cplx xi1, cplx xi2) const;
  /// Logarithm of joint_level_mgf, principal branch of each closed-form factor.
  cplx log_joint_level_mgf(std::size_t k, double x, double y, cplx xi1, cplx xi2) const;

  /// E|X_k(x)|^q.
  double level_abs_moment(std::size_t k, double x, double q) const;

  /// One realization of X_k on `points`. Deterministic given the generator state.
  std::vector<double> sample_level(std::size_t k, std::span<const double> points, Stream& rng) const;

  /// Coefficients of level k (Fourier and cosine process only).
  LevelDraw draw_coefficients(std::size_t k, Stream& rng) const;
  /// Adds X_k evaluated from recorded coefficients to `accum` (Fourier and cosine process only).
  void add_level(std::size_t k, const LevelDraw& draw, std::span<const double> points,
                 std::span<double> accum) const;
  /// True when a level is fully described by its LevelDraw.
  bool draws_are_coefficients() const noexcept;

 private:
  std::variant<FourierModel, DilatedModel> model_;
};

/// Convenience: E exp(beta X_k(x)).
inline cplx level_normalizer(const FieldModel& m, std::size_t k, double x, cplx beta) {
  return m.level_normalizer(k, x, beta);
}
inline SecondMoments level_second_moments(const FieldModel& m, std::size_t k, double x, double y) {
  return m.level_second_moments(k, x, y);
}
inline std::vector<double> sample_level(const FieldModel& m, std::size_t k,
                                        std::span<const double> points, Stream& rng) {
  return m.sample_level(k, points, rng);
}
inline cplx mgf(const CoefficientLaw& law, cplx z) { return law.mgf(z); }

// ---------------------------------------------------------------------------
// Assumption audit
// ---------------------------------------------------------------------------

struct AuditOptions {
  std::vector<double> sample_x{0.0, 0.1, 0.25, 0.37};
  double lambda_max = 4.0;
  std::size_t lambda_points = 17;
};

struct AuditReport {
  double epsilon = 0.0;
  /// (level, sup over sampled x of sum_{k<=level} (E|X_k(x)|^{3+eps})^{3/(3+eps)}).
  std::vector<std::pair<std::size_t, double>> moment_partial_sums;
  /// Power-law exponent s of the summand estimated from the last two dyadic windows.
  std::optional<double> summand_exponent;
  std::string moment_flag;  // "bounded", "divergent" or "inconclusive"
  double min_normalizer = 0.0;  // over lambda grid, sampled x, k <= n
  double max_normalizer = 0.0;
  std::string exp_moment_flag;  // "pass" or "fail"
  std::string decay_flag;       // "ok" or "decay assumption unmet"
};

AuditReport assumption_audit(const FieldModel& model, std::size_t n, double epsilon,
                             const AuditOptions& options = {});

/// E|G|^q for a standard Gaussian.
double gaussian_abs_moment(double q);

}  // namespace chaoslab
