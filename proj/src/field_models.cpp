#include "chaoslab/field_models.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "chaoslab/errors.hpp"
#include "chaoslab/fft.hpp"

namespace chaoslab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kLn2 = std::numbers::ln2;

// cos(2 pi t) and sin(2 pi t) after reducing t to [-1/2, 1/2].
inline double cos2pi(double t) { return std::cos(2.0 * kPi * (t - std::nearbyint(t))); }
inline double sin2pi(double t) { return std::sin(2.0 * kPi * (t - std::nearbyint(t))); }

// Mean of a smooth 2 pi-periodic function; trapezoid sums are spectrally
// accurate, so the point count is doubled until two rules agree.
template <typename F>
cplx periodic_mean(F&& fn, const char* what) {
  auto rule = [&](std::size_t m) {
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < m; ++j) acc += fn(2.0 * kPi * static_cast<double>(j) / static_cast<double>(m));
    return acc / static_cast<double>(m);
  };
  cplx prev = rule(16);
  for (std::size_t m = 32; m <= (1u << 16); m *= 2) {
    const cplx cur = rule(m);
    if (std::abs(cur - prev) <= 1e-13 * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw PrecisionError(std::string("periodic quadrature did not converge for ") + what);
}

double sample_normal(Stream& rng) {
  std::normal_distribution<double> nd;
  return nd(rng);
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Exact sampling of a stationary Gaussian process on n equispaced points by
// circulant embedding. The embedding is enlarged until the spectrum is
// nonnegative up to a clamp of 1e-8 times its maximum.
std::vector<double> circulant_sample(const StationaryBase& base, std::size_t n, double spacing,
                                     Stream& rng) {
  constexpr std::size_t kMaxEmbedding = std::size_t{1} << 22;
  std::size_t m = std::max<std::size_t>(2, next_pow2(2 * (n - 1)));
  std::vector<cplx> spectrum;
  for (;;) {
    spectrum.assign(m, cplx{});
    for (std::size_t i = 0; i < m; ++i) {
      const double lag = static_cast<double>(std::min(i, m - i)) * spacing;
      spectrum[i] = base.covariance(lag);
    }
    fft::complex_dft(spectrum, fft::Direction::forward);
    double lmax = 0.0, lmin = std::numeric_limits<double>::infinity();
    std::size_t imin = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const double l = spectrum[i].real();
      lmax = std::max(lmax, l);
      if (l < lmin) {
        lmin = l;
        imin = i;
      }
    }
    if (lmin >= -1e-8 * lmax) break;
    if (m >= kMaxEmbedding) {
      std::ostringstream os;
      os << "circulant embedding failed: eigenvalue " << imin << " = " << lmin
         << " below -1e-8 * " << lmax << " at embedding size " << m;
      throw EmbeddingError(os.str());
    }
    m *= 2;
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<cplx> w(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double scale = std::sqrt(std::max(spectrum[i].real(), 0.0) * inv_m);
    const double z1 = sample_normal(rng);
    const double z2 = sample_normal(rng);
    w[i] = scale * cplx{z1, z2};
  }
  fft::complex_dft(w, fft::Direction::forward);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = w[i].real();
  return out;
}

// exp(u) - 1 - u without cancellation for |u| < 1/2.
cplx exp_remainder2(cplx u) {
  cplx term = 0.5 * u * u;
  cplx acc = term;
  for (int n = 3; n < 30 && std::abs(term) > 1e-18 * std::abs(acc); ++n) {
    term *= u / static_cast<double>(n);
    acc += term;
  }
  return acc;
}

bool equispaced(std::span<const double> pts, double& spacing) {
  spacing = pts.size() > 1 ? pts[1] - pts[0] : 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (std::abs((pts[i] - pts[i - 1]) - spacing) > 1e-12 * std::max(1.0, std::abs(spacing)))
      return false;
  }
  return spacing > 0.0;
}

}  // namespace

cplx clog1p(cplx u) {
  const double re = u.real(), im = u.imag();
  return {0.5 * std::log1p(2.0 * re + re * re + im * im), std::atan2(im, 1.0 + re)};
}

// ---------------------------------------------------------------------------
// CoefficientLaw
// ---------------------------------------------------------------------------

CoefficientLaw CoefficientLaw::rademacher() { return {LawKind::rademacher, 0.5, -1.0, 1.0}; }
CoefficientLaw CoefficientLaw::uniform() { return {LawKind::uniform, 0.0, -kSqrt3, kSqrt3}; }
CoefficientLaw CoefficientLaw::gaussian() { return {LawKind::gaussian, 0.0, 0.0, 0.0}; }

CoefficientLaw CoefficientLaw::two_point(double p, double a, double b) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("two_point: p must lie in (0, 1)");
  const double mean = p * a + (1.0 - p) * b;
  const double var = p * a * a + (1.0 - p) * b * b;
  if (std::abs(mean) > 1e-12 || std::abs(var - 1.0) > 1e-12) {
    std::ostringstream os;
    os.precision(17);
    os << "two_point: law must be centered with unit variance (mean " << mean << ", variance "
       << var << ")";
    throw ParameterError(os.str());
  }
  return {LawKind::two_point, p, a, b};
}

CoefficientLaw CoefficientLaw::two_point(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ParameterError("two_point: p must lie in (0, 1)");
  return two_point(p, -std::sqrt((1.0 - p) / p), std::sqrt(p / (1.0 - p)));
}

std::string CoefficientLaw::name() const {
  switch (kind_) {
    case LawKind::rademacher: return "rademacher";
    case LawKind::uniform: return "uniform";
    case LawKind::gaussian: return "gaussian";
    case LawKind::two_point: {
      std::ostringstream os;
      os.precision(17);
      os << "two_point(" << p_ << "," << a_ << "," << b_ << ")";
      return os.str();
    }
  }
  return "?";
}

cplx CoefficientLaw::mgf(cplx z) const {
  switch (kind_) {
    case LawKind::rademacher: return std::cosh(z);
    case LawKind::uniform: {
      const cplx w = kSqrt3 * z;
      if (std::abs(w) < 1e-2) {
        const cplx w2 = w * w;
        return 1.0 + w2 / 6.0 * (1.0 + w2 / 20.0 * (1.0 + w2 / 42.0 * (1.0 + w2 / 72.0)));
      }
      return std::sinh(w) / w;
    }
    case LawKind::gaussian: return std::exp(0.5 * z * z);
    case LawKind::two_point: return p_ * std::exp(z * a_) + (1.0 - p_) * std::exp(z * b_);
  }
  return {};
}

cplx CoefficientLaw::log_mgf(cplx z) const {
  switch (kind_) {
    case LawKind::rademacher: {
      const cplx zz = z.real() < 0.0 ? -z : z;
      if (std::abs(zz) < 0.25) {
        const cplx s = std::sinh(0.5 * zz);
        return clog1p(2.0 * s * s);
      }
      return zz - kLn2 + clog1p(std::exp(-2.0 * zz));
    }
    case LawKind::uniform: {
      cplx w = kSqrt3 * z;
      if (w.real() < 0.0) w = -w;
      if (std::abs(w) < 0.25) {
        const cplx w2 = w * w;
        const cplx s = w2 / 6.0 * (1.0 + w2 / 20.0 * (1.0 + w2 / 42.0 * (1.0 + w2 / 72.0 * (1.0 + w2 / 110.0))));
        return clog1p(s);
      }
      return w + clog1p(-std::exp(-2.0 * w)) - kLn2 - std::log(w);
    }
    case LawKind::gaussian: return 0.5 * z * z;
    case LawKind::two_point: {
      if (std::abs(z) * std::max(std::abs(a_), std::abs(b_)) < 0.5) {
        // The linear terms cancel because the law is centered.
        return clog1p(p_ * exp_remainder2(z * a_) + (1.0 - p_) * exp_remainder2(z * b_));
      }
      const cplx d = z * (b_ - a_);
      if (d.real() <= 0.0) return z * a_ + std::log(p_ + (1.0 - p_) * std::exp(d));
      return z * b_ + std::log((1.0 - p_) + p_ * std::exp(-d));
    }
  }
  return {};
}

double CoefficientLaw::sample(Stream& rng) const {
  switch (kind_) {
    case LawKind::rademacher: return (rng() >> 63) != 0 ? 1.0 : -1.0;
    case LawKind::uniform: return kSqrt3 * (2.0 * rng.uniform() - 1.0);
    case LawKind::gaussian: return sample_normal(rng);
    case LawKind::two_point: return rng.uniform() < p_ ? a_ : b_;
  }
  return 0.0;
}

double gaussian_abs_moment(double q) {
  return std::pow(2.0, 0.5 * q) * std::tgamma(0.5 * (q + 1.0)) / std::sqrt(kPi);
}

double CoefficientLaw::abs_moment(double q) const {
  if (!(q > 0.0)) throw DomainError("abs_moment: q must be positive");
  switch (kind_) {
    case LawKind::rademacher: return 1.0;
    case LawKind::uniform: return std::pow(3.0, 0.5 * q) / (q + 1.0);
    case LawKind::gaussian: return gaussian_abs_moment(q);
    case LawKind::two_point:
      return p_ * std::pow(std::abs(a_), q) + (1.0 - p_) * std::pow(std::abs(b_), q);
  }
  return 0.0;
}

std::vector<std::pair<double, double>> CoefficientLaw::support() const {
  switch (kind_) {
    case LawKind::rademacher: return {{-1.0, 0.5}, {1.0, 0.5}};
    case LawKind::two_point: return {{a_, p_}, {b_, 1.0 - p_}};
    default: return {};
  }
}

// ---------------------------------------------------------------------------
// StationaryBase and schedules
// ---------------------------------------------------------------------------

StationaryBase StationaryBase::gaussian_stationary(CovarianceKind cov, double length) {
  if (!(length > 0.0)) throw ParameterError("gaussian_stationary: length must be positive");
  return {true, cov, length, CoefficientLaw::gaussian()};
}

StationaryBase StationaryBase::cosine_process(CoefficientLaw amplitude) {
  return {false, CovarianceKind::squared_exponential, 1.0, std::move(amplitude)};
}

double StationaryBase::covariance(double t) const {
  t = std::abs(t);
  if (!gaussian_) return std::cos(t);
  if (cov_ == CovarianceKind::squared_exponential) {
    const double u = t / length_;
    return std::exp(-u * u);
  }
  return std::exp(-t / length_);
}

std::string StationaryBase::name() const {
  if (!gaussian_) return "cosine(" + amplitude_.name() + ")";
  return cov_ == CovarianceKind::squared_exponential ? "gaussian_stationary(sqexp)"
                                                     : "gaussian_stationary(exp)";
}

std::vector<std::optional<double>> ScalingSchedule::offsets() const {
  std::vector<std::optional<double>> c(a.size());
  double cum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cum += a[i] * a[i];
    if (b[i] > 0.0) c[i] = std::log(b[i]) - cum;
  }
  return c;
}

ScalingSchedule build_schedule(ScheduleFamily family, std::size_t n_max, double exponent) {
  if (n_max < 1) throw ParameterError("build_schedule: n_max must be at least 1");
  ScalingSchedule s;
  s.family = family;
  s.a.resize(n_max);
  s.b.resize(n_max);
  switch (family) {
    case ScheduleFamily::power: {
      if (!(exponent > 1.0 / 3.0 && exponent < 0.5))
        throw ParameterError("build_schedule: power-family exponent must lie in (1/3, 1/2)");
      s.exponent = exponent;
      const double e = 1.0 - 2.0 * exponent;
      for (std::size_t i = 0; i < n_max; ++i) {
        const double k = static_cast<double>(i + 1);
        s.a[i] = std::pow(k, -exponent);
        s.b[i] = std::exp(std::pow(k, e) / e);
      }
      break;
    }
    case ScheduleFamily::harmonic:
      for (std::size_t i = 0; i < n_max; ++i) {
        const double k = static_cast<double>(i + 1);
        s.a[i] = 1.0 / std::sqrt(k);
        s.b[i] = k;
      }
      break;
    case ScheduleFamily::log_harmonic:
      s.a[0] = 0.0;
      s.b[0] = 0.0;
      for (std::size_t i = 1; i < n_max; ++i) {
        const double k = static_cast<double>(i + 1);
        s.a[i] = 1.0 / std::sqrt(k * std::log(k));
        s.b[i] = std::log(k);
      }
      break;
    case ScheduleFamily::explicit_sequence:
      throw ParameterError("build_schedule: explicit schedules take the sequences directly");
  }
  return s;
}

ScalingSchedule build_schedule(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || a.size() != b.size())
    throw ParameterError("build_schedule: a and b must be nonempty and of equal length");
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]) || !std::isfinite(b[i]) || a[i] < 0.0 || b[i] < 0.0)
      throw ParameterError("build_schedule: entry " + std::to_string(i + 1) +
                           " must be finite and nonnegative");
  }
  ScalingSchedule s;
  s.a = std::move(a);
  s.b = std::move(b);
  s.family = ScheduleFamily::explicit_sequence;
  return s;
}

// ---------------------------------------------------------------------------
// FieldModel
// ---------------------------------------------------------------------------

namespace {

void check_level(std::size_t k, std::size_t max_level) {
  if (k < 1 || k > max_level)
    throw DomainError("level " + std::to_string(k) + " outside 1.." + std::to_string(max_level));
}

}  // namespace

std::string FieldModel::name() const {
  if (const auto* f = fourier()) return "fourier(" + f->law.name() + ")";
  const auto* d = dilated();
  std::string fam;
  switch (d->schedule.family) {
    case ScheduleFamily::power: fam = "power"; break;
    case ScheduleFamily::harmonic: fam = "harmonic"; break;
    case ScheduleFamily::log_harmonic: fam = "log_harmonic"; break;
    case ScheduleFamily::explicit_sequence: fam = "explicit"; break;
  }
  return "dilated(" + d->base.name() + "," + fam + ")";
}

std::size_t FieldModel::max_level() const noexcept {
  if (is_fourier()) return std::numeric_limits<std::size_t>::max();
  return dilated()->schedule.size();
}

double FieldModel::delta() const noexcept { return is_fourier() ? FourierModel::delta : 1.0; }

double FieldModel::max_frequency(std::size_t n) const {
  if (is_fourier()) return static_cast<double>(n);
  const auto& b = dilated()->schedule.b;
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(n, b.size()); ++i) m = std::max(m, b[i]);
  return m;
}

bool FieldModel::draws_are_coefficients() const noexcept {
  return is_fourier() || !dilated()->base.is_gaussian();
}

double FieldModel::level_variance(std::size_t k) const {
  check_level(k, max_level());
  if (is_fourier()) return 1.0 / static_cast<double>(k);
  const double a = dilated()->schedule.a[k - 1];
  return a * a;
}

SecondMoments FieldModel::level_second_moments(std::size_t k, double x, double y) const {
  check_level(k, max_level());
  if (is_fourier()) {
    const double kk = static_cast<double>(k);
    return {1.0 / kk, 1.0 / kk, cos2pi(kk * (x - y)) / kk};
  }
  const auto& d = *dilated();
  const double a2 = d.schedule.a[k - 1] * d.schedule.a[k - 1];
  return {a2, a2, a2 * d.base.covariance(d.schedule.b[k - 1] * std::abs(x - y))};
}

cplx FieldModel::level_normalizer(std::size_t k, double x, cplx beta) const {
  check_level(k, max_level());
  if (const auto* f = fourier()) {
    const double kk = static_cast<double>(k);
    const double r = 1.0 / std::sqrt(kk);
    return f->law.mgf(beta * (r * cos2pi(kk * x))) * f->law.mgf(beta * (r * sin2pi(kk * x)));
  }
  const auto& d = *dilated();
  const double a = d.schedule.a[k - 1];
  if (d.base.is_gaussian()) return std::exp(0.5 * beta * beta * (a * a));
  const auto& law = d.base.amplitude_law();
  const cplx w = beta * (a * kSqrt2);
  return periodic_mean([&](double u) { return law.mgf(w * std::cos(u)); }, "cosine normalizer");
}

cplx FieldModel::log_level_normalizer(std::size_t k, double x, cplx beta) const {
  check_level(k, max_level());
  if (const auto* f = fourier()) {
    const double kk = static_cast<double>(k);
    const double r = 1.0 / std::sqrt(kk);
    return f->law.log_mgf(beta * (r * cos2pi(kk * x))) + f->law.log_mgf(beta * (r * sin2pi(kk * x)));
  }
  const auto& d = *dilated();
  const double a = d.schedule.a[k - 1];
  if (d.base.is_gaussian()) return 0.5 * beta * beta * (a * a);
  return std::log(level_normalizer(k, x, beta));
}

cplx FieldModel::joint_level_mgf(std::size_t k, double x, double y, cplx xi1, cplx xi2) const {
  check_level(k, max_level());
  if (const auto* f = fourier()) {
    const double kk = static_cast<double>(k);
    const double r = 1.0 / std::sqrt(kk);
    const cplx w1 = r * (xi1 * cos2pi(kk * x) + xi2 * cos2pi(kk * y));
    const cplx w2 = r * (xi1 * sin2pi(kk * x) + xi2 * sin2pi(kk * y));
    return f->law.mgf(w1) * f->law.mgf(w2);
  }
  const auto& d = *dilated();
  const double a = d.schedule.a[k - 1];
  const double b = d.schedule.b[k - 1];
  if (d.base.is_gaussian()) {
    const double rho = d.base.covariance(b * std::abs(x - y));
    return std::exp(0.5 * a * a * (xi1 * xi1 + xi2 * xi2 + 2.0 * rho * xi1 * xi2));
  }
  const auto& law = d.base.amplitude_law();
  const double s = a * kSqrt2;
  return periodic_mean(
      [&](double u) { return law.mgf(s * (xi1 * std::cos(b * x + u) + xi2 * std::cos(b * y + u))); },
      "cosine joint mgf");
}

cplx FieldModel::log_joint_level_mgf(std::size_t k, double x, double y, cplx xi1, cplx xi2) const {
  check_level(k, max_level());
  if (const auto* f = fourier()) {
    const double kk = static_cast<double>(k);
    const double r = 1.0 / std::sqrt(kk);
    const cplx w1 = r * (xi1 * cos2pi(kk * x) + xi2 * cos2pi(kk * y));
    const cplx w2 = r * (xi1 * sin2pi(kk * x) + xi2 * sin2pi(kk * y));
    return f->law.log_mgf(w1) + f->law.log_mgf(w2);
  }
  const auto& d = *dilated();
  if (d.base.is_gaussian()) {
    const double a = d.schedule.a[k - 1];
    const double rho = d.base.covariance(d.schedule.b[k - 1] * std::abs(x - y));
    return 0.5 * a * a * (xi1 * xi1 + xi2 * xi2 + 2.0 * rho * xi1 * xi2);
  }
  return std::log(joint_level_mgf(k, x, y, xi1, xi2));
}

double FieldModel::level_abs_moment(std::size_t k, double x, double q) const {
  check_level(k, max_level());
  if (!(q > 0.0)) throw DomainError("level_abs_moment: q must be positive");
  if (const auto* f = fourier()) {
    const double kk = static_cast<double>(k);
    const double c = cos2pi(kk * x), s = sin2pi(kk * x);
    const double scale = std::pow(kk, -0.5 * q);
    const auto& law = f->law;
    if (law.kind() == LawKind::gaussian) return scale * gaussian_abs_moment(q);
    if (law.finitely_supported()) {
      double acc = 0.0;
      for (const auto& [va, pa] : law.support())
        for (const auto& [vb, pb] : law.support()) acc += pa * pb * std::pow(std::abs(va * c + vb * s), q);
      return scale * acc;
    }
    // Uniform coefficients: integrate over A in closed form, then over B numerically.
    const double h = kSqrt3;
    auto prim = [q](double w) { return std::copysign(std::pow(std::abs(w), q + 1.0), w) / (q + 1.0); };
    auto inner = [&](double v) {
      if (std::abs(c) < 1e-14) return std::pow(std::abs(v * s), q);
      const double w1 = -h * c + v * s, w2 = h * c + v * s;
      return (prim(w2) - prim(w1)) / (2.0 * h * c);
    };
    const double integral =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(inner, -h, h, 15, 1e-13);
    return scale * integral / (2.0 * h);
  }
  const auto& d = *dilated();
  const double a = d.schedule.a[k - 1];
  if (a == 0.0) return 0.0;
  double base_moment;
  if (d.base.is_gaussian()) {
    base_moment = gaussian_abs_moment(q);
  } else {
    const double cos_moment = std::tgamma(0.5 * (q + 1.0)) / (std::sqrt(kPi) * std::tgamma(0.5 * q + 1.0));
    base_moment = std::pow(2.0, 0.5 * q) * d.base.amplitude_law().abs_moment(q) * cos_moment;
  }
  return std::pow(a, q) * base_moment;
}

LevelDraw FieldModel::draw_coefficients(std::size_t k, Stream& rng) const {
  check_level(k, max_level());
  if (const auto* f = fourier()) {
    const double first = f->law.sample(rng);
    const double second = f->law.sample(rng);
    return {first, second};
  }
  const auto& d = *dilated();
  if (d.base.is_gaussian()) throw UnsupportedModeError("gaussian bases have no coefficient draws");
  const double amp = d.base.amplitude_law().sample(rng);
  const double phase = 2.0 * kPi * rng.uniform();
  return {amp, phase};
}

void FieldModel::add_level(std::size_t k, const LevelDraw& draw, std::span<const double> points,
                           std::span<double> accum) const {
  check_level(k, max_level());
  if (fourier()) {
    const double kk = static_cast<double>(k);
    const double r = 1.0 / std::sqrt(kk);
    for (std::size_t i = 0; i < points.size(); ++i)
      accum[i] += r * (draw.first * cos2pi(kk * points[i]) + draw.second * sin2pi(kk * points[i]));
    return;
  }
  const auto& d = *dilated();
  if (d.base.is_gaussian()) throw UnsupportedModeError("gaussian bases have no coefficient draws");
  const double a = d.schedule.a[k - 1];
  const double b = d.schedule.b[k - 1];
  const double amp = a * kSqrt2 * draw.first;
  for (std::size_t i = 0; i < points.size(); ++i) accum[i] += amp * std::cos(b * points[i] + draw.second);
}

std::vector<double> FieldModel::sample_level(std::size_t k, std::span<const double> points,
                                             Stream& rng) const {
  if (points.empty()) throw DomainError("sample_level: grid must be nonempty");
  check_level(k, max_level());
  std::vector<double> out(points.size(), 0.0);
  if (draws_are_coefficients()) {
    add_level(k, draw_coefficients(k, rng), points, out);
    return out;
  }
  const auto& d = *dilated();
  const double a = d.schedule.a[k - 1];
  const double b = d.schedule.b[k - 1];
  if (a == 0.0) return out;
  double spacing = 0.0;
  if (b == 0.0 || points.size() == 1) {
    std::fill(out.begin(), out.end(), a * sample_normal(rng));
    return out;
  }
  if (!equispaced(points, spacing))
    throw ParameterError("sample_level: gaussian bases require an equispaced increasing grid");
  const auto y = circulant_sample(d.base, points.size(), spacing * b, rng);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a * y[i];
  return out;
}

// ---------------------------------------------------------------------------
// Assumption audit
// ---------------------------------------------------------------------------

AuditReport assumption_audit(const FieldModel& model, std::size_t n, double epsilon,
                             const AuditOptions& options) {
  if (n < 1) throw DomainError("assumption_audit: n must be at least 1");
  if (!(epsilon > 0.0)) throw DomainError("assumption_audit: epsilon must be positive");
  n = std::min(n, model.max_level());
  AuditReport report;
  report.epsilon = epsilon;
  const double q = 3.0 + epsilon;

  // Per-x partial sums; the report tracks their supremum over x.
  std::vector<double> cum(options.sample_x.size(), 0.0);
  std::vector<std::size_t> checkpoints;
  for (std::size_t c = 1; c <= n; c *= 2) checkpoints.push_back(c);
  if (checkpoints.back() != n) checkpoints.push_back(n);
  std::size_t next = 0;
  for (std::size_t k = 1; k <= n; ++k) {
    for (std::size_t i = 0; i < cum.size(); ++i)
      cum[i] += std::pow(model.level_abs_moment(k, options.sample_x[i], q), 3.0 / q);
    if (next < checkpoints.size() && checkpoints[next] == k) {
      report.moment_partial_sums.emplace_back(k, *std::max_element(cum.begin(), cum.end()));
      ++next;
    }
  }

  // Dyadic windows (n/4, n/2] and (n/2, n]: a summand ~ k^-s gives a
  // window ratio of 2^(1-s).
  if (n >= 4) {
    const std::size_t q1 = n / 4, q2 = n / 2;
    std::vector<double> w1(cum.size(), 0.0), w2(cum.size(), 0.0);
    for (std::size_t i = 0; i < cum.size(); ++i) {
      for (std::size_t k = q1 + 1; k <= n; ++k) {
        const double term = std::pow(model.level_abs_moment(k, options.sample_x[i], q), 3.0 / q);
        (k <= q2 ? w1 : w2)[i] += term;
      }
    }
    const double s1 = *std::max_element(w1.begin(), w1.end());
    const double s2 = *std::max_element(w2.begin(), w2.end());
    if (s1 > 0.0 && s2 > 0.0) {
      const double ratio = s2 / s1;
      report.summand_exponent = 1.0 - std::log2(ratio);
      report.moment_flag = *report.summand_exponent > 1.0 ? "bounded" : "divergent";
    } else if (s2 == 0.0) {
      report.moment_flag = "bounded";
    } else {
      report.moment_flag = "inconclusive";
    }
  } else {
    report.moment_flag = "inconclusive";
  }

  double mn = std::numeric_limits<double>::infinity(), mx = 0.0;
  bool finite = true;
  const std::size_t lp = std::max<std::size_t>(options.lambda_points, 2);
  for (std::size_t li = 0; li < lp; ++li) {
    const double lambda = -options.lambda_max + 2.0 * options.lambda_max * static_cast<double>(li) /
                                                    static_cast<double>(lp - 1);
    for (std::size_t k = 1; k <= n; ++k) {
      for (double x : options.sample_x) {
        const double v = std::abs(model.level_normalizer(k, x, lambda));
        if (!std::isfinite(v)) finite = false;
        mn = std::min(mn, v);
        mx = std::max(mx, v);
      }
    }
  }
  report.min_normalizer = mn;
  report.max_normalizer = mx;
  report.exp_moment_flag = finite ? "pass" : "fail";
  const auto* d = model.dilated();
  report.decay_flag = (d != nullptr && !d->base.decay_assumption_met()) ? "decay assumption unmet" : "ok";
  return report;
}

}  // namespace chaoslab
