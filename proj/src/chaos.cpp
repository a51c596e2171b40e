#include "chaoslab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "chaoslab/errors.hpp"
#include "chaoslab/fft.hpp"

namespace chaoslab {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

}  // namespace

std::vector<double> QuadratureSpec::points() const {
  const std::size_t n = size();
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<double>(i) / static_cast<double>(n);
  return x;
}

void validate(const QuadratureSpec& q) {
  if (q.g < 1 || q.g > 24) throw ParameterError("quadrature: g must lie in [1, 24]");
  if (!(q.oversample >= 8.0)) throw ParameterError("quadrature: oversample factor must be at least 8");
}

std::size_t resolvable_level(const FieldModel& model, const QuadratureSpec& q) {
  const double n = static_cast<double>(q.size());
  if (model.is_fourier()) return static_cast<std::size_t>(std::floor(n / q.oversample));
  const auto& b = model.dilated()->schedule.b;
  double bmax = 0.0;
  std::size_t k = 0;
  while (k < b.size()) {
    bmax = std::max(bmax, b[k]);
    if (q.oversample * bmax > n) break;
    ++k;
  }
  return k;
}

// ---------------------------------------------------------------------------
// PathState
// ---------------------------------------------------------------------------

PathState::PathState(std::shared_ptr<const FieldModel> model, QuadratureSpec quad, PathKey key)
    : model_(std::move(model)), quad_(quad), key_(key) {
  if (!model_) throw ParameterError("PathState: model must not be null");
  validate(quad_);
  cap_ = chaoslab::resolvable_level(*model_, quad_);
  points_ = std::make_shared<const std::vector<double>>(quad_.points());
  if (cap_ >= 1) table_ = std::make_shared<const BlockIndexTable>(*model_, cap_);
  auto zeros = std::make_shared<const std::vector<double>>(quad_.size(), 0.0);
  field_ = zeros;
  snapshots_[0] = zeros;
  snapshot_blocks(*zeros);
}

std::span<const double> PathState::block(std::size_t j) const {
  auto it = snapshots_.find(j);
  if (it == snapshots_.end())
    throw DomainError("block " + std::to_string(j) + " not reached at level " + std::to_string(level()));
  return *it->second;
}

void PathState::snapshot_blocks(const std::vector<double>& field) {
  if (!table_) return;
  const std::size_t n = level();
  std::shared_ptr<const std::vector<double>> shared;
  for (std::size_t j = 0; j <= table_->max_block(); ++j) {
    const std::size_t end = table_->t(j) - 1;
    if (end > n) break;
    if (end != n || snapshots_.count(j) != 0) continue;
    if (!shared) shared = std::make_shared<const std::vector<double>>(field);
    snapshots_[j] = shared;
  }
}

std::vector<double> PathState::synthesize(std::size_t n) const {
  std::vector<cplx> coeffs(n + 1, cplx{});
  for (std::size_t k = 1; k <= n; ++k) {
    const double r = 1.0 / std::sqrt(static_cast<double>(k));
    coeffs[k] = r * cplx{draws_[k - 1].draw.first, -draws_[k - 1].draw.second};
  }
  std::vector<double> out(quad_.size());
  fft::real_synthesis(coeffs, out);
  return out;
}

void PathState::append_level(std::vector<double>& accum, std::size_t k, const LevelRecord& rec) const {
  if (model_->draws_are_coefficients()) {
    model_->add_level(k, rec.draw, *points_, accum);
    return;
  }
  Stream s = level_stream(rec.key, static_cast<std::uint32_t>(k));
  const auto v = model_->sample_level(k, *points_, s);
  for (std::size_t i = 0; i < accum.size(); ++i) accum[i] += v[i];
}

std::vector<double> PathState::recompute_field() const {
  if (model_->is_fourier()) return synthesize(level());
  std::vector<double> accum(quad_.size(), 0.0);
  for (std::size_t k = 1; k <= level(); ++k) append_level(accum, k, draws_[k - 1]);
  return accum;
}

PathState extend_path(const PathState& state, std::size_t target, const PathKey& key) {
  if (target < state.level())
    throw DomainError("extend_path: target level " + std::to_string(target) + " is below the current level " +
                      std::to_string(state.level()));
  if (target > state.cap_) {
    std::ostringstream os;
    os << "extend_path: level " << target << " needs a finer grid; 2^" << state.quad_.g << " points with oversample "
       << state.quad_.oversample << " resolve levels up to " << state.cap_;
    throw ResolutionError(os.str());
  }
  if (target == state.level()) return state;
  PathState out = state;
  const FieldModel& model = *state.model_;
  const bool fourier = model.is_fourier();
  const bool coeffs = model.draws_are_coefficients();
  std::vector<double> accum;
  if (!fourier) accum = *state.field_;
  for (std::size_t k = state.level() + 1; k <= target; ++k) {
    LevelRecord rec;
    rec.key = key;
    if (coeffs) {
      Stream s = level_stream(key, static_cast<std::uint32_t>(k));
      rec.draw = model.draw_coefficients(k, s);
    }
    out.draws_.push_back(rec);
    if (!fourier) out.append_level(accum, k, rec);
    if (k == target) break;
    // Intermediate block boundaries need the field at that level.
    if (out.table_ && out.table_->max_block() > 0) {
      bool boundary = false;
      for (std::size_t j = 0; j <= out.table_->max_block(); ++j) {
        const std::size_t end = out.table_->t(j) - 1;
        if (end == k) boundary = true;
        if (end >= k) break;
      }
      if (boundary) out.snapshot_blocks(fourier ? out.synthesize(k) : accum);
    }
  }
  auto field = std::make_shared<const std::vector<double>>(fourier ? out.synthesize(target) : std::move(accum));
  out.field_ = field;
  out.snapshot_blocks(*field);
  return out;
}

PathState extend_with_draw(const PathState& state, const LevelDraw& draw) {
  const FieldModel& model = *state.model_;
  if (!model.draws_are_coefficients())
    throw UnsupportedModeError("extend_with_draw: gaussian bases have no coefficient draws");
  const std::size_t k = state.level() + 1;
  if (k > state.cap_)
    throw ResolutionError("extend_with_draw: level " + std::to_string(k) + " exceeds the resolvable level " +
                          std::to_string(state.cap_));
  PathState out = state;
  out.draws_.push_back({draw, state.key_, true});
  std::vector<double> field;
  if (model.is_fourier()) {
    field = out.synthesize(k);
  } else {
    field = *state.field_;
    out.append_level(field, k, out.draws_.back());
  }
  auto shared = std::make_shared<const std::vector<double>>(std::move(field));
  out.field_ = shared;
  out.snapshot_blocks(*shared);
  return out;
}

// ---------------------------------------------------------------------------
// Normalizers and weights
// ---------------------------------------------------------------------------

LogNormalizer::LogNormalizer(const FieldModel& model, std::span<const double> points, cplx beta,
                             std::vector<std::size_t> levels, double floor)
    : beta_(beta), min_modulus_(1.0) {
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  const std::size_t n = points.size();
  std::vector<cplx> cum(n, cplx{});
  const std::size_t last = levels.empty() ? 0 : levels.back();
  if (last > model.max_level())
    throw BudgetExhaustedError("LogNormalizer: level " + std::to_string(last) + " exceeds the model's levels");
  const double log_floor = std::log(floor);
  double min_re = std::numeric_limits<double>::infinity();
  auto fail = [&](std::size_t k, double x, double re) {
    std::ostringstream os;
    os << "normalizer |E exp(beta X_k(x))| = " << std::exp(re) << " below floor " << floor << " at x = " << x
       << ", level k = " << k << ", beta = " << beta;
    throw VanishingNormalizerError(os.str());
  };
  auto it = levels.begin();
  while (it != levels.end() && *it == 0) {
    table_[0] = cum;
    ++it;
  }
  const bool uniform_in_x = !model.is_fourier();
  for (std::size_t k = 1; k <= last; ++k) {
    if (uniform_in_x) {
      const cplx lg = model.log_level_normalizer(k, 0.0, beta);
      if (!(lg.real() >= log_floor)) fail(k, n ? points[0] : 0.0, lg.real());
      min_re = std::min(min_re, lg.real());
      for (auto& c : cum) c += lg;
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        const cplx lg = model.log_level_normalizer(k, points[i], beta);
        if (!(lg.real() >= log_floor)) fail(k, points[i], lg.real());
        min_re = std::min(min_re, lg.real());
        cum[i] += lg;
      }
    }
    if (it != levels.end() && *it == k) {
      table_[k] = cum;
      ++it;
    }
  }
  min_modulus_ = last == 0 ? 1.0 : std::exp(min_re);
}

std::span<const cplx> LogNormalizer::at(std::size_t level) const {
  auto it = table_.find(level);
  if (it == table_.end()) throw DomainError("LogNormalizer: level " + std::to_string(level) + " was not requested");
  return it->second;
}

std::vector<cplx> weight_from(std::span<const double> s, cplx beta, std::span<const cplx> log_norm) {
  if (s.size() != log_norm.size()) throw DomainError("weight: field and normalizer sizes differ");
  std::vector<cplx> w(s.size());
  if (beta.imag() == 0.0) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (log_norm[i].imag() == 0.0) {
        w[i] = std::exp(beta.real() * s[i] - log_norm[i].real());
      } else {
        w[i] = std::exp(beta * s[i] - log_norm[i]);
      }
    }
    return w;
  }
  for (std::size_t i = 0; i < s.size(); ++i) w[i] = std::exp(beta * s[i] - log_norm[i]);
  return w;
}

std::vector<cplx> weight_field(const PathState& state, cplx beta, const LogNormalizer& norm) {
  if (norm.beta() != beta) throw DomainError("weight_field: normalizer was built for a different beta");
  return weight_from(state.field(), beta, norm.at(state.level()));
}

std::vector<cplx> weight_field(const PathState& state, cplx beta) {
  const LogNormalizer norm(state.model(), state.points(), beta, {state.level()});
  return weight_field(state, beta, norm);
}

// ---------------------------------------------------------------------------
// Test functions and integration
// ---------------------------------------------------------------------------

TestFunction TestFunction::one() {
  TestFunction f;
  f.terms_.push_back({Kind::one, 1.0, {}, 0.0, 0.0, 0, 0});
  return f;
}

TestFunction TestFunction::poly(std::vector<cplx> coeffs) {
  if (coeffs.empty()) throw ParameterError("poly test function needs at least one coefficient");
  TestFunction f;
  f.terms_.push_back({Kind::poly, 1.0, std::move(coeffs), 0.0, 0.0, 0, 0});
  return f;
}

TestFunction TestFunction::trig(double freq, double phase) {
  TestFunction f;
  f.terms_.push_back({Kind::trig, 1.0, {}, freq, phase, 0, 0});
  return f;
}

TestFunction TestFunction::dyadic(unsigned l, std::size_t i) {
  if (l > 52) throw ParameterError("dyadic test function: level must be at most 52");
  if (i >= (std::size_t{1} << l)) throw ParameterError("dyadic test function: index outside [0, 2^l)");
  TestFunction f;
  f.terms_.push_back({Kind::dyadic, 1.0, {}, 0.0, 0.0, l, i});
  return f;
}

cplx TestFunction::operator()(double x) const {
  cplx acc{};
  for (const auto& t : terms_) {
    switch (t.kind) {
      case Kind::one: acc += t.coeff; break;
      case Kind::poly: {
        cplx v{};
        for (auto c = t.poly.rbegin(); c != t.poly.rend(); ++c) v = v * x + *c;
        acc += t.coeff * v;
        break;
      }
      case Kind::trig: acc += t.coeff * std::cos(2.0 * kPi * t.freq * x + t.phase); break;
      case Kind::dyadic: {
        const double w = std::ldexp(1.0, -static_cast<int>(t.l));
        const double lo = static_cast<double>(t.i) * w;
        if (x >= lo && x < lo + w) acc += t.coeff;
        break;
      }
    }
  }
  return acc;
}

std::vector<cplx> TestFunction::evaluate(std::span<const double> points) const {
  std::vector<cplx> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = (*this)(points[i]);
  return out;
}

TestFunction TestFunction::conj() const {
  TestFunction f = *this;
  for (auto& t : f.terms_) {
    t.coeff = std::conj(t.coeff);
    for (auto& c : t.poly) c = std::conj(c);
  }
  return f;
}

std::string TestFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t n = 0; n < terms_.size(); ++n) {
    const auto& t = terms_[n];
    if (n) os << " + ";
    if (t.coeff != cplx{1.0, 0.0}) os << t.coeff << "*";
    switch (t.kind) {
      case Kind::one: os << "one"; break;
      case Kind::poly:
        os << "poly(";
        for (std::size_t i = 0; i < t.poly.size(); ++i) os << (i ? "," : "") << t.poly[i];
        os << ")";
        break;
      case Kind::trig: os << "trig(" << t.freq << "," << t.phase << ")"; break;
      case Kind::dyadic: os << "dyadic(" << t.l << "," << t.i << ")"; break;
    }
  }
  return os.str();
}

TestFunction operator+(TestFunction a, const TestFunction& b) {
  a.terms_.insert(a.terms_.end(), b.terms_.begin(), b.terms_.end());
  return a;
}

TestFunction operator*(cplx c, TestFunction f) {
  for (auto& t : f.terms_) t.coeff *= c;
  return f;
}

cplx grid_average(std::span<const cplx> f, std::span<const cplx> w) {
  if (f.size() != w.size() || f.empty()) throw DomainError("grid_average: size mismatch");
  cplx acc{};
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * w[i];
  return acc / static_cast<double>(f.size());
}

ChaosValue integrate(const PathState& state, cplx beta, const TestFunction& f, const LogNormalizer& norm) {
  const auto w = weight_field(state, beta, norm);
  const auto fv = f.evaluate(state.points());
  return {grid_average(fv, w), state.level(), beta, f.describe(), state.quad().g};
}

ChaosValue integrate(const PathState& state, cplx beta, const TestFunction& f) {
  const LogNormalizer norm(state.model(), state.points(), beta, {state.level()});
  return integrate(state, beta, f, norm);
}

// ---------------------------------------------------------------------------
// Martingale checks and trajectories
// ---------------------------------------------------------------------------

MartingaleResidual martingale_residual_exact(const PathState& state, cplx beta, const TestFunction& f) {
  const FieldModel& model = state.model();
  const auto* fm = model.fourier();
  if (fm == nullptr || !fm->law.finitely_supported())
    throw UnsupportedModeError("exact enumeration needs a Fourier model with a finitely supported law");
  const std::size_t n = state.level();
  const LogNormalizer norm(model, state.points(), beta, {n, n + 1});
  const cplx base = integrate(state, beta, f, norm).value;
  const auto atoms = fm->law.support();
  cplx avg{};
  for (const auto& [a, pa] : atoms)
    for (const auto& [b, pb] : atoms)
      avg += pa * pb * integrate(extend_with_draw(state, {a, b}), beta, f, norm).value;
  return {avg - base, 0.0, base};
}

MartingaleResidual martingale_residual_mc(const PathState& state, cplx beta, const TestFunction& f, std::size_t m) {
  if (m < 2) throw DomainError("martingale_residual_mc: need at least 2 continuations");
  const std::size_t n = state.level();
  const LogNormalizer norm(state.model(), state.points(), beta, {n, n + 1});
  const cplx base = integrate(state, beta, f, norm).value;
  cplx mean{};
  double m2_re = 0.0, m2_im = 0.0;
  for (std::size_t i = 1; i <= m; ++i) {
    const PathKey key = state.key().with_branch(static_cast<std::uint32_t>(i));
    const cplx v = integrate(extend_path(state, n + 1, key), beta, f, norm).value;
    const cplx d = v - mean;
    mean += d / static_cast<double>(i);
    const cplx d2 = v - mean;
    m2_re += d.real() * d2.real();
    m2_im += d.imag() * d2.imag();
  }
  const double md = static_cast<double>(m);
  const double se = std::sqrt((m2_re + m2_im) / (md - 1.0) / md);
  return {mean - base, se, base};
}

std::vector<std::pair<std::size_t, cplx>> mass_trajectory(std::shared_ptr<const FieldModel> model,
                                                          const QuadratureSpec& quad, cplx beta,
                                                          std::span<const std::size_t> levels, const PathKey& key,
                                                          const LogNormalizer* norm) {
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw DomainError("mass_trajectory: levels must be increasing");
  PathState path(std::move(model), quad, key);
  std::optional<LogNormalizer> own;
  if (norm == nullptr) {
    own.emplace(path.model(), path.points(), beta, std::vector<std::size_t>(levels.begin(), levels.end()));
    norm = &*own;
  }
  const TestFunction one = TestFunction::one();
  std::vector<std::pair<std::size_t, cplx>> out;
  out.reserve(levels.size());
  for (std::size_t lvl : levels) {
    path = extend_path(path, lvl);
    out.emplace_back(lvl, integrate(path, beta, one, *norm).value);
  }
  return out;
}

}  // namespace chaoslab
