#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "chaoslab/covariance.hpp"
#include "chaoslab/field_models.hpp"
#include "chaoslab/rng.hpp"

namespace chaoslab {

/// Uniform grid of 2^g points on [0, 1) with left-endpoint quadrature. A
/// level is resolvable when 2^g >= oversample * (its highest frequency).
struct QuadratureSpec {
  unsigned g = 10;
  double oversample = 8.0;

  std::size_t size() const noexcept { return std::size_t{1} << g; }
  std::vector<double> points() const;
};

/// Validates g in [1, 24] and oversample >= 8.
void validate(const QuadratureSpec& q);

/// Largest level n <= model.max_level() with 2^g >= oversample * max_frequency(n).
std::size_t resolvable_level(const FieldModel& model, const QuadratureSpec& q);

/// One entry of a path's level-draw log. For Gaussian bases only the key is
/// kept; the level is regenerated from level_stream(key, k).
struct LevelRecord {
  LevelDraw draw;
  PathKey key;
  bool forced = false;  // drawn by exact enumeration rather than from the key
};

/// One realized trajectory of partial sums S_n on the quadrature grid.
/// Immutable; extension returns a new value sharing the unchanged parts.
class PathState {
 public:
  PathState(std::shared_ptr<const FieldModel> model, QuadratureSpec quad, PathKey key);

  const FieldModel& model() const noexcept { return *model_; }
  const std::shared_ptr<const FieldModel>& model_ptr() const noexcept { return model_; }
  const QuadratureSpec& quad() const noexcept { return quad_; }
  const PathKey& key() const noexcept { return key_; }
  std::size_t level() const noexcept { return draws_.size(); }
  std::size_t resolvable_level() const noexcept { return cap_; }
  std::span<const double> points() const noexcept { return *points_; }
  /// S_n on the grid.
  std::span<const double> field() const noexcept { return *field_; }
  const std::vector<LevelRecord>& draws() const noexcept { return draws_; }
  /// Variance blocks up to the resolvable level; null if no level is resolvable.
  const std::shared_ptr<const BlockIndexTable>& blocks() const noexcept { return table_; }

  /// True once the path has reached t_j - 1.
  bool has_block(std::size_t j) const noexcept { return snapshots_.count(j) != 0; }
  /// Z_j = S_{t_j - 1}.
  std::span<const double> block(std::size_t j) const;
  /// Number of completed blocks minus one (largest j with has_block(j)).
  std::size_t last_block() const noexcept { return snapshots_.empty() ? 0 : snapshots_.rbegin()->first; }

  /// S_n recomputed from the draw log alone.
  std::vector<double> recompute_field() const;

 private:
  friend PathState extend_path(const PathState&, std::size_t, const PathKey&);
  friend PathState extend_with_draw(const PathState&, const LevelDraw&);

  std::vector<double> synthesize(std::size_t n) const;
  void append_level(std::vector<double>& accum, std::size_t k, const LevelRecord& rec) const;
  void snapshot_blocks(const std::vector<double>& field);

  std::shared_ptr<const FieldModel> model_;
  QuadratureSpec quad_;
  PathKey key_;
  std::size_t cap_ = 0;
  std::shared_ptr<const std::vector<double>> points_;
  std::shared_ptr<const BlockIndexTable> table_;
  std::vector<LevelRecord> draws_;
  std::shared_ptr<const std::vector<double>> field_;
  std::map<std::size_t, std::shared_ptr<const std::vector<double>>> snapshots_;
};

/// Samples levels (level, target] from level_stream(key, k). Throws
/// ResolutionError past the resolvable level.
PathState extend_path(const PathState& state, std::size_t target, const PathKey& key);
inline PathState extend_path(const PathState& state, std::size_t target) {
  return extend_path(state, target, state.key());
}
/// Appends one level with prescribed coefficients (Fourier and cosine process).
PathState extend_with_draw(const PathState& state, const LevelDraw& draw);

/// Cumulative log-normalizers L_n(x) = sum_{k<=n} log E exp(beta X_k(x)) on
/// a point set, kept at the requested levels. Construction screens every
/// factor against `floor` and throws VanishingNormalizerError naming the
/// offending point and level.
class LogNormalizer {
 public:
  LogNormalizer(const FieldModel& model, std::span<const double> points, std::complex<double> beta,
                std::vector<std::size_t> levels, double floor = 1e-6);

  std::complex<double> beta() const noexcept { return beta_; }
  bool has(std::size_t level) const noexcept { return table_.count(level) != 0; }
  std::span<const std::complex<double>> at(std::size_t level) const;
  /// Smallest |E exp(beta X_k(x))| seen over all points and levels.
  double min_factor_modulus() const noexcept { return min_modulus_; }

 private:
  std::complex<double> beta_;
  std::map<std::size_t, std::vector<std::complex<double>>> table_;
  double min_modulus_;
};

/// exp(beta S - L) evaluated from explicit fields; shared by the weight and
/// event code.
std::vector<std::complex<double>> weight_from(std::span<const double> s, std::complex<double> beta,
                                              std::span<const std::complex<double>> log_norm);

/// W_n(x) = exp(beta S_n(x)) / prod_{k<=n} E exp(beta X_k(x)) on the grid.
std::vector<std::complex<double>> weight_field(const PathState& state, std::complex<double> beta,
                                               const LogNormalizer& norm);
std::vector<std::complex<double>> weight_field(const PathState& state, std::complex<double> beta);

/// Test functions: finite complex combinations of 1, polynomials,
/// cos(2 pi m x + phase) and indicators of [i 2^-l, (i+1) 2^-l).
class TestFunction {
 public:
  enum class Kind { one, poly, trig, dyadic };
  struct Term {
    Kind kind;
    std::complex<double> coeff;
    std::vector<std::complex<double>> poly;  // poly coefficients c0, c1, ...
    double freq = 0.0;
    double phase = 0.0;
    unsigned l = 0;
    std::size_t i = 0;
  };

  static TestFunction one();
  static TestFunction poly(std::vector<std::complex<double>> coeffs);
  static TestFunction trig(double freq, double phase = 0.0);
  static TestFunction dyadic(unsigned l, std::size_t i);

  std::complex<double> operator()(double x) const;
  std::vector<std::complex<double>> evaluate(std::span<const double> points) const;
  TestFunction conj() const;
  std::string describe() const;
  const std::vector<Term>& terms() const noexcept { return terms_; }

  friend TestFunction operator+(TestFunction a, const TestFunction& b);
  friend TestFunction operator*(std::complex<double> c, TestFunction f);

 private:
  std::vector<Term> terms_;
};

struct ChaosValue {
  std::complex<double> value;
  std::size_t level;
  std::complex<double> beta;
  std::string f;
  unsigned g;
};

/// Grid average of f W_n (left-endpoint rule).
ChaosValue integrate(const PathState& state, std::complex<double> beta, const TestFunction& f,
                     const LogNormalizer& norm);
ChaosValue integrate(const PathState& state, std::complex<double> beta, const TestFunction& f);
/// Grid average of the pointwise product f * w.
std::complex<double> grid_average(std::span<const std::complex<double>> f, std::span<const std::complex<double>> w);

struct MartingaleResidual {
  std::complex<double> residual;
  double stderr_est = 0.0;  // zero in exact mode
  std::complex<double> base;  // integrate(state, beta, f)
};

/// Exact mode: averages integrate() over every outcome of the next level's
/// coefficients (finitely supported laws only, else UnsupportedModeError).
MartingaleResidual martingale_residual_exact(const PathState& state, std::complex<double> beta,
                                             const TestFunction& f);
/// Monte Carlo mode: averages `m` continuations drawn on branches 1..m of the state's key.
MartingaleResidual martingale_residual_mc(const PathState& state, std::complex<double> beta,
                                          const TestFunction& f, std::size_t m);

/// Total masses mu_n(1; beta) of one extending path at increasing `levels`.
std::vector<std::pair<std::size_t, std::complex<double>>> mass_trajectory(
    std::shared_ptr<const FieldModel> model, const QuadratureSpec& quad, std::complex<double> beta,
    std::span<const std::size_t> levels, const PathKey& key, const LogNormalizer* norm = nullptr);

}  // namespace chaoslab
