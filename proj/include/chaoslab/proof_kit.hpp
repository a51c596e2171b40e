#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "chaoslab/chaos.hpp"
#include "chaoslab/mc_runtime.hpp"

namespace chaoslab {

/// Exceedance parameter alpha, inverse temperature beta and moment exponent p.
struct EventConfig {
  double alpha = 1.5;
  std::complex<double> beta = 1.0;
  double p = 1.5;
};

/// Throws ParameterError unless Re beta in (0, sqrt(2d)), alpha in (Re beta, 2 Re beta) and p > 1.
void validate(const EventConfig& cfg, unsigned d = 1);

struct Admissibility {
  bool admissible = false;
  double alpha_star = 0.0;
  double bracket_min = 0.0;  // min of the three terms at alpha_star
  double margin = 0.0;       // bracket_min - (Im beta)^2
};

/// Maximizes min{(a - Re b)^2/2, (2 Re b - a)^2/2 - (Re b)^2 + d, r_cap^2} over
/// a in (Re b, 2 Re b) by ternary search; the maximizer is kept strictly
/// inside the interval. Throws DomainError unless Re b in (0, sqrt(2d)).
Admissibility admissible_beta(std::complex<double> beta, unsigned d = 1, double r_cap = 0.5);

/// Threshold alpha * V_{t_j - 1} of the exceedance event A_j.
double exceedance_threshold(const BlockIndexTable& table, std::size_t j, double alpha);

/// l(x) = max{l <= n : Z_l(x) >= alpha V_{t_l - 1}}; needs block n on the path.
std::vector<std::size_t> last_exceedance(const PathState& path, std::size_t n, double alpha);

/// sum_{l<=n} 1_{A_l}(x) 1_{B_{l,n}}(x) per grid point (identically 1).
std::vector<int> partition_count(const PathState& path, std::size_t n, double alpha);

/// sum_l [grid average of f W_N 1_{A_l} 1_{B_{l,n}}] - integrate(path, beta, f) at N = t_n - 1.
/// Also returns the base value for relative comparisons.
struct DecompositionResidual {
  std::complex<double> residual;
  std::complex<double> base;
};
DecompositionResidual decomposition_residual(const PathState& path, std::complex<double> beta,
                                             const TestFunction& f, double alpha, std::size_t n);

struct SupDecayRow {
  std::size_t l;
  double estimate;       // E sup_J |E_l|^p 1_{A_l}
  double stderr_est;
  double sup_no_event;   // E sup_J |E_l|^p
};

struct SupDecayResult {
  std::vector<SupDecayRow> rows;
  /// Empty with fewer than three levels or when some estimate is zero.
  std::optional<DecayFit> fit;
};

/// Monte Carlo estimate of E sup_{x in J} |E_l(x)|^p 1_{A_l(x)} with
/// J = [0, 2^{-l-1}), plus a log-linear fit in l. Needs alpha - p Re beta > 0.
SupDecayResult sup_weight_decay(std::shared_ptr<const FieldModel> model, const EventConfig& cfg,
                                std::span<const std::size_t> ls, std::size_t replicas, const SeedPlan& plan,
                                std::size_t threads, const QuadratureSpec& quad);

struct L2RatioRow {
  std::size_t l;
  std::size_t n;
  double p50;
  double p95;
  double vacuous_frac;
  std::size_t replicas;
};

struct L2RatioOptions {
  std::size_t outer = 200;
  std::size_t inner = 200;
  std::size_t interval = 0;  // index i of I_{l,i} = [i 2^{-l-1}, (i+1) 2^{-l-1})
};

/// For each outer replica, freezes the path at level t_l - 1 and averages
/// |grid integral over I_{l,i} of f W_N 1_{A_l} 1_{B_{l,n}}|^2 (N = t_n - 1)
/// over fresh continuations, divided by 2^{-2l} ||f||_inf^2 sup_I |E_l|^2 1_{A_l}.
/// Replicas whose denominator vanishes are counted as vacuous.
std::vector<L2RatioRow> conditional_l2_ratio(std::shared_ptr<const FieldModel> model, const EventConfig& cfg,
                                             std::size_t l, std::span<const std::size_t> ns,
                                             const TestFunction& f, const L2RatioOptions& opts, const SeedPlan& plan,
                                             std::size_t threads, const QuadratureSpec& quad);

}  // namespace chaoslab
