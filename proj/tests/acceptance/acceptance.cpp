// Acceptance suite: one PASS/FAIL line per criterion. With arguments, runs
// only the listed criterion numbers. Exit status is 1 if any check fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <unistd.h>

#include "chaoslab/analyticity.hpp"
#include "chaoslab/chaos.hpp"
#include "chaoslab/covariance.hpp"
#include "chaoslab/field_models.hpp"
#include "chaoslab/mc_runtime.hpp"
#include "chaoslab/proof_kit.hpp"

#ifndef CHAOSLAB_CLI_PATH
#error "CHAOSLAB_CLI_PATH must name the chaoslab executable"
#endif

namespace {

using namespace chaoslab;
using cplx = std::complex<double>;

constexpr std::uint64_t kSeed = 1;

// Frozen first-run fixtures. The first two come from the independent oracles
// below, which must still reproduce them; the third is a Monte Carlo value at
// kSeed.
constexpr double kCovSupDeviation64 = 2.0359628394553648;
constexpr double kMgfWorstJ4 = 11.226030639468341;
constexpr double kL2RatioP95N4 = 0.065384484783884547;

struct Outcome {
  bool pass;
  std::string detail;
};

std::shared_ptr<const FieldModel> fourier(CoefficientLaw law) {
  return std::make_shared<const FieldModel>(FourierModel{std::move(law)});
}

double rel_err(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// 1. Exact martingale identity.
Outcome martingale_identity() {
  const auto model = fourier(CoefficientLaw::rademacher());
  const QuadratureSpec quad{10, 8.0};
  const std::vector<cplx> betas{0.5, 1.0, 1.3, {1.0, 0.2}};
  const std::vector<TestFunction> fs{TestFunction::one(), TestFunction::dyadic(2, 1)};
  double worst = 0.0;
  PathState path(model, quad, SeedPlan{kSeed}.path(0));
  for (std::size_t level = 0; level <= 8; ++level) {
    if (level > 0) path = extend_path(path, level);
    for (cplx b : betas)
      for (const auto& f : fs) {
        const auto r = martingale_residual_exact(path, b, f);
        worst = std::max(worst, std::abs(r.residual) / std::abs(r.base));
      }
  }
  return {worst <= 1e-12, fmt::format("max relative residual {:.3g} over levels 0..8", worst)};
}

// 2. Partition of unity and decomposition.
Outcome partition_decomposition() {
  const auto model = fourier(CoefficientLaw::rademacher());
  const QuadratureSpec quad{10, 8.0};
  const SeedPlan plan{kSeed};
  const std::size_t n = 6;
  const std::vector<cplx> betas{0.5, 1.0, 1.3, {1.0, 0.2}};
  const PathState root(model, quad, plan.path(0));
  const std::size_t target = root.blocks()->t(n) - 1;
  struct Out {
    bool counts_one;
    double worst;
  };
  auto task = [&](std::size_t r, const SeedPlan& sp) {
    const auto path = extend_path(PathState(model, quad, sp.path(static_cast<std::uint32_t>(r))), target);
    Out o{true, 0.0};
    for (cplx b : betas) {
      const double alpha = admissible_beta(b).alpha_star;
      const auto cnt = partition_count(path, n, alpha);
      o.counts_one = o.counts_one && std::all_of(cnt.begin(), cnt.end(), [](int c) { return c == 1; });
      const auto d = decomposition_residual(path, b, TestFunction::one(), alpha, n);
      o.worst = std::max(o.worst, std::abs(d.residual) / std::abs(d.base));
    }
    return o;
  };
  const auto res = run_replicas(task, 100, plan, default_thread_count());
  bool counts = true;
  double worst = 0.0;
  for (const auto& o : res) {
    counts = counts && o.counts_one;
    worst = std::max(worst, o.worst);
  }
  return {counts && worst <= 1e-10,
          fmt::format("100 paths, n = 6, alpha = alpha*: counts {}, max relative residual {:.3g}",
                      counts ? "all 1" : "NOT all 1", worst)};
}

// Direct partial covariance of the Fourier field, long double.
double oracle_cov_sup(std::size_t n, const std::vector<std::pair<double, double>>& pairs) {
  long double h = 0.0L;
  for (std::size_t k = 1; k <= n; ++k) h += 1.0L / static_cast<long double>(k);
  double sup = 0.0;
  for (const auto& [x, y] : pairs) {
    const long double d = std::fabs(static_cast<long double>(x) - y);
    long double c = 0.0L;
    for (std::size_t k = 1; k <= n; ++k)
      c += std::cos(2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) * d) /
           static_cast<long double>(k);
    const long double target = d == 0.0L ? h : std::min(-std::log(d), h);
    sup = std::max(sup, static_cast<double>(std::fabs(c - target)));
  }
  return sup;
}

// 3. Log-correlation: sup deviation bounded in n.
Outcome log_correlation() {
  const auto model = fourier(CoefficientLaw::rademacher());
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 1; i <= 2048; ++i) pairs.emplace_back(0.0, static_cast<double>(i) / 4096.0);
  const double oracle64 = oracle_cov_sup(64, pairs);
  bool ok = std::abs(oracle64 - kCovSupDeviation64) <= 1e-12 * kCovSupDeviation64;
  std::string detail = fmt::format("fixture {:.6g} (oracle {:.6g}); sup deviation", kCovSupDeviation64, oracle64);
  for (std::size_t n = 64; n <= 4096; n *= 2) {
    const double sup = log_corr_deviation(*model, n, pairs).sup_deviation;
    if (n <= 256) ok = ok && std::abs(sup - oracle_cov_sup(n, pairs)) <= 1e-9;
    ok = ok && sup <= 1.1 * kCovSupDeviation64;
    detail += fmt::format(" n={}:{:.4g}", n, sup);
  }
  return {ok, detail};
}

// sum_{k=n+1}^{10^7} cos(2 pi k t)/k with compensated summation.
double oracle_tail(std::size_t n, double t) {
  double sum = 0.0, comp = 0.0;
  for (std::size_t k = n + 1; k <= 10'000'000; ++k) {
    const double kt = static_cast<double>(k) * t;
    const double phase = kt - std::floor(kt);
    const double term = std::cos(2.0 * std::numbers::pi * phase) / static_cast<double>(k) - comp;
    const double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum;
}

// 4. Fourier tail bound and summation oracle.
Outcome tail_bound() {
  std::size_t checked = 0, violations = 0;
  double worst_ratio = 0.0;
  for (int j = -2047; j <= 2048; ++j) {
    if (j == 0) continue;
    const double t = static_cast<double>(j) / 4096.0;
    const auto rows = fourier_tail_range(1024, t);
    for (std::size_t n = 1; n <= 1024; ++n) {
      ++checked;
      if (std::abs(rows[n].remainder) > rows[n].bound + 1e-9) ++violations;
      worst_ratio = std::max(worst_ratio, std::abs(rows[n].remainder) / rows[n].bound);
    }
  }
  std::mt19937_64 rng(kSeed);
  std::uniform_real_distribution<double> ut(0.05, 0.5);
  std::uniform_int_distribution<std::size_t> un(1, 1024);
  std::vector<std::pair<std::size_t, double>> spots;
  for (int s = 0; s < 50; ++s) {
    const double t = ut(rng);
    spots.emplace_back(un(rng), t);
  }
  auto task = [&](std::size_t i, const SeedPlan&) {
    const auto [n, t] = spots[i];
    return std::abs(fourier_tail(n, t).remainder - oracle_tail(n, t));
  };
  const auto gaps = run_replicas(task, spots.size(), SeedPlan{kSeed}, default_thread_count());
  const double worst_gap = *std::max_element(gaps.begin(), gaps.end());
  return {violations == 0 && worst_gap <= 1e-5,
          fmt::format("{} (n, t) pairs, {} violations, max |R|/bound {:.6g}; 50 spot checks, max gap {:.3g}", checked,
                      violations, worst_ratio, worst_gap)};
}

std::vector<cplx> xi_grid() {
  std::vector<cplx> grid;
  const double re_max = 2.0 * std::numbers::sqrt2, im_max = 0.5;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) grid.emplace_back(-re_max + re_max * i / 2.0, -im_max + im_max * j);
  return grid;
}

cplx wrap_imag(cplx z) {
  return {z.real(), std::remainder(z.imag(), 2.0 * std::numbers::pi)};
}

// Rademacher eps_j from cosh factors, blocks from harmonic numbers.
double oracle_mgf_worst(std::size_t j, double x, double y, const std::vector<cplx>& grid) {
  std::size_t t = 1;
  double h = 1.0;
  while (h < static_cast<double>(j) * std::numbers::ln2) h += 1.0 / static_cast<double>(++t);
  double worst = 0.0;
  for (cplx x1 : grid)
    for (cplx x2 : grid) {
      cplx eps = 0.0;
      for (std::size_t k = 1; k < t; ++k) {
        const double s = std::sqrt(static_cast<double>(k));
        const double w = 2.0 * std::numbers::pi * static_cast<double>(k);
        const cplx u = (x1 * std::cos(w * x) + x2 * std::cos(w * y)) / s;
        const cplx v = (x1 * std::sin(w * x) + x2 * std::sin(w * y)) / s;
        eps += wrap_imag(std::log(std::cosh(u)) + std::log(std::cosh(v)) - 0.5 * (u * u + v * v));
      }
      worst = std::max(worst, std::abs(eps));
    }
  return worst;
}

// 5. Joint mgf error: zero for Gaussian, flat in j for Rademacher.
Outcome mgf_error() {
  const auto grid = xi_grid();
  const double x = 0.0, y = 0.125;
  const std::size_t j_max = 12;
  double gauss = 0.0;
  std::vector<double> worst(j_max + 1, 0.0);
  {
    const auto g = fourier(CoefficientLaw::gaussian());
    const BlockIndexTable table(*g, 8192);
    for (cplx x1 : grid)
      for (cplx x2 : grid)
        for (cplx e : joint_mgf_error_profile(*g, table, j_max, x, y, x1, x2)) gauss = std::max(gauss, std::abs(e));
  }
  const auto r = fourier(CoefficientLaw::rademacher());
  const BlockIndexTable table(*r, 8192);
  for (cplx x1 : grid)
    for (cplx x2 : grid) {
      const auto eps = joint_mgf_error_profile(*r, table, j_max, x, y, x1, x2);
      for (std::size_t j = 0; j <= j_max; ++j) worst[j] = std::max(worst[j], std::abs(eps[j]));
    }
  const double oracle4 = oracle_mgf_worst(4, x, y, grid);
  bool ok = gauss <= 1e-10 && std::abs(oracle4 - kMgfWorstJ4) <= 1e-9 * kMgfWorstJ4 &&
            std::abs(worst[4] - oracle4) <= 1e-9 * oracle4;
  double max_ratio = 0.0;
  std::size_t arg = 4;
  for (std::size_t j = 4; j <= j_max; ++j) {
    const double ratio = worst[j] / kMgfWorstJ4;
    if (ratio > max_ratio) max_ratio = ratio, arg = j;
  }
  ok = ok && max_ratio <= 1.1;
  return {ok, fmt::format("Gaussian max |eps| {:.3g}; Rademacher fixture {:.6g} (oracle {:.6g}), max over j=4..12 "
                          "is {:.4g} x fixture at j = {} (allowed 1.1)",
                          gauss, kMgfWorstJ4, oracle4, max_ratio, arg)};
}

// 6. Exponential-sum inequality over the three schedule families.
Outcome exp_sum() {
  const std::size_t n_max = 10'000;
  const std::vector<std::pair<const char*, ScheduleFamily>> families{
      {"power", ScheduleFamily::power}, {"harmonic", ScheduleFamily::harmonic},
      {"log_harmonic", ScheduleFamily::log_harmonic}};
  const std::vector<double> alphas{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0};
  std::mt19937_64 rng(kSeed);
  std::uniform_int_distribution<std::size_t> ui(1, n_max);
  std::size_t violations = 0, pairs = 0;
  double worst_ratio = 0.0, worst_oracle = 0.0;
  for (const auto& [name, fam] : families) {
    const auto a = build_schedule(fam, n_max, 0.4).a;
    std::vector<long double> cum(n_max + 1, 0.0L);
    for (std::size_t k = 1; k <= n_max; ++k) cum[k] = cum[k - 1] + static_cast<long double>(a[k - 1]) * a[k - 1];
    const long double smax = *std::max_element(a.begin(), a.end()) * static_cast<long double>(*std::max_element(a.begin(), a.end()));
    for (double alpha : alphas) {
      const auto sweep = exp_sum_sweep(a, alpha, 1e-12);
      violations += sweep.violations;
      pairs += sweep.pairs;
      worst_ratio = std::max(worst_ratio, sweep.max_ratio);
      const long double al = alpha;
      const long double c = alpha > 0 ? smax / (1.0L - std::exp(-al * smax)) : -1.0L / al;
      for (int s = 0; s < 100; ++s) {
        std::size_t m = ui(rng), n = ui(rng);
        if (m > n) std::swap(m, n);
        long double lhs = 0.0L;
        for (std::size_t k = m; k <= n; ++k) lhs += static_cast<long double>(a[k - 1]) * a[k - 1] * std::exp(al * cum[k]);
        const long double rhs = c * std::fabs(std::exp(al * cum[n]) - std::exp(al * cum[m - 1]));
        const auto lib = exp_sum_margin(a, alpha, m, n);
        if (lhs > rhs * (1.0L + 1e-12L)) ++violations;
        worst_oracle = std::max({worst_oracle, static_cast<double>(std::fabs(lib.lhs - lhs) / lhs),
                                 static_cast<double>(std::fabs(lib.rhs - rhs) / rhs)});
      }
    }
  }
  return {violations == 0 && worst_oracle <= 1e-9,
          fmt::format("{} (m, n) pairs, {} violations, max lhs/rhs {:.6g}; oracle agreement {:.3g}", pairs, violations,
                      worst_ratio, worst_oracle)};
}

// 7. Lp moment stability, and supercritical median decay.
Outcome moment_stability() {
  const auto model = fourier(CoefficientLaw::rademacher());
  const QuadratureSpec quad{12, 8.0};
  const SeedPlan plan{kSeed};
  const std::vector<std::size_t> levels{64, 128, 256, 512};
  const std::vector<cplx> betas{0.8, 1.6};
  const PathState root(model, quad, plan.path(0));
  std::vector<LogNormalizer> norms;
  for (cplx b : betas) norms.emplace_back(*model, root.points(), b, levels);
  auto task = [&](std::size_t r, const SeedPlan& sp) {
    std::vector<cplx> out;
    for (std::size_t bi = 0; bi < betas.size(); ++bi)
      for (const auto& lm : mass_trajectory(model, quad, betas[bi], levels, sp.path(static_cast<std::uint32_t>(r)),
                                            &norms[bi]))
        out.push_back(lm.second);
    return out;
  };
  const auto res = run_replicas(task, 2000, plan, default_thread_count());
  auto column = [&](std::size_t bi, std::size_t li) {
    std::vector<cplx> v;
    for (const auto& row : res) v.push_back(row[bi * levels.size() + li]);
    return v;
  };
  std::vector<MomentEstimate> est;
  std::vector<double> med;
  for (std::size_t li = 0; li < levels.size(); ++li) {
    const auto mu = column(0, li);
    est.push_back(lp_moment(std::span<const cplx>(mu), 1.5));
    std::vector<double> re;
    for (cplx m : column(1, li)) re.push_back(m.real());
    med.push_back(quantile(re, 0.5));
  }
  bool stable = true, decreasing = true;
  for (std::size_t i = 0; i < levels.size(); ++i)
    for (std::size_t j = i + 1; j < levels.size(); ++j) stable = stable && est[j].ci95[0] <= est[i].ci95[1];
  for (std::size_t i = 1; i < levels.size(); ++i) decreasing = decreasing && med[i] < med[i - 1];
  std::string detail = "beta 0.8 E|mu|^1.5:";
  for (const auto& e : est) detail += fmt::format(" {:.4g}[{:.4g},{:.4g}]", e.estimate, e.ci95[0], e.ci95[1]);
  detail += "; beta 1.6 medians:";
  for (double m : med) detail += fmt::format(" {:.4g}", m);
  return {stable && decreasing, detail};
}

// 8. Decay of the event-restricted sup moment in l.
Outcome sup_decay() {
  const auto model = fourier(CoefficientLaw::rademacher());
  const EventConfig cfg{1.3, 1.0, 1.05};
  const std::vector<std::size_t> ls{2, 3, 4, 5, 6, 7, 8, 9};
  const auto res = sup_weight_decay(model, cfg, ls, 2000, SeedPlan{kSeed}, default_thread_count(), QuadratureSpec{12, 8.0});
  std::string detail = "estimates:";
  for (const auto& r : res.rows) detail += fmt::format(" {:.3g}", r.estimate);
  if (!res.fit) return {false, detail + "; no fit (an estimate is zero)"};
  const auto& f = *res.fit;
  detail += fmt::format("; slope {:.4g}, 95% CI [{:.4g}, {:.4g}]", f.slope, f.slope_ci95[0], f.slope_ci95[1]);
  return {f.slope < 0.0 && f.slope_ci95[1] < 0.0, detail};
}

// 9. Conditional L2 ratio: no upward trend in n.
Outcome l2_ratio() {
  const auto model = fourier(CoefficientLaw::rademacher());
  const EventConfig cfg{1.1, 0.8, 1.5};
  const std::vector<std::size_t> ns{4, 6, 8};
  const auto rows = conditional_l2_ratio(model, cfg, 3, ns, TestFunction::one(), L2RatioOptions{200, 200, 0},
                                         SeedPlan{kSeed}, default_thread_count(), QuadratureSpec{11, 8.0});
  bool ok = true;
  std::string detail = fmt::format("fixture {:.6g}; p95", kL2RatioP95N4);
  for (const auto& r : rows) {
    ok = ok && r.p95 <= 1.15 * kL2RatioP95N4;
    detail += fmt::format(" n={}:{:.4g}", r.n, r.p95);
  }
  detail += fmt::format(" (vacuous {:.3g})", rows.front().vacuous_frac);
  return {ok, detail};
}

// 10. Cauchy residuals, modulus control, admissibility example.
Outcome analyticity() {
  const auto model = fourier(CoefficientLaw::rademacher());
  const QuadratureSpec quad{10, 8.0};
  const SeedPlan plan{kSeed};
  const std::size_t level = 64;
  const std::vector<BetaCircle> circles{{0.8, 0.1, 64}, {1.0, 0.1, 64}, {1.2, 0.1, 64}};
  bool admissible = true;
  for (const auto& c : circles)
    for (cplx b : c.points()) admissible = admissible && admissible_beta(b).admissible;
  const PathState root(model, quad, plan.path(0));
  double worst = 0.0, control_min = INFINITY;
  for (const auto& c : circles)
    for (WeightMode mode : {WeightMode::analytic, WeightMode::modulus_control}) {
      const CircleNormalizers norms(*model, root.points(), level, c, mode);
      auto task = [&](std::size_t r, const SeedPlan& sp) {
        const auto path = extend_path(PathState(model, quad, sp.path(static_cast<std::uint32_t>(r))), level);
        const auto res = cauchy_residual(path, TestFunction::one(), norms);
        return std::max(res.loop_rel, res.gap_rel);
      };
      for (double v : run_replicas(task, 20, plan, default_thread_count())) {
        if (mode == WeightMode::analytic) worst = std::max(worst, v);
        else control_min = std::min(control_min, v);
      }
    }
  const auto a = admissible_beta(1.0, 1, 0.5);
  const bool example = std::abs(a.alpha_star - 1.5) <= 1e-9 && std::abs(a.bracket_min - 0.125) <= 1e-9;
  return {admissible && worst <= 1e-8 && control_min > 1e-3 && example,
          fmt::format("circles admissible: {}; max residual {:.3g}; min control residual {:.3g}; "
                      "alpha* = {:.12g}, bracket min = {:.12g}",
                      admissible ? "yes" : "NO", worst, control_min, a.alpha_star, a.bracket_min)};
}

// 11. Gaussian normalizer product against exp(beta^2 H_n / 2).
Outcome gaussian_normalizer() {
  const auto model = fourier(CoefficientLaw::gaussian());
  const QuadratureSpec quad{12, 8.0};
  const auto pts = quad.points();
  const std::size_t n_max = 4096;
  std::vector<long double> h(n_max + 1, 0.0L);
  for (std::size_t k = 1; k <= n_max; ++k) h[k] = h[k - 1] + 1.0L / static_cast<long double>(k);
  // |exp(d) - 1| <= expm1(|d|) for the log difference d.
  auto task = [&](std::size_t i, const SeedPlan&) {
    double w = 0.0;
    for (cplx b : {cplx(0.8), cplx(1.0, 0.3)}) {
      const cplx half_b2 = 0.5 * b * b;
      cplx log_prod = 0.0;
      for (std::size_t k = 1; k <= n_max; ++k) {
        log_prod += model->log_level_normalizer(k, pts[i], b);
        w = std::max(w, std::abs(log_prod - half_b2 * static_cast<double>(h[k])));
      }
    }
    return w;
  };
  const auto per_point = run_replicas(task, pts.size(), SeedPlan{kSeed}, default_thread_count());
  double worst = std::expm1(*std::max_element(per_point.begin(), per_point.end()));
  std::vector<std::size_t> dyadic;
  for (std::size_t n = 1; n <= n_max; n *= 2) dyadic.push_back(n);
  for (cplx b : {cplx(0.5), cplx(1.0, 0.3), cplx(1.3, -0.2)}) {
    const LogNormalizer norm(*model, pts, b, dyadic);
    for (std::size_t n : dyadic) {
      const cplx target = 0.5 * b * b * static_cast<double>(h[n]);
      for (cplx l : norm.at(n)) worst = std::max(worst, rel_err(std::exp(l), std::exp(target)));
    }
  }
  return {worst <= 1e-10, fmt::format("{} grid points, n <= {}: max relative error {:.3g}", pts.size(), n_max, worst)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

// 12. Byte-identical CLI output across thread counts.
Outcome determinism() {
  namespace fs = std::filesystem;
  const std::map<std::string, std::string> runs{
      {"admissible", "--beta 1 1+0.4i 0.5+0.1i"},
      {"analyticity", "--level 16 --replicas 6 --set options.gap_pairs=[[8,16]] --set options.gap_replicas=16"},
      {"audit", "--n 128"},
      {"covariance", "--ns 64 256 --pairs 128"},
      {"expsum", "--nmax 300"},
      {"l2ratio", "--g 10 --ns 4 5 --outer 24 --inner 10"},
      {"martingale", "--replicas 6 --levels 0 2 4"},
      {"mgf", "--jmax 6"},
      {"moments", "--g 10 --levels 16 32 --replicas 64"},
      {"partition", "--replicas 16"},
      {"simulate", "--beta 0.8 1+0.1i --levels 8 32 --replicas 24"},
      {"supdecay", "--g 10 --ls 2 3 4 --replicas 200"},
      {"tail", "--n 64 --grid 256"},
  };
  const fs::path root = fs::temp_directory_path() / fmt::format("chaoslab_acceptance_{}", ::getpid());
  std::vector<std::string> mismatched;
  std::size_t files = 0;
  for (const auto& [sub, args] : runs) {
    std::map<std::size_t, std::map<std::string, std::string>> outputs;
    std::map<std::size_t, int> codes;
    for (std::size_t threads : {1, 8}) {
      const fs::path dir = root / fmt::format("{}_{}", sub, threads);
      fs::create_directories(dir);
      const std::string cmd = fmt::format("'{}' {} {} --seed {} --threads {} --out '{}' > '{}' 2>&1", CHAOSLAB_CLI_PATH,
                                          sub, args, kSeed, threads, dir.string(), (dir / "stdout.txt").string());
      codes[threads] = std::system(cmd.c_str());
      for (const auto& e : fs::directory_iterator(dir))
        if (e.path().filename() != "manifest.json") outputs[threads][e.path().filename().string()] = slurp(e.path());
    }
    files += outputs[1].size();
    if (codes[1] != codes[8] || outputs[1] != outputs[8] || outputs[1].size() < 2) mismatched.push_back(sub);
  }
  std::error_code ec;
  fs::remove_all(root, ec);
  std::string detail = fmt::format("{} subcommands, {} files compared at 1 and 8 threads", runs.size(), files);
  if (!mismatched.empty()) {
    detail += "; differing:";
    for (const auto& s : mismatched) detail += " " + s;
  }
  return {mismatched.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exact martingale identity", martingale_identity},
      {"partition and decomposition", partition_decomposition},
      {"log-correlation boundedness", log_correlation},
      {"Fourier tail bound", tail_bound},
      {"joint mgf error", mgf_error},
      {"exponential-sum inequality", exp_sum},
      {"moment stability", moment_stability},
      {"sup-weight decay", sup_decay},
      {"conditional L2 ratio", l2_ratio},
      {"analyticity", analyticity},
      {"Gaussian normalizer product", gaussian_normalizer},
      {"determinism across threads", determinism},
  };
  std::vector<std::size_t> selected;
  for (int i = 1; i < argc; ++i) {
    const int c = std::atoi(argv[i]);
    if (c < 1 || c > static_cast<int>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [criterion 1..%zu ...]\n", argv[0], criteria.size());
      return 2;
    }
    selected.push_back(static_cast<std::size_t>(c));
  }
  if (selected.empty())
    for (std::size_t c = 1; c <= criteria.size(); ++c) selected.push_back(c);

  int failed = 0;
  for (std::size_t c : selected) {
    const auto& [name, check] = criteria[c - 1];
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fmt::print("criterion {:2}: {} {} ({:.1f} s): {}\n", c, o.pass ? "PASS" : "FAIL", name, secs, o.detail);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
