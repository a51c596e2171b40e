#include "chaoslab/proof_kit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "chaoslab/errors.hpp"

namespace chaoslab {

namespace {

using cplx = std::complex<double>;

// Whole-grid block indicators for blocks 0..n: a[l][i] = 1_{A_l}(x_i) and
// quiet[l][i] = 1_{B_{l,n}}(x_i).
struct EventIndicators {
  std::vector<std::vector<char>> a;
  std::vector<std::vector<char>> quiet;
};

EventIndicators event_indicators(const PathState& path, std::size_t n, double alpha, std::size_t begin,
                                 std::size_t end) {
  const auto& table = path.blocks();
  if (!table) throw ResolutionError("events: the grid resolves no level");
  if (!path.has_block(n))
    throw DomainError("events: path at level " + std::to_string(path.level()) + " has not reached block " +
                      std::to_string(n));
  const std::size_t m = end - begin;
  EventIndicators ev;
  ev.a.assign(n + 1, std::vector<char>(m, 0));
  ev.quiet.assign(n + 1, std::vector<char>(m, 1));
  for (std::size_t l = 0; l <= n; ++l) {
    const double thr = exceedance_threshold(*table, l, alpha);
    const auto z = path.block(l);
    for (std::size_t i = 0; i < m; ++i) ev.a[l][i] = z[begin + i] >= thr ? 1 : 0;
  }
  for (std::size_t l = n; l-- > 0;)
    for (std::size_t i = 0; i < m; ++i) ev.quiet[l][i] = static_cast<char>(ev.quiet[l + 1][i] && !ev.a[l + 1][i]);
  return ev;
}

}  // namespace

void validate(const EventConfig& cfg, unsigned d) {
  const double rb = cfg.beta.real();
  const double crit = std::sqrt(2.0 * d);
  std::ostringstream os;
  if (!(rb > 0.0 && rb < crit)) {
    os << "events: Re beta = " << rb << " must lie in (0, " << crit << ")";
    throw ParameterError(os.str());
  }
  if (!(cfg.alpha > rb && cfg.alpha < 2.0 * rb)) {
    os << "events: alpha = " << cfg.alpha << " must lie in (Re beta, 2 Re beta) = (" << rb << ", " << 2.0 * rb << ")";
    throw ParameterError(os.str());
  }
  if (!(cfg.p > 1.0)) throw ParameterError("events: p must exceed 1");
}

Admissibility admissible_beta(cplx beta, unsigned d, double r_cap) {
  const double rb = beta.real();
  const double crit = std::sqrt(2.0 * d);
  if (!(rb > 0.0 && rb < crit)) {
    std::ostringstream os;
    os << "admissible_beta: Re beta = " << rb << " outside (0, " << crit << ")";
    throw DomainError(os.str());
  }
  if (!(r_cap > 0.0)) throw DomainError("admissible_beta: r_cap must be positive");
  auto bracket = [&](double a) {
    const double t1 = 0.5 * (a - rb) * (a - rb);
    const double t2 = 0.5 * (2.0 * rb - a) * (2.0 * rb - a) - rb * rb + static_cast<double>(d);
    return std::min({t1, t2, r_cap * r_cap});
  };
  double lo = rb, hi = 2.0 * rb;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (bracket(m1) < bracket(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  const double eps = 1e-10 * rb;
  const double a = std::clamp(0.5 * (lo + hi), rb + eps, 2.0 * rb - eps);
  Admissibility out;
  out.alpha_star = a;
  out.bracket_min = bracket(a);
  out.margin = out.bracket_min - beta.imag() * beta.imag();
  out.admissible = out.margin > 0.0;
  return out;
}

double exceedance_threshold(const BlockIndexTable& table, std::size_t j, double alpha) {
  return alpha * table.cumulative_variance(table.t(j) - 1);
}

std::vector<std::size_t> last_exceedance(const PathState& path, std::size_t n, double alpha) {
  const auto ev = event_indicators(path, n, alpha, 0, path.points().size());
  std::vector<std::size_t> out(path.points().size(), 0);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t l = n + 1; l-- > 0;)
      if (ev.a[l][i]) {
        out[i] = l;
        break;
      }
  return out;
}

std::vector<int> partition_count(const PathState& path, std::size_t n, double alpha) {
  const auto ev = event_indicators(path, n, alpha, 0, path.points().size());
  std::vector<int> out(path.points().size(), 0);
  for (std::size_t l = 0; l <= n; ++l)
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += ev.a[l][i] && ev.quiet[l][i];
  return out;
}

DecompositionResidual decomposition_residual(const PathState& path, cplx beta, const TestFunction& f, double alpha,
                                             std::size_t n) {
  const auto& table = path.blocks();
  if (!table) throw ResolutionError("decomposition: the grid resolves no level");
  const std::size_t big_n = table->t(n) - 1;
  if (path.level() != big_n)
    throw DomainError("decomposition: path must sit at level t_n - 1 = " + std::to_string(big_n));
  const auto ev = event_indicators(path, n, alpha, 0, path.points().size());
  const LogNormalizer norm(path.model(), path.points(), beta, {big_n});
  const auto w = weight_field(path, beta, norm);
  const auto fv = f.evaluate(path.points());
  const cplx base = grid_average(fv, w);
  const double inv = 1.0 / static_cast<double>(w.size());
  cplx total{};
  for (std::size_t l = 0; l <= n; ++l) {
    cplx part{};
    for (std::size_t i = 0; i < w.size(); ++i)
      if (ev.a[l][i] && ev.quiet[l][i]) part += fv[i] * w[i];
    total += part * inv;
  }
  return {total - base, base};
}

SupDecayResult sup_weight_decay(std::shared_ptr<const FieldModel> model, const EventConfig& cfg,
                                std::span<const std::size_t> ls, std::size_t replicas, const SeedPlan& plan,
                                std::size_t threads, const QuadratureSpec& quad) {
  validate(cfg);
  const double rb = cfg.beta.real();
  if (!(cfg.alpha - cfg.p * rb > 0.0)) {
    std::ostringstream os;
    os << "sup_weight_decay: alpha - p Re beta = " << cfg.alpha - cfg.p * rb << " must be positive";
    throw ParameterError(os.str());
  }
  if (ls.empty()) throw ParameterError("sup_weight_decay: no levels requested");
  const PathState root(model, quad, plan.path(0));
  if (!root.blocks()) throw ResolutionError("sup_weight_decay: the grid resolves no level");
  const auto& table = *root.blocks();
  const std::size_t lmax = *std::max_element(ls.begin(), ls.end());
  const std::size_t grid = quad.size();
  std::vector<std::size_t> norm_levels;
  for (std::size_t l : ls) {
    if ((grid >> (l + 1)) == 0)
      throw ResolutionError("sup_weight_decay: J for l = " + std::to_string(l) + " contains no grid point");
    norm_levels.push_back(table.t(l) - 1);
  }
  const LogNormalizer norm(*model, root.points(), cfg.beta, norm_levels);
  const std::size_t target = table.t(lmax) - 1;

  auto task = [&](std::size_t r, const SeedPlan& sp) {
    const PathState path = extend_path(PathState(model, quad, sp.path(static_cast<std::uint32_t>(r))), target);
    std::vector<std::pair<double, double>> out;
    out.reserve(ls.size());
    for (std::size_t l : ls) {
      const auto z = path.block(l);
      const auto lg = norm.at(table.t(l) - 1);
      const double thr = exceedance_threshold(table, l, cfg.alpha);
      const std::size_t m = grid >> (l + 1);
      double with = 0.0, without = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        const double v = std::pow(std::abs(std::exp(cfg.beta * z[i] - lg[i])), cfg.p);
        without = std::max(without, v);
        if (z[i] >= thr) with = std::max(with, v);
      }
      out.emplace_back(with, without);
    }
    return out;
  };
  const auto samples = run_replicas(task, replicas, plan, threads);

  SupDecayResult res;
  std::vector<DecayPoint> pts;
  for (std::size_t li = 0; li < ls.size(); ++li) {
    SummaryStats with, without;
    for (const auto& s : samples) {
      with.add(s[li].first);
      without.add(s[li].second);
    }
    res.rows.push_back({ls[li], with.mean(), with.stderr_mean(), without.mean()});
    pts.push_back({static_cast<double>(ls[li]), with.mean(), with.stderr_mean()});
  }
  const bool positive = std::all_of(pts.begin(), pts.end(), [](const DecayPoint& d) { return d.estimate > 0.0; });
  if (pts.size() >= 3 && positive) res.fit = decay_fit(pts);
  return res;
}

std::vector<L2RatioRow> conditional_l2_ratio(std::shared_ptr<const FieldModel> model, const EventConfig& cfg,
                                             std::size_t l, std::span<const std::size_t> ns_in,
                                             const TestFunction& f, const L2RatioOptions& opts, const SeedPlan& plan,
                                             std::size_t threads, const QuadratureSpec& quad) {
  validate(cfg);
  std::vector<std::size_t> ns(ns_in.begin(), ns_in.end());
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  if (ns.empty() || ns.front() < l) throw ParameterError("conditional_l2_ratio: need n >= l");
  if (opts.inner < 1 || opts.outer < 1) throw ParameterError("conditional_l2_ratio: replica counts must be positive");
  const std::size_t grid = quad.size();
  const std::size_t width = grid >> (l + 1);
  if (width == 0) throw ResolutionError("conditional_l2_ratio: I_{l,i} contains no grid point");
  if (opts.interval >= (std::size_t{1} << (l + 1)))
    throw ParameterError("conditional_l2_ratio: interval index outside [0, 2^(l+1))");
  const std::size_t begin = opts.interval * width;

  const PathState root(model, quad, plan.path(0));
  if (!root.blocks()) throw ResolutionError("conditional_l2_ratio: the grid resolves no level");
  const auto& table = *root.blocks();
  std::vector<std::size_t> norm_levels{table.t(l) - 1};
  for (std::size_t n : ns) norm_levels.push_back(table.t(n) - 1);
  const LogNormalizer norm(*model, root.points(), cfg.beta, norm_levels);
  const std::size_t prefix_level = table.t(l) - 1;
  const std::size_t final_level = table.t(ns.back()) - 1;

  const auto pts = root.points();
  std::vector<cplx> fv(width);
  double fsup = 0.0;
  for (std::size_t i = 0; i < width; ++i) {
    fv[i] = f(pts[begin + i]);
    fsup = std::max(fsup, std::abs(fv[i]));
  }
  const double inv_grid = 1.0 / static_cast<double>(grid);
  const double scale = std::ldexp(1.0, -2 * static_cast<int>(l)) * fsup * fsup;

  auto weights = [&](const PathState& path, std::size_t j) {
    const auto z = path.block(j);
    const auto lg = norm.at(table.t(j) - 1);
    std::vector<cplx> w(width);
    for (std::size_t i = 0; i < width; ++i) w[i] = std::exp(cfg.beta * z[begin + i] - lg[begin + i]);
    return w;
  };

  using Ratios = std::vector<double>;  // NaN marks a vacuous replica
  auto task = [&](std::size_t r, const SeedPlan& sp) {
    const PathKey key = sp.path(static_cast<std::uint32_t>(r));
    const PathState prefix = extend_path(PathState(model, quad, key), prefix_level);
    const auto el = weights(prefix, l);
    const auto zl = prefix.block(l);
    const double thr_l = exceedance_threshold(table, l, cfg.alpha);
    std::vector<char> a_l(width);
    double sup = 0.0;
    for (std::size_t i = 0; i < width; ++i) {
      a_l[i] = zl[begin + i] >= thr_l ? 1 : 0;
      if (a_l[i]) sup = std::max(sup, std::norm(el[i]));
    }
    const double denom = scale * sup;
    Ratios out(ns.size(), std::nan(""));
    if (!(denom > 0.0)) return out;
    std::vector<double> num(ns.size(), 0.0);
    for (std::size_t b = 1; b <= opts.inner; ++b) {
      const PathState cont = extend_path(prefix, final_level, key.with_branch(static_cast<std::uint32_t>(b)));
      std::vector<char> quiet(width, 1);
      std::size_t j = l;
      for (std::size_t ni = 0; ni < ns.size(); ++ni) {
        const std::size_t n = ns[ni];
        for (; j < n; ++j) {
          const auto z = cont.block(j + 1);
          const double thr = exceedance_threshold(table, j + 1, cfg.alpha);
          for (std::size_t i = 0; i < width; ++i)
            if (z[begin + i] >= thr) quiet[i] = 0;
        }
        const auto w = n == l ? el : weights(cont, n);
        cplx acc{};
        for (std::size_t i = 0; i < width; ++i)
          if (a_l[i] && quiet[i]) acc += fv[i] * w[i];
        num[ni] += std::norm(acc * inv_grid);
      }
    }
    for (std::size_t ni = 0; ni < ns.size(); ++ni) out[ni] = num[ni] / static_cast<double>(opts.inner) / denom;
    return out;
  };
  const auto samples = run_replicas(task, opts.outer, plan, threads);

  std::vector<L2RatioRow> rows;
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    std::vector<double> vals;
    for (const auto& s : samples)
      if (!std::isnan(s[ni])) vals.push_back(s[ni]);
    const double vac = 1.0 - static_cast<double>(vals.size()) / static_cast<double>(samples.size());
    L2RatioRow row{l, ns[ni], std::nan(""), std::nan(""), vac, samples.size()};
    if (!vals.empty()) {
      row.p50 = quantile(vals, 0.5);
      row.p95 = quantile(vals, 0.95);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace chaoslab
