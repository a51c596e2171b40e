#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include <fmt/format.h>

#include "chaoslab/covariance.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/mc_runtime.hpp"
#include "chaoslab/proof_kit.hpp"

namespace chaoslab::cli {

namespace {

class Csv {
 public:
  Csv(Context& ctx, const std::string& file, const std::string& header) : path_(ctx.out / file) {
    buf_.append(header);
    buf_.push_back('\n');
    ctx.outputs.push_back(file);
  }
  ~Csv() {
    std::ofstream os(path_, std::ios::binary);
    os.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
  }

  template <class... T>
  void row(const T&... v) {
    bool first = true;
    (field(v, first), ...);
    buf_.push_back('\n');
  }

 private:
  void sep(bool& first) {
    if (!first) buf_.push_back(',');
    first = false;
  }
  void field(double v, bool& first) {
    sep(first);
    fmt::format_to(std::back_inserter(buf_), "{:.17g}", v);
  }
  void field(cplx v, bool& first) {
    field(v.real(), first);
    field(v.imag(), first);
  }
  void field(std::size_t v, bool& first) {
    sep(first);
    fmt::format_to(std::back_inserter(buf_), "{}", v);
  }
  void field(int v, bool& first) {
    sep(first);
    fmt::format_to(std::back_inserter(buf_), "{}", v);
  }
  void field(const std::string& v, bool& first) {
    sep(first);
    buf_.append(v);
  }

  std::filesystem::path path_;
  fmt::memory_buffer buf_;
};

Node options(Context& ctx) { return Node(ctx.cfg.options, "options"); }

std::vector<cplx> betas_or(const Context& ctx, std::vector<cplx> def) { return ctx.cfg.betas.value_or(std::move(def)); }

cplx single_beta(const Context& ctx, cplx def) {
  if (!ctx.cfg.betas) return def;
  if (ctx.cfg.betas->size() != 1) throw ConfigError("beta: " + ctx.name + " takes a single beta");
  return ctx.cfg.betas->front();
}

TestFunction test_function(Node& o) {
  const json& f = o.raw("f");
  return f.is_null() ? TestFunction::one() : parse_test_function(f, o.key_path("f"));
}

double resolve_alpha(const Context& ctx, cplx beta, double def) {
  if (ctx.cfg.alpha_auto) return admissible_beta(beta).alpha_star;
  return ctx.cfg.alpha.value_or(def);
}

std::string fmt_beta(cplx b) {
  if (b.imag() == 0.0) return fmt::format("{:g}", b.real());
  return fmt::format("{:g}{:+g}i", b.real(), b.imag());
}

// ---------------------------------------------------------------------------

int cmd_covariance(Context& ctx) {
  Node o = options(ctx);
  const auto model = ctx.cfg.model();
  const auto ns = o.sizes("ns").value_or(std::vector<std::size_t>{64, 128, 256, 512, 1024, 2048, 4096});
  const std::size_t count = o.unsigned_integer("pairs").value_or(2048);
  const double x0 = o.number("x0").value_or(0.0);
  const double spacing = o.number("spacing").value_or(model->delta() / static_cast<double>(count));
  o.finish();
  if (count == 0) o.fail("pairs", "must be at least 1");
  std::vector<std::pair<double, double>> pairs;
  for (std::size_t i = 1; i <= count; ++i) pairs.emplace_back(x0, x0 + static_cast<double>(i) * spacing);

  Csv csv(ctx, "covariance.csv", "n,x,y,cov,target,deviation");
  for (std::size_t n : ns) {
    const auto prof = log_corr_deviation(*model, n, pairs);
    for (const auto& r : prof.rows) csv.row(n, r.x, r.y, r.cov, r.target, r.deviation);
    fmt::print("covariance: n = {}, sup deviation = {:.6g}\n", n, prof.sup_deviation);
  }
  return 0;
}

int cmd_tail(Context& ctx) {
  Node o = options(ctx);
  const std::size_t n = o.unsigned_integer("n").value_or(1024);
  const std::size_t grid = o.unsigned_integer("grid").value_or(4096);
  const double slack = o.number("slack").value_or(1e-9);
  const bool all_n = o.boolean("all_n").value_or(false);
  o.finish();
  if (grid < 2 || grid % 2 != 0) o.fail("grid", "must be an even number >= 2");
  if (n == 0) o.fail("n", "must be at least 1");

  Csv csv(ctx, "tail.csv", "n,t,remainder,bound");
  std::size_t violations = 0;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    if (2 * i == grid) continue;
    const double t = -0.5 + static_cast<double>(i) / static_cast<double>(grid);
    auto check = [&](std::size_t k, const TailValue& v) {
      csv.row(k, t, v.remainder, v.bound);
      worst = std::max(worst, std::abs(v.remainder) / v.bound);
      if (std::abs(v.remainder) > v.bound + slack) ++violations;
    };
    if (all_n) {
      const auto range = fourier_tail_range(n, t);
      for (std::size_t k = 1; k <= n; ++k) check(k, range[k]);
    } else {
      check(n, fourier_tail(n, t));
    }
  }
  fmt::print("tail: n = {}, {} points, max |R|/bound = {:.6g}, violations = {}\n", n, grid - 1, worst, violations);
  return violations == 0 ? 0 : 1;
}

int cmd_mgf(Context& ctx) {
  Node o = options(ctx);
  const auto model = ctx.cfg.model();
  const std::size_t j_max = o.unsigned_integer("j_max").value_or(12);
  std::vector<std::pair<double, double>> points{{0.0, 0.125}};
  if (o.has("points")) {
    const json& p = o.raw("points");
    points.clear();
    if (!p.is_array()) o.fail("points", "expected a list of [x, y]");
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (!p[i].is_array() || p[i].size() != 2 || !p[i][0].is_number() || !p[i][1].is_number())
        o.fail("points[" + std::to_string(i) + "]", "expected [x, y]");
      points.emplace_back(p[i][0].get<double>(), p[i][1].get<double>());
    }
  }
  Node xi = o.child("xi");
  const double re_max = xi.number("re_max").value_or(2.0 * std::numbers::sqrt2);
  const double im_max = xi.number("im_max").value_or(0.5);
  const std::size_t nre = xi.unsigned_integer("nre").value_or(5);
  const std::size_t nim = xi.unsigned_integer("nim").value_or(3);
  xi.finish();
  const std::size_t n_cap = o.unsigned_integer("n_cap").value_or(model->is_fourier() ? 8192 : model->max_level());
  const double tol = o.number("gaussian_tol").value_or(1e-10);
  o.finish();
  if (nre == 0 || nim == 0) throw ConfigError("options.xi: nre and nim must be at least 1");

  auto axis = [](double lim, std::size_t m) {
    std::vector<double> v;
    for (std::size_t i = 0; i < m; ++i)
      v.push_back(m == 1 ? 0.0 : -lim + 2.0 * lim * static_cast<double>(i) / static_cast<double>(m - 1));
    return v;
  };
  std::vector<cplx> grid;
  for (double re : axis(re_max, nre))
    for (double im : axis(im_max, nim)) grid.emplace_back(re, im);

  const BlockIndexTable table(*model, n_cap);
  if (table.max_block() < j_max)
    throw ConfigError(fmt::format("options.j_max: block {} needs more than n_cap = {} levels", j_max, n_cap));
  std::vector<double> worst(j_max + 1, 0.0);
  Csv csv(ctx, "mgf.csv", "j,x,y,xi1_re,xi1_im,xi2_re,xi2_im,eps_re,eps_im");
  for (const auto& [x, y] : points)
    for (cplx x1 : grid)
      for (cplx x2 : grid) {
        const auto eps = joint_mgf_error_profile(*model, table, j_max, x, y, x1, x2);
        for (std::size_t j = 0; j <= j_max; ++j) {
          csv.row(j, x, y, x1, x2, eps[j]);
          worst[j] = std::max(worst[j], std::abs(eps[j]));
        }
      }
  for (std::size_t j = 0; j <= j_max; ++j) fmt::print("mgf: j = {}, max |eps| = {:.6g}\n", j, worst[j]);
  const bool gaussian = model->is_fourier() ? model->fourier()->law.kind() == LawKind::gaussian
                                            : model->dilated()->base.is_gaussian();
  if (gaussian && *std::max_element(worst.begin(), worst.end()) > tol) {
    fmt::print("mgf: Gaussian coefficients should give eps = 0 (tolerance {:g})\n", tol);
    return 1;
  }
  return 0;
}

int cmd_simulate(Context& ctx) {
  Node o = options(ctx);
  o.finish();
  const auto model = ctx.cfg.model();
  const auto betas = betas_or(ctx, {1.0});
  auto levels = ctx.cfg.levels.value_or(std::vector<std::size_t>{16, 32, 64});
  std::sort(levels.begin(), levels.end());
  const std::size_t replicas = ctx.cfg.replicas.value_or(100);
  const auto quad = ctx.cfg.quad(10);
  const SeedPlan plan{ctx.seed()};

  const PathState root(model, quad, plan.path(0));
  std::vector<LogNormalizer> norms;
  for (cplx b : betas) norms.emplace_back(*model, root.points(), b, levels);
  auto task = [&](std::size_t r, const SeedPlan& sp) {
    std::vector<std::vector<cplx>> out;  // [beta][level]
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
      std::vector<cplx> m;
      for (const auto& [lvl, mass] :
           mass_trajectory(model, quad, betas[bi], levels, sp.path(static_cast<std::uint32_t>(r)), &norms[bi]))
        m.push_back(mass);
      out.push_back(std::move(m));
    }
    return out;
  };
  const auto res = run_replicas(task, replicas, plan, ctx.threads);
  Csv csv(ctx, "simulate.csv", "level,beta_re,beta_im,replica,mass_re,mass_im");
  for (std::size_t li = 0; li < levels.size(); ++li)
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
      SummaryStats s;
      for (std::size_t r = 0; r < replicas; ++r) {
        csv.row(levels[li], betas[bi], r, res[r][bi][li]);
        s.add(res[r][bi][li].real());
      }
      fmt::print("simulate: level {}, beta {}, mean Re mass = {:.6g} +- {:.2g}\n", levels[li], fmt_beta(betas[bi]),
                 s.mean(), s.stderr_mean());
    }
  return 0;
}

int cmd_martingale(Context& ctx) {
  Node o = options(ctx);
  const std::string mode = o.string("mode").value_or("exact");
  const std::size_t m = o.unsigned_integer("m").value_or(1000);
  const double tol = o.number("tol").value_or(1e-12);
  const TestFunction f = test_function(o);
  o.finish();
  if (mode != "exact" && mode != "mc") o.fail("mode", "expected \"exact\" or \"mc\"");
  if (mode == "mc" && m < 2) o.fail("m", "need at least 2 continuations");
  const auto model = ctx.cfg.model();
  const auto betas = betas_or(ctx, {0.5, 1.0, 1.3, cplx(1.0, 0.2)});
  auto levels = ctx.cfg.levels.value_or(std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8});
  std::sort(levels.begin(), levels.end());
  const std::size_t replicas = ctx.cfg.replicas.value_or(1);
  const auto quad = ctx.cfg.quad(10);
  const SeedPlan plan{ctx.seed()};

  auto task = [&](std::size_t r, const SeedPlan& sp) {
    std::vector<MartingaleResidual> out;
    PathState path(model, quad, sp.path(static_cast<std::uint32_t>(r)));
    for (std::size_t lvl : levels) {
      path = extend_path(path, lvl);
      for (cplx b : betas)
        out.push_back(mode == "exact" ? martingale_residual_exact(path, b, f) : martingale_residual_mc(path, b, f, m));
    }
    return out;
  };
  const auto res = run_replicas(task, replicas, plan, ctx.threads);
  Csv csv(ctx, "martingale.csv", "replica,level,beta_re,beta_im,residual_re,residual_im,stderr,relative");
  double worst = 0.0;
  for (std::size_t r = 0; r < replicas; ++r)
    for (std::size_t li = 0; li < levels.size(); ++li)
      for (std::size_t bi = 0; bi < betas.size(); ++bi) {
        const auto& v = res[r][li * betas.size() + bi];
        const double scale = std::abs(v.base);
        const double rel = scale > 0.0 ? std::abs(v.residual) / scale : std::abs(v.residual);
        worst = std::max(worst, mode == "exact" ? rel : std::abs(v.residual) / std::max(v.stderr_est, 1e-300));
        csv.row(r, levels[li], betas[bi], v.residual, v.stderr_est, rel);
      }
  if (mode == "exact") {
    fmt::print("martingale: exact, max relative residual = {:.3g} (tolerance {:g})\n", worst, tol);
    return worst <= tol ? 0 : 1;
  }
  fmt::print("martingale: mc, max |residual|/stderr = {:.3g}\n", worst);
  return 0;
}

int cmd_partition(Context& ctx) {
  Node o = options(ctx);
  const std::size_t n = o.unsigned_integer("n").value_or(6);
  const double tol = o.number("tol").value_or(1e-10);
  const TestFunction f = test_function(o);
  o.finish();
  const auto model = ctx.cfg.model();
  const cplx beta = single_beta(ctx, 1.0);
  const double alpha = ctx.cfg.alpha ? *ctx.cfg.alpha : admissible_beta(beta).alpha_star;
  const std::size_t replicas = ctx.cfg.replicas.value_or(100);
  const auto quad = ctx.cfg.quad(10);
  const SeedPlan plan{ctx.seed()};
  const PathState root(model, quad, plan.path(0));
  if (!root.blocks() || root.blocks()->max_block() < n)
    throw ResolutionError(fmt::format("partition: block {} is beyond the resolvable level {}", n, root.resolvable_level()));
  const std::size_t target = root.blocks()->t(n) - 1;

  struct Out {
    int cmin, cmax;
    DecompositionResidual d;
  };
  auto task = [&](std::size_t r, const SeedPlan& sp) {
    const auto path = extend_path(PathState(model, quad, sp.path(static_cast<std::uint32_t>(r))), target);
    const auto cnt = partition_count(path, n, alpha);
    const auto [lo, hi] = std::minmax_element(cnt.begin(), cnt.end());
    return Out{*lo, *hi, decomposition_residual(path, beta, f, alpha, n)};
  };
  const auto res = run_replicas(task, replicas, plan, ctx.threads);
  Csv csv(ctx, "partition.csv", "replica,alpha,count_min,count_max,residual_re,residual_im,relative");
  bool ok = true;
  double worst = 0.0;
  for (std::size_t r = 0; r < replicas; ++r) {
    const auto& v = res[r];
    const double rel = std::abs(v.d.residual) / std::abs(v.d.base);
    worst = std::max(worst, rel);
    ok = ok && v.cmin == 1 && v.cmax == 1 && rel <= tol;
    csv.row(r, alpha, v.cmin, v.cmax, v.d.residual, rel);
  }
  fmt::print("partition: n = {}, alpha = {:.6g}, {} paths, counts {}, max relative residual = {:.3g}\n", n, alpha,
             replicas, ok ? "all 1" : "not all 1 or residual above tolerance", worst);
  return ok ? 0 : 1;
}

int cmd_supdecay(Context& ctx) {
  Node o = options(ctx);
  const auto ls = o.sizes("ls").value_or(std::vector<std::size_t>{2, 3, 4, 5, 6, 7, 8, 9});
  o.finish();
  const auto model = ctx.cfg.model();
  const cplx beta = single_beta(ctx, 1.0);
  const EventConfig ev{resolve_alpha(ctx, beta, 1.3), beta, ctx.cfg.p.value_or(1.05)};
  const std::size_t replicas = ctx.cfg.replicas.value_or(2000);
  const SeedPlan plan{ctx.seed()};
  const auto res = sup_weight_decay(model, ev, ls, replicas, plan, ctx.threads, ctx.cfg.quad(12));
  {
    Csv csv(ctx, "supdecay.csv", "l,p,alpha,beta_re,beta_im,estimate,stderr");
    for (const auto& r : res.rows) {
      csv.row(r.l, ev.p, ev.alpha, beta, r.estimate, r.stderr_est);
      fmt::print("supdecay: l = {}, estimate = {:.6g} +- {:.2g}\n", r.l, r.estimate, r.stderr_est);
    }
  }
  if (res.fit) {
    Csv fit(ctx, "supdecay_fit.csv", "slope,intercept,slope_ci_lo,slope_ci_hi");
    fit.row(res.fit->slope, res.fit->intercept, res.fit->slope_ci95[0], res.fit->slope_ci95[1]);
    fmt::print("supdecay: slope = {:.6g}, 95% CI [{:.6g}, {:.6g}]\n", res.fit->slope, res.fit->slope_ci95[0],
               res.fit->slope_ci95[1]);
  } else {
    fmt::print("supdecay: no fit (needs three levels with positive estimates)\n");
  }
  return 0;
}

int cmd_l2ratio(Context& ctx) {
  Node o = options(ctx);
  const std::size_t l = o.unsigned_integer("l").value_or(3);
  const auto ns = o.sizes("ns").value_or(std::vector<std::size_t>{4, 6, 8});
  L2RatioOptions opts;
  opts.outer = o.unsigned_integer("outer").value_or(opts.outer);
  opts.inner = o.unsigned_integer("inner").value_or(opts.inner);
  opts.interval = o.unsigned_integer("interval").value_or(opts.interval);
  const TestFunction f = test_function(o);
  o.finish();
  const auto model = ctx.cfg.model();
  const cplx beta = single_beta(ctx, 0.8);
  const EventConfig ev{resolve_alpha(ctx, beta, 1.1), beta, ctx.cfg.p.value_or(1.5)};
  const SeedPlan plan{ctx.seed()};
  const auto rows = conditional_l2_ratio(model, ev, l, ns, f, opts, plan, ctx.threads, ctx.cfg.quad(11));
  Csv csv(ctx, "l2ratio.csv", "l,n,ratio_p50,ratio_p95,vacuous_frac,replicas");
  for (const auto& r : rows) {
    csv.row(r.l, r.n, r.p50, r.p95, r.vacuous_frac, r.replicas);
    fmt::print("l2ratio: l = {}, n = {}, p50 = {:.6g}, p95 = {:.6g}, vacuous = {:.3g}\n", r.l, r.n, r.p50, r.p95,
               r.vacuous_frac);
  }
  return 0;
}

int cmd_moments(Context& ctx) {
  Node o = options(ctx);
  o.finish();
  const auto model = ctx.cfg.model();
  const auto betas = betas_or(ctx, {0.8});
  auto levels = ctx.cfg.levels.value_or(std::vector<std::size_t>{64, 128, 256, 512});
  std::sort(levels.begin(), levels.end());
  const double p = ctx.cfg.p.value_or(1.5);
  const std::size_t replicas = ctx.cfg.replicas.value_or(2000);
  const auto quad = ctx.cfg.quad(12);
  const SeedPlan plan{ctx.seed()};
  const PathState root(model, quad, plan.path(0));
  std::vector<LogNormalizer> norms;
  for (cplx b : betas) norms.emplace_back(*model, root.points(), b, levels);

  auto task = [&](std::size_t r, const SeedPlan& sp) {
    std::vector<cplx> out;  // [beta][level]
    for (std::size_t bi = 0; bi < betas.size(); ++bi)
      for (const auto& [lvl, mass] :
           mass_trajectory(model, quad, betas[bi], levels, sp.path(static_cast<std::uint32_t>(r)), &norms[bi]))
        out.push_back(mass);
    return out;
  };
  const auto res = run_replicas(task, replicas, plan, ctx.threads);
  Csv csv(ctx, "moments.csv", "level,beta_re,beta_im,p,estimate,stderr,ci_lo,ci_hi,median_re,median_im");
  for (std::size_t bi = 0; bi < betas.size(); ++bi)
    for (std::size_t li = 0; li < levels.size(); ++li) {
      std::vector<cplx> mu;
      std::vector<double> re, im;
      for (const auto& v : res) {
        const cplx m = v[bi * levels.size() + li];
        mu.push_back(m);
        re.push_back(m.real());
        im.push_back(m.imag());
      }
      const auto est = lp_moment(std::span<const cplx>(mu), p);
      const double med_re = quantile(re, 0.5), med_im = quantile(im, 0.5);
      csv.row(levels[li], betas[bi], p, est.estimate, est.stderr_est, est.ci95[0], est.ci95[1], med_re, med_im);
      fmt::print("moments: beta {}, level {}, E|mu|^p = {:.6g} [{:.6g}, {:.6g}], median Re = {:.6g}\n",
                 fmt_beta(betas[bi]), levels[li], est.estimate, est.ci95[0], est.ci95[1], med_re);
    }
  return 0;
}

int cmd_analyticity(Context& ctx) {
  Node o = options(ctx);
  const std::size_t level = o.unsigned_integer("level").value_or(64);
  const std::string mode_s = o.string("mode").value_or("analytic");
  const double tol = o.number("tol").value_or(1e-8);
  const TestFunction f = test_function(o);
  std::vector<std::pair<std::size_t, std::size_t>> gap_pairs;
  if (o.has("gap_pairs")) {
    const json& gp = o.raw("gap_pairs");
    if (!gp.is_array()) o.fail("gap_pairs", "expected a list of [n1, n2]");
    for (std::size_t i = 0; i < gp.size(); ++i) {
      if (!gp[i].is_array() || gp[i].size() != 2 || !gp[i][0].is_number_unsigned() || !gp[i][1].is_number_unsigned())
        o.fail("gap_pairs[" + std::to_string(i) + "]", "expected [n1, n2]");
      gap_pairs.emplace_back(gp[i][0].get<std::size_t>(), gp[i][1].get<std::size_t>());
    }
  }
  const std::size_t gap_replicas = o.unsigned_integer("gap_replicas").value_or(200);
  o.finish();
  if (mode_s != "analytic" && mode_s != "modulus_control")
    o.fail("mode", "expected \"analytic\" or \"modulus_control\"");
  const WeightMode mode = mode_s == "analytic" ? WeightMode::analytic : WeightMode::modulus_control;

  const auto model = ctx.cfg.model();
  const auto quad = ctx.cfg.quad(10);
  const std::size_t paths = ctx.cfg.replicas.value_or(20);
  const SeedPlan plan{ctx.seed()};
  std::vector<BetaCircle> circles{{0.8, 0.1, 64}, {1.0, 0.1, 64}, {1.2, 0.1, 64}};
  if (ctx.cfg.region && !ctx.cfg.region->circles.empty()) circles = ctx.cfg.region->circles;

  const PathState root(model, quad, plan.path(0));
  Csv samples(ctx, "analyticity.csv", "beta_re,beta_im,mu_re,mu_im,level");
  Csv resid(ctx, "analyticity_residual.csv", "circle,replica,loop_rel,gap_rel");
  double worst = 0.0;
  for (std::size_t ci = 0; ci < circles.size(); ++ci) {
    const CircleNormalizers norms(*model, root.points(), level, circles[ci], mode);
    auto task = [&](std::size_t r, const SeedPlan& sp) {
      const auto path = extend_path(PathState(model, quad, sp.path(static_cast<std::uint32_t>(r))), level);
      return cauchy_residual(path, f, norms);
    };
    const auto res = run_replicas(task, paths, plan, ctx.threads);
    double cw = 0.0;
    for (std::size_t r = 0; r < paths; ++r) {
      for (const auto& [b, mu] : res[r].samples) samples.row(b, mu, level);
      resid.row(ci, r, res[r].loop_rel, res[r].gap_rel);
      cw = std::max({cw, res[r].loop_rel, res[r].gap_rel});
    }
    worst = std::max(worst, cw);
    fmt::print("analyticity: circle center {} radius {:g}, {} paths, max relative residual = {:.3g}\n",
               fmt_beta(circles[ci].center), circles[ci].radius, paths, cw);
  }

  if (!gap_pairs.empty()) {
    const BetaRectangle rect = ctx.cfg.region && ctx.cfg.region->rectangle ? *ctx.cfg.region->rectangle : BetaRectangle{};
    const auto betas = rect.points();
    const auto rows = uniform_cauchy_gap(model, f, betas, gap_pairs, ctx.cfg.p.value_or(1.5), gap_replicas,
                                         SeedPlan{plan.master_seed + 1}, ctx.threads, quad);
    Csv gap(ctx, "cauchy_gap.csv", "pair,sup_moment");
    for (const auto& r : rows) {
      gap.row(fmt::format("{}:{}", r.n1, r.n2), r.sup_moment);
      fmt::print("analyticity: levels {}:{}, sup E|mu_n1 - mu_n2|^p = {:.6g}\n", r.n1, r.n2, r.sup_moment);
    }
  }
  if (mode == WeightMode::analytic) return worst <= tol ? 0 : 1;
  return 0;
}

int cmd_expsum(Context& ctx) {
  Node o = options(ctx);
  const auto families = o.sizes("families").value_or(std::vector<std::size_t>{1, 2, 3});
  const auto alphas = o.numbers("alphas").value_or(std::vector<double>{-2.0, -1.0, -0.5, 0.5, 1.0, 2.0});
  const std::size_t n_max = o.unsigned_integer("n_max").value_or(10000);
  const double exponent = o.number("exponent").value_or(0.4);
  const double slack = o.number("slack").value_or(1e-12);
  o.finish();
  Csv csv(ctx, "expsum.csv", "family,alpha,pairs,violations,max_ratio,worst_m,worst_n");
  std::size_t total = 0;
  for (std::size_t fam : families) {
    if (fam < 1 || fam > 3) o.fail("families", "expected entries 1, 2 or 3");
    const auto fam_kind = fam == 1 ? ScheduleFamily::power : fam == 2 ? ScheduleFamily::harmonic : ScheduleFamily::log_harmonic;
    const auto s = build_schedule(fam_kind, n_max, exponent);
    for (double a : alphas) {
      const auto r = exp_sum_sweep(s.a, a, slack);
      total += r.violations;
      csv.row(fam, a, r.pairs, r.violations, r.max_ratio, r.worst_m, r.worst_n);
      fmt::print("expsum: family {}, alpha {:g}, {} pairs, max lhs/rhs = {:.6g}, violations = {}\n", fam, a, r.pairs,
                 r.max_ratio, r.violations);
    }
  }
  return total == 0 ? 0 : 1;
}

int cmd_admissible(Context& ctx) {
  Node o = options(ctx);
  const auto d = o.unsigned_integer("d").value_or(1);
  const double r_cap = o.number("r_cap").value_or(0.5);
  o.finish();
  if (d == 0) o.fail("d", "must be at least 1");
  const auto betas = betas_or(ctx, {1.0});
  Csv csv(ctx, "admissible.csv", "beta_re,beta_im,d,r_cap,alpha_star,bracket_min,margin,admissible");
  bool all = true;
  for (cplx b : betas) {
    const auto a = admissible_beta(b, static_cast<unsigned>(d), r_cap);
    const double im2 = b.imag() * b.imag();
    csv.row(b, static_cast<std::size_t>(d), r_cap, a.alpha_star, a.bracket_min, a.margin, a.admissible ? 1 : 0);
    if (a.admissible)
      fmt::print("admissible ({:g} < {:g}, alpha* = {:g})\n", im2, a.bracket_min, a.alpha_star);
    else
      fmt::print("inadmissible ({:g} {} {:g})\n", im2, im2 > a.bracket_min ? ">" : "=", a.bracket_min);
    all = all && a.admissible;
  }
  return all ? 0 : 1;
}

int cmd_audit(Context& ctx) {
  Node o = options(ctx);
  const auto model = ctx.cfg.model();
  const std::size_t n = o.unsigned_integer("n").value_or(std::min<std::size_t>(1024, model->max_level()));
  const double eps = o.number("epsilon").value_or(0.1);
  AuditOptions opts;
  if (auto xs = o.numbers("sample_x")) opts.sample_x = *xs;
  opts.lambda_max = o.number("lambda_max").value_or(opts.lambda_max);
  opts.lambda_points = o.unsigned_integer("lambda_points").value_or(opts.lambda_points);
  o.finish();
  const auto rep = assumption_audit(*model, n, eps, opts);
  {
    Csv csv(ctx, "audit.csv", "level,moment_partial_sum");
    for (const auto& [lvl, s] : rep.moment_partial_sums) csv.row(lvl, s);
  }
  Csv sum(ctx, "audit_summary.csv",
          "epsilon,summand_exponent,moment_flag,min_normalizer,max_normalizer,exp_moment_flag,decay_flag");
  sum.row(rep.epsilon, rep.summand_exponent.value_or(std::nan("")), rep.moment_flag, rep.min_normalizer,
          rep.max_normalizer, rep.exp_moment_flag, rep.decay_flag);
  fmt::print("audit: {}; moment sums {}, exponential moments {}, decay {}\n", model->name(), rep.moment_flag,
             rep.exp_moment_flag, rep.decay_flag);
  const bool ok = rep.moment_flag != "divergent" && rep.exp_moment_flag == "pass" && rep.decay_flag == "ok";
  return ok ? 0 : 1;
}

}  // namespace

std::uint64_t Context::seed() const {
  if (!cfg.seed) throw ConfigError("mc.master_seed: required by '" + name + "' (or pass --seed)");
  return *cfg.seed;
}

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table{
      {"covariance", cmd_covariance}, {"tail", cmd_tail},       {"mgf", cmd_mgf},
      {"simulate", cmd_simulate},     {"martingale", cmd_martingale}, {"partition", cmd_partition},
      {"supdecay", cmd_supdecay},     {"l2ratio", cmd_l2ratio}, {"moments", cmd_moments},
      {"analyticity", cmd_analyticity}, {"expsum", cmd_expsum}, {"admissible", cmd_admissible},
      {"audit", cmd_audit}};
  return table;
}

const std::map<std::string, std::string>& command_help() {
  static const std::map<std::string, std::string> table{
      {"covariance", "partial covariance against the log-correlated target"},
      {"tail", "Fourier log-series remainder against its bound"},
      {"mgf", "per-block error of the Gaussian approximation to the joint mgf"},
      {"simulate", "total masses of the chaos along seeded paths"},
      {"martingale", "martingale residual of the chaos integral (exact or Monte Carlo)"},
      {"partition", "exceedance partition of unity and decomposition residual"},
      {"supdecay", "decay in l of the supremum weight moment on the exceedance event"},
      {"l2ratio", "conditional second-moment ratio over dyadic intervals"},
      {"moments", "empirical moments and medians of the total mass"},
      {"analyticity", "Cauchy loop residuals in beta and uniform level gaps"},
      {"expsum", "exponential-sum inequality over all index pairs"},
      {"admissible", "admissibility of complex beta"},
      {"audit", "moment and normalizer assumptions of a model"}};
  return table;
}

}  // namespace chaoslab::cli
