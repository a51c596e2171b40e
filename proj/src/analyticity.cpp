#include "chaoslab/analyticity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "chaoslab/errors.hpp"
#include "chaoslab/proof_kit.hpp"

namespace chaoslab {

namespace {

using cplx = std::complex<double>;
constexpr double kPi = std::numbers::pi;

cplx effective_beta(cplx beta, WeightMode mode) { return mode == WeightMode::analytic ? beta : cplx(std::abs(beta)); }

}  // namespace

std::vector<cplx> BetaCircle::points() const {
  std::vector<cplx> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double th = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m);
    out[j] = center + radius * cplx(std::cos(th), std::sin(th));
  }
  return out;
}

std::vector<cplx> BetaRectangle::points() const {
  if (nx < 1 || ny < 1) throw ParameterError("beta rectangle: grid must have at least one point per axis");
  std::vector<cplx> out;
  out.reserve(nx * ny);
  for (std::size_t a = 0; a < nx; ++a) {
    const double re = nx == 1 ? re_lo : re_lo + (re_hi - re_lo) * static_cast<double>(a) / static_cast<double>(nx - 1);
    for (std::size_t b = 0; b < ny; ++b) {
      const double im =
          ny == 1 ? im_lo : im_lo + (im_hi - im_lo) * static_cast<double>(b) / static_cast<double>(ny - 1);
      out.emplace_back(re, im);
    }
  }
  return out;
}

void validate(const BetaCircle& c) {
  if (!(c.radius > 0.0)) throw ParameterError("beta circle: radius must be positive");
  if (c.m < 32 || (c.m & (c.m - 1)) != 0) throw ParameterError("beta circle: m must be a power of two, at least 32");
}

double normalizer_floor(const FieldModel& model, std::size_t n, std::span<const cplx> betas,
                        std::span<const double> points) {
  double floor = std::numeric_limits<double>::infinity();
  if (n == 0) return 1.0;
  for (cplx beta : betas) {
    if (beta == cplx{}) {
      floor = std::min(floor, 1.0);
      continue;
    }
    const LogNormalizer norm(model, points, beta, {n}, 0.0);
    floor = std::min(floor, norm.min_factor_modulus());
  }
  return std::isinf(floor) ? 1.0 : floor;
}

CircleNormalizers::CircleNormalizers(const FieldModel& model, std::span<const double> points, std::size_t level,
                                     const BetaCircle& circle, WeightMode mode, double floor)
    : circle_(circle), mode_(mode), level_(level) {
  validate(circle);
  const auto betas = circle.points();
  norms_.reserve(betas.size() + 1);
  for (cplx b : betas) norms_.emplace_back(model, points, effective_beta(b, mode), std::vector<std::size_t>{level}, floor);
  norms_.emplace_back(model, points, effective_beta(circle.center, mode), std::vector<std::size_t>{level}, floor);
}

CauchyResidual cauchy_residual(const PathState& path, const TestFunction& f, const CircleNormalizers& norms) {
  if (path.level() != norms.level()) throw DomainError("cauchy_residual: normalizers built for a different level");
  const BetaCircle& c = norms.circle();
  const auto betas = c.points();
  const auto fv = f.evaluate(path.points());
  auto mu = [&](cplx beta, const LogNormalizer& norm) {
    const cplx eb = effective_beta(beta, norms.mode());
    return grid_average(fv, weight_from(path.field(), eb, norm.at(path.level())));
  };
  CauchyResidual out;
  cplx loop{}, avg{};
  const double dth = 2.0 * kPi / static_cast<double>(c.m);
  for (std::size_t j = 0; j < c.m; ++j) {
    const cplx v = mu(betas[j], norms.at(j));
    out.samples.emplace_back(betas[j], v);
    out.max_abs_mu = std::max(out.max_abs_mu, std::abs(v));
    loop += v * (betas[j] - c.center) * cplx(0.0, 1.0) * dth;
    avg += v;
  }
  const cplx center = mu(c.center, norms.center());
  out.max_abs_mu = std::max(out.max_abs_mu, std::abs(center));
  out.loop_integral = loop;
  out.mean_value_gap = avg / static_cast<double>(c.m) - center;
  const double scale = out.max_abs_mu > 0.0 ? out.max_abs_mu : 1.0;
  out.loop_rel = std::abs(out.loop_integral) / (c.radius * scale);
  out.gap_rel = std::abs(out.mean_value_gap) / scale;
  return out;
}

CauchyResidual cauchy_residual(const PathState& path, const TestFunction& f, const BetaCircle& circle,
                               WeightMode mode) {
  const CircleNormalizers norms(path.model(), path.points(), path.level(), circle, mode);
  return cauchy_residual(path, f, norms);
}

std::vector<CauchyGapRow> uniform_cauchy_gap(std::shared_ptr<const FieldModel> model, const TestFunction& f,
                                             std::span<const cplx> betas,
                                             std::span<const std::pair<std::size_t, std::size_t>> pairs, double p,
                                             std::size_t replicas, const SeedPlan& plan, std::size_t threads,
                                             const QuadratureSpec& quad, double r_cap) {
  if (betas.empty() || pairs.empty()) throw ParameterError("uniform_cauchy_gap: empty beta grid or level pairs");
  for (cplx b : betas) {
    const Admissibility adm = admissible_beta(b, 1, r_cap);
    if (!adm.admissible) {
      std::ostringstream os;
      os << "uniform_cauchy_gap: beta = " << b << " lies outside the admissible region (margin " << adm.margin << ")";
      throw ParameterError(os.str());
    }
  }
  std::set<std::size_t> level_set;
  for (const auto& [a, b] : pairs) {
    if (a > b) throw ParameterError("uniform_cauchy_gap: level pairs must satisfy n1 <= n2");
    level_set.insert(a);
    level_set.insert(b);
  }
  const std::vector<std::size_t> levels(level_set.begin(), level_set.end());
  const PathState root(model, quad, plan.path(0));
  std::vector<LogNormalizer> norms;
  norms.reserve(betas.size());
  for (cplx b : betas) norms.emplace_back(*model, root.points(), b, levels);
  const auto fv = f.evaluate(root.points());

  // samples[r][beta * L + level index]
  auto task = [&](std::size_t r, const SeedPlan& sp) {
    PathState path(model, quad, sp.path(static_cast<std::uint32_t>(r)));
    std::vector<cplx> out(betas.size() * levels.size());
    for (std::size_t li = 0; li < levels.size(); ++li) {
      path = extend_path(path, levels[li]);
      for (std::size_t bi = 0; bi < betas.size(); ++bi)
        out[bi * levels.size() + li] =
            grid_average(fv, weight_from(path.field(), betas[bi], norms[bi].at(levels[li])));
    }
    return out;
  };
  const auto samples = run_replicas(task, replicas, plan, threads);

  auto index = [&](std::size_t lvl) {
    return static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), lvl) - levels.begin());
  };
  std::vector<CauchyGapRow> rows;
  for (const auto& [n1, n2] : pairs) {
    double sup = 0.0;
    const std::size_t i1 = index(n1), i2 = index(n2);
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
      std::vector<cplx> inc(samples.size());
      for (std::size_t r = 0; r < samples.size(); ++r)
        inc[r] = samples[r][bi * levels.size() + i1] - samples[r][bi * levels.size() + i2];
      sup = std::max(sup, lp_moment(inc, p).estimate);
    }
    rows.push_back({n1, n2, sup});
  }
  return rows;
}

}  // namespace chaoslab
