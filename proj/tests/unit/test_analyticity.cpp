#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chaoslab/analyticity.hpp"
#include "chaoslab/errors.hpp"

using namespace chaoslab;
using cplx = std::complex<double>;

namespace {

std::shared_ptr<const FieldModel> fourier(CoefficientLaw law = CoefficientLaw::rademacher()) {
  return std::make_shared<const FieldModel>(FourierModel{law});
}

}  // namespace

TEST(Circle, PointsAndValidation) {
  const BetaCircle c{cplx(1.0, 0.0), 0.1, 64};
  const auto pts = c.points();
  ASSERT_EQ(pts.size(), 64u);
  for (const auto& b : pts) EXPECT_NEAR(std::abs(b - c.center), 0.1, 1e-15);
  EXPECT_THROW(validate(BetaCircle{1.0, 0.1, 48}), ParameterError);
  EXPECT_THROW(validate(BetaCircle{1.0, 0.1, 16}), ParameterError);
  EXPECT_THROW(validate(BetaCircle{1.0, 0.0, 64}), ParameterError);
  EXPECT_EQ(BetaRectangle{}.points().size(), 30u);
}

TEST(NormalizerFloor, Examples) {
  const auto m = fourier();
  const std::vector<double> x0{0.0};
  const std::vector<cplx> zero{0.0};
  EXPECT_EQ(normalizer_floor(*m, 32, zero, x0), 1.0);
  const std::vector<cplx> root{cplx(0.0, std::numbers::pi / 2)};
  EXPECT_LT(normalizer_floor(*m, 1, root, x0), 1e-15);
  const auto g = fourier(CoefficientLaw::gaussian());
  const std::vector<cplx> b{cplx(1.0, 0.5)};
  // |exp(beta^2 / (2k))| is smallest at k = n when Re beta^2 > 0.
  EXPECT_NEAR(normalizer_floor(*g, 10, b, x0), std::exp(0.75 / 20.0), 1e-14);
}

TEST(Cauchy, AnalyticLoopVanishes) {
  const auto model = fourier();
  const QuadratureSpec quad{10, 8.0};
  for (double center : {0.8, 1.0, 1.2}) {
    const BetaCircle c{center, 0.1, 64};
    for (std::uint32_t r = 0; r < 3; ++r) {
      const auto p = extend_path(PathState(model, quad, PathKey{12, r, 0}), 64);
      const auto res = cauchy_residual(p, TestFunction::one(), c);
      EXPECT_LE(res.loop_rel, 1e-8);
      EXPECT_LE(res.gap_rel, 1e-8);
      EXPECT_EQ(res.samples.size(), 64u);
    }
  }
}

TEST(Cauchy, ModulusControlFails) {
  const auto model = fourier();
  const auto p = extend_path(PathState(model, {10, 8.0}, PathKey{12, 0, 0}), 64);
  const auto res = cauchy_residual(p, TestFunction::one(), BetaCircle{1.0, 0.1, 64}, WeightMode::modulus_control);
  EXPECT_GT(std::max(res.loop_rel, res.gap_rel), 1e-3);
}

TEST(Cauchy, SharedNormalizersMatch) {
  const auto model = fourier();
  const auto p = extend_path(PathState(model, {10, 8.0}, PathKey{2, 0, 0}), 32);
  const BetaCircle c{1.0, 0.1, 32};
  const CircleNormalizers norms(*model, p.points(), 32, c, WeightMode::analytic);
  const auto a = cauchy_residual(p, TestFunction::trig(2.0), norms);
  const auto b = cauchy_residual(p, TestFunction::trig(2.0), c);
  EXPECT_EQ(a.loop_integral, b.loop_integral);
}

TEST(UniformGap, RejectsInadmissibleBeta) {
  const std::vector<cplx> betas{cplx(1.0, 0.4)};
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{8, 16}};
  EXPECT_THROW(uniform_cauchy_gap(fourier(), TestFunction::one(), betas, pairs, 1.5, 10, SeedPlan{1}, 1, {10, 8.0}),
               ParameterError);
}

TEST(UniformGap, ZeroForEqualLevels) {
  const std::vector<cplx> betas{cplx(0.8, 0.1), cplx(1.0, -0.1)};
  const std::vector<std::pair<std::size_t, std::size_t>> pairs{{16, 16}, {8, 32}};
  const auto rows = uniform_cauchy_gap(fourier(), TestFunction::one(), betas, pairs, 1.5, 20, SeedPlan{1}, 4, {10, 8.0});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].sup_moment, 0.0);
  EXPECT_GT(rows[1].sup_moment, 0.0);
}
