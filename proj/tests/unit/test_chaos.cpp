#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "chaoslab/chaos.hpp"
#include "chaoslab/errors.hpp"
#include "chaoslab/mc_runtime.hpp"

using namespace chaoslab;
using cplx = std::complex<double>;

namespace {

std::shared_ptr<const FieldModel> fourier(CoefficientLaw law = CoefficientLaw::rademacher()) {
  return std::make_shared<const FieldModel>(FourierModel{law});
}

}  // namespace

TEST(Path, ExtendToSameLevelIsIdentity) {
  const PathState p0(fourier(), {10, 8.0}, PathKey{1, 0, 0});
  const auto p1 = extend_path(p0, 5);
  const auto p2 = extend_path(p1, 5);
  EXPECT_EQ(p2.level(), 5u);
  ASSERT_EQ(p1.field().size(), p2.field().size());
  for (std::size_t i = 0; i < p1.field().size(); ++i) EXPECT_EQ(p1.field()[i], p2.field()[i]);
}

TEST(Path, FirstLevelIsTheWave) {
  const PathState p0(fourier(), {8, 8.0}, PathKey{3, 0, 0});
  const auto p1 = extend_path(p0, 1);
  const auto d = p1.draws()[0].draw;
  const auto x = p1.points();
  for (std::size_t i = 0; i < x.size(); ++i)
    EXPECT_NEAR(p1.field()[i], d.first * std::cos(2 * std::numbers::pi * x[i]) + d.second * std::sin(2 * std::numbers::pi * x[i]),
                1e-14);
}

TEST(Path, SplitExtensionIsBitwiseIdentical) {
  for (auto model : {fourier(),
                     std::make_shared<const FieldModel>(
                         DilatedModel{StationaryBase::gaussian_stationary(), build_schedule(ScheduleFamily::harmonic, 128)}),
                     std::make_shared<const FieldModel>(
                         DilatedModel{StationaryBase::cosine_process(), build_schedule(ScheduleFamily::harmonic, 128)})}) {
    const PathState p0(model, {11, 8.0}, PathKey{11, 4, 0});
    const auto one = extend_path(p0, 90);
    const auto two = extend_path(extend_path(extend_path(p0, 17), 40), 90);
    for (std::size_t i = 0; i < one.field().size(); ++i) ASSERT_EQ(one.field()[i], two.field()[i]) << model->name();
    const auto re = one.recompute_field();
    for (std::size_t i = 0; i < re.size(); ++i) ASSERT_EQ(re[i], one.field()[i]) << model->name();
    for (std::size_t j = 0; j <= one.last_block(); ++j) {
      ASSERT_TRUE(two.has_block(j));
      for (std::size_t i = 0; i < one.field().size(); ++i) ASSERT_EQ(one.block(j)[i], two.block(j)[i]);
    }
  }
}

TEST(Path, BlockSnapshotsMatchPartialSums) {
  const PathState p0(fourier(), {11, 8.0}, PathKey{5, 0, 0});
  const auto p = extend_path(p0, 200);
  const auto& table = *p.blocks();
  for (std::size_t j = 0; j <= p.last_block(); ++j) {
    const auto direct = extend_path(p0, table.t(j) - 1);
    for (std::size_t i = 0; i < direct.field().size(); ++i) ASSERT_EQ(direct.field()[i], p.block(j)[i]);
  }
}

TEST(Path, ResolutionIsEnforced) {
  const PathState p0(fourier(), {8, 8.0}, PathKey{});
  EXPECT_EQ(p0.resolvable_level(), 32u);
  EXPECT_THROW(extend_path(p0, 33), ResolutionError);
  EXPECT_THROW((PathState(fourier(), {8, 4.0}, PathKey{})), ParameterError);
}

TEST(Weight, TrivialCases) {
  const PathState p0(fourier(), {9, 8.0}, PathKey{2, 0, 0});
  for (const auto& w : weight_field(p0, cplx(1.3, 0.2))) EXPECT_EQ(w, cplx(1.0));
  const auto p = extend_path(p0, 40);
  for (const auto& w : weight_field(p, 0.0)) EXPECT_EQ(w, cplx(1.0));
  EXPECT_EQ(integrate(p, 0.0, TestFunction::one()).value, cplx(1.0));
  const auto f = TestFunction::poly({1.0, -2.0, cplx(0.0, 3.0)});
  const auto fv = f.evaluate(p.points());
  cplx q{};
  for (const auto& v : fv) q += v;
  q /= static_cast<double>(fv.size());
  EXPECT_LT(std::abs(integrate(p0, cplx(0.7, 0.1), f).value - q), 1e-15);
}

TEST(Weight, GaussianNormalizerProduct) {
  const auto model = fourier(CoefficientLaw::gaussian());
  const PathState p0(model, {10, 8.0}, PathKey{});
  const cplx beta(1.1, 0.2);
  const LogNormalizer norm(*model, p0.points(), beta, {64});
  double h = 0.0;
  for (int k = 1; k <= 64; ++k) h += 1.0 / k;
  const cplx want = std::exp(beta * beta * h / 2.0);
  for (const auto& l : norm.at(64)) EXPECT_LT(std::abs(std::exp(l) - want), 1e-10 * std::abs(want));
}

TEST(Weight, VanishingNormalizerNamesPoint) {
  const PathState p0(fourier(), {6, 8.0}, PathKey{});
  const auto p = extend_path(p0, 1);
  try {
    weight_field(p, cplx(0.0, std::numbers::pi / 2));
    FAIL() << "expected VanishingNormalizerError";
  } catch (const VanishingNormalizerError& e) {
    EXPECT_NE(std::string(e.what()).find("x = 0"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("level k = 1"), std::string::npos) << e.what();
  }
}

TEST(Integrate, ConjugationAndLinearity) {
  const PathState p = extend_path(PathState(fourier(), {10, 8.0}, PathKey{8, 0, 0}), 100);
  const cplx beta(0.9, 0.25);
  const auto f1 = TestFunction::trig(3.0, 0.4);
  const auto f2 = cplx(0.0, 2.0) * TestFunction::poly({0.5, 1.0}) + TestFunction::dyadic(2, 1);
  const cplx a = integrate(p, std::conj(beta), f2.conj()).value;
  const cplx b = std::conj(integrate(p, beta, f2).value);
  EXPECT_LT(std::abs(a - b), 1e-13 * std::abs(b));
  const cplx c(0.3, -1.2);
  const cplx lhs = integrate(p, beta, f1 + c * f2).value;
  const cplx rhs = integrate(p, beta, f1).value + c * integrate(p, beta, f2).value;
  EXPECT_LT(std::abs(lhs - rhs), 1e-12 * std::abs(rhs));
}

TEST(Integrate, RealBetaGivesRealPositiveMass) {
  const auto traj = mass_trajectory(fourier(), {10, 8.0}, 1.0, std::vector<std::size_t>{0, 4, 16, 64}, PathKey{4, 0, 0});
  EXPECT_EQ(traj[0].second, cplx(1.0));
  for (const auto& [lvl, m] : traj) {
    EXPECT_GT(m.real(), 0.0);
    EXPECT_EQ(m.imag(), 0.0);
  }
}

TEST(Integrate, UnitMeanMonteCarlo) {
  const auto model = fourier();
  const QuadratureSpec quad{10, 8.0};
  const PathState root(model, quad, PathKey{});
  const LogNormalizer norm(*model, root.points(), 1.0, {64});
  const std::vector<std::size_t> lv{64};
  SummaryStats s;
  for (std::uint32_t r = 0; r < 1000; ++r)
    s.add(mass_trajectory(model, quad, 1.0, lv, PathKey{2024, r, 0}, &norm)[0].second.real());
  EXPECT_NEAR(s.mean(), 1.0, 4.0 * s.stderr_mean());
}

TEST(Martingale, ExactEnumeration) {
  const PathState p0(fourier(), {10, 8.0}, PathKey{1, 0, 0});
  EXPECT_LT(std::abs(martingale_residual_exact(p0, 1.0, TestFunction::one()).residual), 1e-12);
  const auto p = extend_path(p0, 12);
  for (cplx beta : {cplx(0.5), cplx(1.3), cplx(1.0, 0.2)}) {
    const auto r = martingale_residual_exact(p, beta, TestFunction::trig(2.0) + TestFunction::one());
    EXPECT_LT(std::abs(r.residual), 1e-12 * std::abs(r.base));
  }
  EXPECT_EQ(martingale_residual_exact(p, 0.0, TestFunction::one()).residual, cplx(0.0));
  const PathState g(fourier(CoefficientLaw::gaussian()), {10, 8.0}, PathKey{});
  EXPECT_THROW(martingale_residual_exact(g, 1.0, TestFunction::one()), UnsupportedModeError);
}

TEST(Martingale, MonteCarloGaussian) {
  const auto p = extend_path(PathState(fourier(CoefficientLaw::gaussian()), {9, 8.0}, PathKey{6, 0, 0}), 8);
  const auto r = martingale_residual_mc(p, 1.0, TestFunction::one(), 20000);
  EXPECT_LE(std::abs(r.residual), 4.0 * r.stderr_est);
}

TEST(TestFunctionTest, Evaluation) {
  EXPECT_EQ(TestFunction::dyadic(2, 1)(0.25), cplx(1.0));
  EXPECT_EQ(TestFunction::dyadic(2, 1)(0.5), cplx(0.0));
  EXPECT_NEAR(TestFunction::poly({1.0, 2.0, 3.0})(0.5).real(), 2.75, 1e-15);
  EXPECT_NEAR(TestFunction::trig(1.0)(0.25).real(), 0.0, 1e-15);
  EXPECT_THROW(TestFunction::dyadic(2, 4), ParameterError);
}
