#include <gtest/gtest.h>

#include <random>

#include "hessq/fit.hpp"
#include "hessq/perron.hpp"
#include "hessq/sampling.hpp"
#include "support.hpp"

using namespace hessq;

namespace {

AdmissiblePair iso3() { return classify(Spectrum(std::vector<double>{3, 3, 3}), 3, 2); }

AdmissiblePair aniso() {
  return classify(normalize_to_class(Spectrum(std::vector<double>{2.5, 3.2, 3.3566}), 3, 2).scaled, 3, 2);
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double t : v) x[i++] = t;
  return x;
}

ConvexDomain unit_ball() { return ConvexDomain::ball(Eigen::VectorXd::Zero(3), 1.0); }

}  // namespace

TEST(Domain, EllipsoidGeometry) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(3, 3);
  Q.diagonal() << 1, 4, 0.25;
  const auto D = ConvexDomain::ellipsoid(vec({0.1, 0, 0}), Q);
  EXPECT_TRUE(D.contains(vec({0.1, 0.3, 1.5})));
  EXPECT_FALSE(D.contains(vec({0.1, 0.6, 0})));
  EXPECT_NEAR(D.bounding_radius(), 2.0, 1e-14);
  for (const auto& x : D.boundary_samples(200, 3)) {
    EXPECT_NEAR(D.level(x), 0.0, 1e-12);
    const Eigen::VectorXd nu = D.outward_normal(x);
    EXPECT_NEAR(nu.norm(), 1.0, 1e-14);
    EXPECT_FALSE(D.contains(x + 1e-6 * nu));
    EXPECT_TRUE(D.contains(x - 1e-6 * nu));
  }
  EXPECT_THROW(ConvexDomain::ellipsoid(vec({0, 0}), Eigen::MatrixXd::Identity(3, 3)), argument_error);
  EXPECT_THROW(ConvexDomain::ball(vec({0, 0}), -1), argument_error);
}

TEST(Domain, LevelSetMatchesEllipsoid) {
  const auto F = [](const Eigen::VectorXd& x) { return x.squaredNorm() - 4.0; };
  const auto G = [](const Eigen::VectorXd& x) { return Eigen::VectorXd(2 * x); };
  const auto D = ConvexDomain::level_set(F, G, Eigen::VectorXd::Zero(3), 5.0);
  for (const auto& x : D.boundary_samples(50, 1)) EXPECT_NEAR(x.norm(), 2.0, 1e-12);
  EXPECT_THROW(ConvexDomain::level_set(F, G, vec({3, 0, 0}), 5.0), argument_error);
}

TEST(Domain, EllipsoidDomainIsLevelSetOfQuadratic) {
  const auto pair = aniso();
  const EllipsoidDomain E(pair, 2.5);
  for (const auto& x : E.boundary_samples(100, 2)) EXPECT_NEAR(quadratic_level(pair, x), 2.5, 1e-12);
  EXPECT_THROW(EllipsoidDomain(pair, 0.0), argument_error);
}

TEST(Barrier, UnitBallZeroData) {
  // On the unit sphere w(x) = (3 - t)(1 - xi.x), so the first working t is 4.
  const auto D = unit_ball();
  const auto phi = QuadraticData::constant(3, 0.0);
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(3, 3.0);
  const auto boundary = D.boundary_samples(2000, 5);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 10; ++i) {
    const Eigen::VectorXd xi = random_unit_vector(3, rng);
    const auto b = make_barrier(xi, phi, a, D, boundary);
    EXPECT_EQ(b.t, 4.0);
    EXPECT_EQ(b(xi), 0.0);
    EXPECT_NEAR(b(-xi), -2.0, 1e-13);
    EXPECT_GT(b.margin, 0);
    EXPECT_NEAR((b.x_bar - xi * (1 - 4.0 / 3.0)).norm(), 0.0, 1e-14);
    EXPECT_NEAR(b.minimum(), -8.0 / 3.0, 1e-13);
  }
}

TEST(Barrier, DegenerateQuadraticData) {
  // phi = x^T A x / 2 touches every w with x_bar = 0; the search must go past it.
  const auto D = unit_ball();
  const QuadraticData phi(Eigen::MatrixXd::Identity(3, 3) * 3, Eigen::VectorXd::Zero(3), 0.0);
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(3, 3.0);
  const auto boundary = D.boundary_samples(1000, 6);
  const Eigen::VectorXd xi = vec({0, 0, 1});
  const auto b = make_barrier(xi, phi, a, D, boundary);
  EXPECT_GT(b.t, 0);
  EXPECT_GT(b.margin, 0);
  EXPECT_DOUBLE_EQ(b(xi), phi(xi));
  for (const auto& x : boundary)
    if ((x - xi).norm() > 1e-3) {
      EXPECT_LT(b(x), phi(x));
    }
}

TEST(Barrier, TouchesDataOnEllipsoid) {
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(3, 3);
  Q.diagonal() << 1, 2, 0.5;
  const auto D = ConvexDomain::ellipsoid(Eigen::VectorXd::Zero(3), Q);
  const QuadraticData phi(Eigen::MatrixXd::Identity(3, 3) * 0.5, vec({0.2, -0.1, 0.3}), 1.0);
  const auto pair = aniso();
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(pair.a().data(), 3);
  const auto boundary = D.boundary_samples(1500, 7);
  for (std::size_t i = 0; i < 20; ++i) {
    const auto b = make_barrier(boundary[i * 7], phi, a, D, boundary);
    EXPECT_NEAR(b(b.xi), phi(b.xi), 1e-13 * (1 + std::abs(phi(b.xi))));
    EXPECT_GT(b.margin, 0);
  }
  BarrierOptions tight;
  tight.t_max = 0.5;
  EXPECT_THROW(make_barrier(boundary[0], phi, a, D, boundary, tight), numeric_error);
}

TEST(Barrier, EnvelopeEqualsDataAtContactPoints) {
  const auto D = unit_ball();
  const QuadraticData phi(Eigen::MatrixXd::Zero(3, 3), vec({1, 0, -0.5}), 0.0);
  const Eigen::VectorXd a = Eigen::VectorXd::Constant(3, 3.0);
  auto boundary = D.boundary_samples(1000, 8);
  std::vector<Barrier> bs;
  for (std::size_t i = 0; i < 30; ++i) bs.push_back(make_barrier(boundary[i], phi, a, D, boundary));
  EXPECT_EQ(lower_envelope({bs[3]}, vec({2, 0, 0})).value, bs[3](vec({2, 0, 0})));
  for (std::size_t i = 0; i < 30; ++i) {
    const auto e = lower_envelope(bs, boundary[i]);
    EXPECT_NEAR(e.value, phi(boundary[i]), 1e-12);
    EXPECT_EQ(e.index, i);
  }
  EXPECT_THROW(lower_envelope({}, vec({0, 0, 0})), argument_error);
  // each piece has Hessian A, an exact solution.
  EXPECT_NEAR(hessian_quotient(Eigen::MatrixXd(a.asDiagonal()), 3, 2), 1.0, 1e-14);
}

TEST(Sandwich, IsotropicUnitBall) {
  const auto pair = iso3();
  const auto D = unit_ball();
  const auto phi = QuadraticData::constant(3, 0.0);
  const double cs = measure_threshold(pair, D, phi);
  const auto sw = build_sandwich(pair, D, phi, cs + 1);
  EXPECT_NEAR(sw.c_star, cs, 1e-12 * (1 + std::abs(cs)));
  EXPECT_NEAR(sw.beta, -8.0 / 3.0, 1e-12);
  EXPECT_NEAR(sw.s_bar, 1.1 * 1.5, 1e-12);
  EXPECT_GE(sw.alpha_c, sw.alpha_hat);
  const auto rep = verify_sandwich(sw, 4000, 11);
  EXPECT_GE(rep.min_margin(), 0);
  EXPECT_LE(rep.boundary_error, 1e-9);
  EXPECT_NEAR(rep.far_field_rate, rep.predicted_rate, 0.05);
  EXPECT_NEAR(rep.predicted_rate, -1.0, 1e-12);
}

TEST(Sandwich, AnisotropicEllipsoidWithData) {
  const auto pair = aniso();
  ASSERT_EQ(pair.case_tag, AsymptoticCase::Case1);
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(3, 3);
  Q.diagonal() << 1.5, 1, 2;
  const auto D = ConvexDomain::ellipsoid(vec({0.1, 0, -0.1}), Q);
  const QuadraticData phi(Eigen::MatrixXd::Identity(3, 3), vec({0.3, 0, 0}), 0.5);
  SandwichOptions opt;
  opt.seed = 3;
  const double cs = measure_threshold(pair, D, phi, opt);
  const auto sw = build_sandwich(pair, D, phi, cs + 2, opt);
  const auto rep = verify_sandwich(sw, 4000, 12);
  EXPECT_GE(rep.min_margin(), 0);
  EXPECT_LE(rep.boundary_error, 1e-9);
  EXPECT_NEAR(rep.far_field_rate, 2 - 1 / pair.gap(), 0.05);
}

TEST(Sandwich, ThresholdAndCaseErrors) {
  const auto pair = iso3();
  const auto D = unit_ball();
  const auto phi = QuadraticData::constant(3, 0.0);
  const double cs = measure_threshold(pair, D, phi);
  try {
    build_sandwich(pair, D, phi, cs - 0.5);
    FAIL() << "expected threshold_error";
  } catch (const threshold_error& e) {
    EXPECT_NEAR(e.threshold(), cs, 1e-12 * (1 + std::abs(cs)));
  }
  const auto c3 = classify(ExactSpectrum(std::vector<Rational>{2, 4, 4}), 3, 2);
  EXPECT_THROW(build_sandwich(c3, D, phi, 100), unsupported_case_error);
  EXPECT_THROW(measure_threshold(c3, D, phi), unsupported_case_error);
  const auto off = ConvexDomain::ball(vec({5, 0, 0}), 1.0);
  EXPECT_THROW(build_sandwich(pair, off, phi, 100), argument_error);
}

TEST(Sandwich, ThresholdAgainstSeamLevel) {
  // Moving s_hat away from s_bar first lowers the measured threshold.
  const auto pair = iso3();
  const auto D = unit_ball();
  const auto phi = QuadraticData::constant(3, 0.0);
  SandwichOptions near, far;
  near.s_hat_factor = 1.2;
  far.s_hat_factor = 2.0;
  EXPECT_GE(measure_threshold(pair, D, phi, near), measure_threshold(pair, D, phi, far));
}

TEST(Harmonic, ConstantDataIsConstant) {
  const auto pair = iso3();
  const auto D = unit_ball();
  const double s_bar = 1.65, c = 2.0;
  const auto hb = harmonic_upper_barrier(pair, D, s_bar, QuadraticData::constant(3, s_bar + c), c, 12);
  EXPECT_TRUE(hb.max_principle);
  for (Eigen::Index i = 0; i < hb.values.size(); ++i) EXPECT_NEAR(hb.values[i], s_bar + c, 1e-10);
}

TEST(Harmonic, AboveSandwichSubsolution) {
  const auto pair = iso3();
  const auto D = unit_ball();
  const auto phi = QuadraticData::constant(3, 0.0);
  const auto sw = build_sandwich(pair, D, phi, measure_threshold(pair, D, phi) + 1);
  const auto hb = harmonic_upper_barrier(pair, D, sw.s_bar, phi, sw.c, 14);
  EXPECT_TRUE(hb.max_principle);
  EXPECT_GE(hb.boundary_max, sw.s_bar + sw.c - 1e-12);
  for (std::size_t i = 0; i < hb.nodes.size(); ++i) {
    EXPECT_LE(sw.underline_u(hb.nodes[i]), hb.values[static_cast<Eigen::Index>(i)] + 1e-9);
  }
  EXPECT_THROW(harmonic_upper_barrier(pair, D, sw.s_bar, phi, sw.c, 2), argument_error);
}

TEST(Isotropic, ExteriorSolveIsExact) {
  const auto sol = solve_isotropic_exterior(3, 3, 2, 1.0, 0.5, 3.0);
  EXPECT_NEAR(sol.profile.omega(1.0), 0.5, 1e-14);
  EXPECT_NEAR(mu(sol.profile).mu, 3.0, 1e-8);
  std::vector<Eigen::VectorXd> pts;
  for (const auto& x : annulus_samples(sol.pair.a(), 1.0, 1e6, 1000, 4)) pts.push_back(x);
  EXPECT_LE(plug_back_residual(sol.profile, pts), 1e-8);
  // omega - s - c ~ |x|^{2-n}.
  std::vector<double> r, g;
  for (double s : geometric_samples(1e2, 1e6, 30)) {
    r.push_back(std::sqrt(2 * s / 3.0));
    g.push_back(3.0 - sol.profile.omega_minus_linear(s));
  }
  EXPECT_NEAR(fit_log_log(r, g).slope, -1.0, 0.05);
  EXPECT_THROW(solve_isotropic_exterior(3, 3, 2, 1.0, 0.5, -1.0), threshold_error);
  EXPECT_THROW(solve_isotropic_exterior(2, 1, 0, 1.0, 0.5, 3.0), unsupported_case_error);
}

TEST(Isotropic, PoissonRadialForm) {
  // A = I/3: omega = beta + s - s_bar + 2 alpha (s_bar^{-1/2} - s^{-1/2}), and in |x| the
  // decaying term is -2 alpha (2n)^{(n-2)/2} / (n-2) |x|^{2-n} = -2 sqrt(6) alpha / |x|.
  const int n = 3;
  const auto sol = solve_isotropic_exterior(n, 1, 0, 0.5, 0.0, 1.0);
  const double alpha = sol.alpha;
  EXPECT_NEAR(alpha, (1.0 + 0.5) * std::sqrt(0.5) / 2, 1e-9);
  for (double r : {2.0, 10.0, 300.0}) {
    const double s = r * r / (2 * n);
    const double closed = 1.0 + s - 2 * std::sqrt(6.0) * alpha / r;
    EXPECT_NEAR(sol.profile.omega(s), closed, 1e-9 * (1 + s));
  }
  std::vector<Eigen::VectorXd> pts = shell_samples(3, 2.0, 50.0, 200, 3);
  EXPECT_LE(plug_back_residual(sol.profile, pts), 1e-12);
}

TEST(Comparison, Spotchecks) {
  const auto pair = iso3();
  const auto sol = solve_isotropic_exterior(3, 3, 2, 1.0, 0.0, 2.0);
  const auto sub = [&](const Eigen::VectorXd& x) { return sol.profile.omega(quadratic_level(pair, x)); };
  const auto super = [&](const Eigen::VectorXd& x) { return quadratic_level(pair, x) + 2.0; };
  const auto interior = annulus_samples(pair.a(), 1.0, 1e4, 500, 2);
  const auto boundary = EllipsoidDomain(pair, 1.0).boundary_samples(100, 3);
  const auto rep = comparison_spotcheck(sub, super, interior, boundary);
  EXPECT_TRUE(rep.passed());
  EXPECT_LE(rep.max_violation, 0);

  const auto same = comparison_spotcheck(super, super, interior, boundary);
  EXPECT_TRUE(same.passed());
  EXPECT_EQ(same.max_violation, 0);

  const auto raised = [&](const Eigen::VectorXd& x) { return super(x) + (x.norm() > 5 ? 1.0 : 0.0); };
  const auto bad = comparison_spotcheck(raised, super, interior, boundary);
  EXPECT_FALSE(bad.passed());
  EXPECT_FALSE(bad.violations.empty());
  for (const auto& x : bad.violations) EXPECT_GT(x.norm(), 5);
}
