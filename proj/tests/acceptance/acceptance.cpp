// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "hessq/admissibility.hpp"
#include "hessq/fit.hpp"
#include "hessq/legendre.hpp"
#include "hessq/perron.hpp"
#include "hessq/sampling.hpp"
#include "hessq/subsolution.hpp"
#include "hessq/symfunc.hpp"
#include "support.hpp"

using namespace hessq;
namespace ht = hessq::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  double time_limit = 0;  // seconds, 0 for none

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + std::string("violated: ") + what;
    }
  }
  void note(const std::string& s) { detail += (detail.empty() ? "" : "; ") + s; }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

double rel(double got, double ref) { return std::abs(got - ref) / std::max(1e-300, std::abs(ref)); }

AdmissiblePair exact_pair(std::vector<Rational> a, int k, int l) { return classify(ExactSpectrum(std::move(a)), k, l); }

// 1 -------------------------------------------------------------------------
Outcome worked_examples() {
  Outcome o;
  o.time_limit = 1;
  const ExactSpectrum a3(std::vector<Rational>{2, 4, 4});
  const auto r3 = extremal_ratios(a3, 3, 2);
  const auto p3 = classify(a3, 3, 2);
  o.require(sigma(3, a3) == Rational(32) && sigma(2, a3) == Rational(32), "sigma_3 = sigma_2 = 32 for diag(2,4,4)");
  o.require(r3.H == Rational(1) && r3.h == Rational(1, 2), "H_3 = 1, h_2 = 1/2");
  o.require(p3.case_tag == AsymptoticCase::Case3 && p3.exact, "diag(2,4,4) is Case3 (exact)");
  o.require(std::abs(p3.sigma_value - 32) <= 1e-12 * 32 && std::abs(p3.H - 1) <= 1e-12 &&
                std::abs(p3.h - 0.5) <= 1e-12,
            "floating record of diag(2,4,4)");

  const ExactSpectrum a4(std::vector<Rational>{Rational(5, 3), 5, 5});
  const auto r4 = extremal_ratios(a4, 3, 2);
  const auto p4 = classify(a4, 3, 2);
  o.require(sigma(3, a4) == Rational(125, 3) && sigma(2, a4) == Rational(125, 3), "sigma = 125/3 for diag(5/3,5,5)");
  o.require(r4.H - r4.h == Rational(3, 5), "H - h = 3/5");
  o.require(p4.case_tag == AsymptoticCase::Case4, "diag(5/3,5,5) is Case4");

  const double cs = c_star(2, 2, 1);
  o.require(std::abs(cs - 2) <= 1e-12, "c*(2,1) = 2 at n = 2");
  const auto red = reduce_n2(Eigen::Matrix2d::Identity() * 2);
  o.require(red.residual <= 1e-12, "det(diag(2,2) - I) = 1");
  o.note("c*(2,1)=" + fmt(cs) + " det(A-I)=" + fmt(red.det_A_minus_I));
  return o;
}

// 2 -------------------------------------------------------------------------
Outcome symmetric_identities() {
  Outcome o;
  o.time_limit = 10;
  std::mt19937_64 rng(20261014);
  double worst_pivot = 0, worst_euler = 0, worst_ineq = 0, worst_brute = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 8) ;
    const auto a = ht::random_positive(std::max(n, 1), rng);
    const int nn = static_cast<int>(a.size());
    const auto all = sigma_all(std::span<const double>(a));
    for (int k = 0; k <= nn; ++k) {
      const long double ref = ht::brute_sigma(k, a);
      worst_brute = std::max(worst_brute, rel(all[static_cast<std::size_t>(k)], static_cast<double>(ref)));
    }
    for (int k = 1; k <= nn; ++k) {
      const double sk = all[static_cast<std::size_t>(k)];
      double euler = 0;
      for (int i = 0; i < nn; ++i) {
        const std::size_t ex[] = {static_cast<std::size_t>(i)};
        const double ai = a[static_cast<std::size_t>(i)];
        const double km1 = sigma_restricted<double>(k - 1, a, ex);
        worst_pivot = std::max(worst_pivot, rel(sigma_restricted<double>(k, a, ex) + ai * km1, sk));
        euler += ai * km1;
        for (int l = 0; l < k; ++l) {
          const double lhs = all[static_cast<std::size_t>(l)] * km1;
          const double rhs = sigma_restricted<double>(l - 1, a, ex) * sk;
          if (rhs > 0) worst_ineq = std::max(worst_ineq, (rhs - lhs) / rhs);
        }
      }
      worst_euler = std::max(worst_euler, rel(euler, k * sk));
    }
  }
  o.require(worst_pivot <= 1e-12, "pivot identity");
  o.require(worst_euler <= 1e-12, "Euler identity");
  o.require(worst_ineq <= 1e-12, "quotient inequality");
  o.require(worst_brute <= 1e-13, "brute-force subset oracle");
  o.note("10^4 spectra; max rel pivot=" + fmt(worst_pivot) + " euler=" + fmt(worst_euler) +
         " ineq deficit=" + fmt(worst_ineq) + " brute=" + fmt(worst_brute));
  return o;
}

// 3 -------------------------------------------------------------------------
Outcome first_integral_residual() {
  Outcome o;
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> la(std::log(1e-3), std::log(1e3)), ls(std::log(1e-4), std::log(1e8));
  double worst = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 6);
    const int k = 1 + static_cast<int>(rng() % n);
    const int l = static_cast<int>(rng() % k);
    const auto pair = ht::random_pair(n, k, l, rng);
    const double alpha = std::exp(la(rng)), s = std::exp(ls(rng));
    const GSymProfile prof(pair, alpha, 0.0, 1.0);
    const double R = prof.rhs(s);
    worst = std::max(worst, prof.first_integral_residual(prof.solve_v(s), s) / (1 + R));
  }
  const auto c2 = exact_pair({1, 1}, 2, 0);
  double worst2 = 0;
  for (double alpha : {1e-3, 0.1, 1.0, 3.0, 50.0, 1e3})
    for (double s : {1e-4, 1e-2, 0.5, 1.0, 7.0, 1e3, 1e8}) {
      worst2 = std::max(worst2, rel(GSymProfile(c2, alpha, 0, 1).solve_v(s), std::sqrt(1 + alpha / s)));
    }
  o.require(worst <= 1e-13, "residual <= 1e-13 (1 + alpha s^-H)");
  o.require(worst2 <= 1e-12, "Case2 closed form sqrt(1 + alpha/s)");
  o.note("10^4 draws; max scaled residual=" + fmt(worst) + " Case2 max rel=" + fmt(worst2));
  return o;
}

// 4 -------------------------------------------------------------------------
Outcome gsym_oracle_equivalence() {
  Outcome o;
  std::mt19937_64 rng(404);
  double worst = 0;
  int shapes = 0;
  for (int n = 2; n <= 4; ++n)
    for (int k = 1; k <= n; ++k)
      for (int l = 0; l < k; ++l) {
        ++shapes;
        const auto pair = ht::random_pair(n, k, l, rng, 5.0);
        const double alpha = 1.0 + static_cast<double>(rng() % 100) / 50.0;
        const GSymProfile prof(pair, alpha, 0.0, 1.0);
        for (const auto& x : annulus_samples(pair.a(), 0.05, 50.0, 1000, rng())) {
          const double s = quadratic_level(pair, x);
          const auto lam = symmetric_eigenvalues(ht::fd_hessian(pair, alpha, x));
          const double v = prof.solve_v(s), vp = prof.v_prime(s);
          for (int m = 1; m <= n; ++m) {
            const double fd = sigma(m, lam);
            const double scale = std::max(std::abs(fd), sigma(m, pair.a()) * std::pow(v, m));
            worst = std::max(worst, std::abs(gsym_sigma(pair, v, vp, x, m) - fd) / scale);
          }
        }
      }
  o.require(worst <= 1e-6, "gsym_sigma vs finite-difference Hessian eigenvalues");
  o.note(std::to_string(shapes) + " (n,k,l) shapes x 10^3 points; max rel err=" + fmt(worst));
  return o;
}

// 5 -------------------------------------------------------------------------
Outcome subsolution_certification() {
  Outcome o;
  o.time_limit = 60;
  struct Item {
    const char* name;
    AdmissiblePair pair;
    double alpha;
  };
  const Item items[] = {
      {"Case1 3I", classify(Spectrum(std::vector<double>{3, 3, 3}), 3, 2), 2.0},
      {"Case1 aniso(4,2)", classify(normalize_to_class(Spectrum(std::vector<double>{1, 2, 3, 5}), 4, 2).scaled, 4, 2), 1.0},
      {"Case2 I", exact_pair({1, 1}, 2, 0), 3.0},
      {"Case3 diag(2,4,4)", exact_pair({2, 4, 4}, 3, 2), 1.0},
      {"Case4 diag(5/3,5,5)", exact_pair({Rational(5, 3), 5, 5}, 3, 2), 1.0},
  };
  AsymptoticCase seen[] = {AsymptoticCase::Case1, AsymptoticCase::Case2, AsymptoticCase::Case3, AsymptoticCase::Case4};
  bool covered[4] = {false, false, false, false};
  for (const auto& it : items) {
    const GSymProfile prof(it.pair, it.alpha, 0.0, 1.0);
    const auto grid = annulus_samples(it.pair.a(), 1.0, 1e4, 10000, 505);
    const auto rep = verify_subsolution(prof, grid);
    const double tol = 1e-8 * sigma(it.pair.k, it.pair.a());
    o.require(rep.min_convexity_margin >= -tol, std::string(it.name) + " k-convexity");
    o.require(rep.min_quotient_margin >= -tol, std::string(it.name) + " S_{k,l} - 1");
    for (int c = 0; c < 4; ++c) covered[c] |= it.pair.case_tag == seen[c];
    o.note(std::string(it.name) + ": min sigma_m=" + fmt(rep.min_convexity_margin) +
           " min S-1=" + fmt(rep.min_quotient_margin));
  }
  o.require(covered[0] && covered[1] && covered[2] && covered[3], "all four cases present");
  return o;
}

// 6 -------------------------------------------------------------------------
Outcome asymptotic_rates() {
  Outcome o;
  const auto s = geometric_samples(1e3, 1e7, 40);
  const auto iso = classify(Spectrum(std::vector<double>{3, 3, 3}), 3, 2);
  const auto f1 = fit_asymptotics(GSymProfile(iso, 2.0, 0.0, 1.0), s);
  o.require(std::abs(f1.remainder_exponent - (1 - iso.script_H)) <= 0.05, "Case1 remainder slope 1 - H");
  std::mt19937_64 rng(606);
  const auto an = ht::random_pair(4, 3, 1, rng, 4.0);
  const auto f1b = fit_asymptotics(GSymProfile(an, 1.0, 0.0, 1.0), s);
  o.require(std::abs(f1b.remainder_exponent - (1 - an.script_H)) <= 0.05, "Case1 (anisotropic) remainder slope");

  const double alpha3 = 1.5;
  const auto f3 = fit_asymptotics(GSymProfile(exact_pair({2, 4, 4}, 3, 2), alpha3, 0.0, 1.0), s);
  o.require(f3.log_coefficient && std::abs(*f3.log_coefficient - alpha3) <= 0.01 * alpha3, "Case3 log coefficient");

  const auto c4 = exact_pair({Rational(5, 3), 5, 5}, 3, 2);
  const auto f4 = fit_asymptotics(GSymProfile(c4, 1.0, 0.0, 1.0), s);
  const double e4 = 1 - 1 / (2 * c4.gap());
  o.require(f4.power_exponent && std::abs(*f4.power_exponent - e4) <= 0.02, "Case4 power exponent");
  o.require(std::abs(e4 - 1.0 / 6.0) <= 1e-12, "Case4 exponent is 1/6");

  // Poisson: A = I/3, omega = beta + s - s_bar + 2 alpha (s_bar^{-1/2} - s^{-1/2}).
  const auto poi = classify(Spectrum(std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3}), 1, 0);
  double worst_p = 0;
  for (double alpha : {0.5, 2.0})
    for (double sb : {0.5, 2.0}) {
      const double beta = 0.25;
      const GSymProfile prof(poi, alpha, beta, sb);
      worst_p = std::max(worst_p, std::abs(mu(prof).mu - (beta - sb + 2 * alpha / std::sqrt(sb))));
      for (double t : {sb, 3.0, 40.0, 1e4, 1e7}) {
        const double ref = beta + t - sb + 2 * alpha * (1 / std::sqrt(sb) - 1 / std::sqrt(t));
        worst_p = std::max(worst_p, std::abs(prof.omega(t) - ref) / (1 + std::abs(ref)));
      }
    }
  o.require(worst_p <= 1e-9, "Poisson closed form");
  o.note("Case1 slope=" + fmt(f1.remainder_exponent) + " (pred " + fmt(1 - iso.script_H) + "), aniso " +
         fmt(f1b.remainder_exponent) + " (pred " + fmt(1 - an.script_H) + "); Case3 log coef=" +
         fmt(f3.log_coefficient.value_or(NAN)) + " (alpha " + fmt(alpha3) + "); Case4 exponent=" +
         fmt(f4.power_exponent.value_or(NAN)) + " (pred " + fmt(e4) + "); Poisson err=" + fmt(worst_p));
  return o;
}

// 7 -------------------------------------------------------------------------
Outcome rigidity() {
  Outcome o;
  std::mt19937_64 rng(707);
  int obstructed = 0, tested = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    const int k = 2 + static_cast<int>(rng() % (n - 1));
    const int l = 1 + static_cast<int>(rng() % (k - 1));
    const auto pair = ht::random_pair(n, k, l, rng, 4.0);
    ++tested;
    if (rigidity_report(pair).verdict() == "obstructed") ++obstructed;
  }
  o.require(obstructed == tested, "non-isotropic, 1 <= l < k: obstructed");
  int iso_ok = 0, iso_total = 0;
  for (int n = 2; n <= 6; ++n)
    for (int k = 1; k <= n; ++k)
      for (int l = 0; l < k; ++l) {
        ++iso_total;
        const auto p = classify(Spectrum(std::vector<double>(static_cast<std::size_t>(n), c_star(n, k, l))), k, l);
        if (rigidity_report(p).verdict() == "possible") ++iso_ok;
      }
  o.require(iso_ok == iso_total, "isotropic: possible");
  int ma_ok = 0, l0_obstructed = 0, l0_total = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 5);
    if (rigidity_report(ht::random_pair(n, n, 0, rng, 4.0)).verdict() == "possible") ++ma_ok;
    if (n > 2) {
      ++l0_total;
      const int k = 1 + static_cast<int>(rng() % (n - 1));
      if (rigidity_report(ht::random_pair(n, k, 0, rng, 4.0)).verdict() == "obstructed") ++l0_obstructed;
    }
  }
  o.require(ma_ok == 50, "(l,k) = (0,n): possible");
  o.require(l0_obstructed == l0_total, "l = 0, k < n, non-isotropic: obstructed");
  o.note(std::to_string(obstructed) + "/" + std::to_string(tested) + " obstructed; isotropic " +
         std::to_string(iso_ok) + "/" + std::to_string(iso_total) + " possible; (0,n) " + std::to_string(ma_ok) +
         "/50 possible; l=0,k<n " + std::to_string(l0_obstructed) + "/" + std::to_string(l0_total) + " obstructed");
  return o;
}

// 8 -------------------------------------------------------------------------
Outcome legendre_build() {
  Outcome o;
  o.time_limit = 120;
  const auto pair = exact_pair({2, 4, 4}, 3, 2);
  for (double gamma : {-1.0, -2.0}) {
    const auto b = build_bar_u(pair, gamma, 0.0, 1.0);
    const auto rep = verify_legendre(b, 10000, 808);
    const std::string g = "gamma=" + fmt(gamma);
    o.require(std::abs(rep.trace_inverse - 1) <= 1e-10, g + " trace(A^-1) = 1");
    o.require(rep.max_roundtrip_error <= 1e-10, g + " round-trip");
    o.require(rep.sampled_min_margin_Skl >= -1e-7, g + " S_{3,2}(D^2 u) >= 1 - 1e-7");
    o.require(std::abs(rep.asymptotic_fit_gamma - gamma) <= 0.05, g + " far-field exponent");
    o.note(g + ": trace-1=" + fmt(rep.trace_inverse - 1) + " roundtrip=" + fmt(rep.max_roundtrip_error) +
           " min S-1=" + fmt(rep.sampled_min_margin_Skl) + " fit=" + fmt(rep.asymptotic_fit_gamma));
  }
  return o;
}

// 9 -------------------------------------------------------------------------
Outcome perron_sandwich() {
  Outcome o;
  struct Setup {
    const char* name;
    AdmissiblePair pair;
    ConvexDomain D;
    QuadraticData phi;
  };
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(3, 3);
  Q.diagonal() << 1.5, 1, 2;
  Eigen::VectorXd b(3);
  b << 0.3, 0, 0;
  const auto aniso =
      classify(normalize_to_class(Spectrum(std::vector<double>{2.5, 3.2, 3.3566}), 3, 2).scaled, 3, 2);
  const Setup setups[] = {
      {"A=3I ball", classify(Spectrum(std::vector<double>{3, 3, 3}), 3, 2),
       ConvexDomain::ball(Eigen::VectorXd::Zero(3), 1.0), QuadraticData::constant(3, 0.0)},
      {"A=diag(2.5,3.2,3.3566) normalized, ellipsoid", aniso, ConvexDomain::ellipsoid(Eigen::VectorXd::Zero(3), Q),
       QuadraticData(Eigen::MatrixXd::Identity(3, 3), b, 0.5)},
  };
  for (const auto& st : setups) {
    o.require(st.pair.case_tag == AsymptoticCase::Case1, std::string(st.name) + " is Case1");
    const double cs = measure_threshold(st.pair, st.D, st.phi);
    const auto sw = build_sandwich(st.pair, st.D, st.phi, cs + 1);
    const auto rep = verify_sandwich(sw, 10000, 909);
    o.require(rep.min_margin() >= 0, std::string(st.name) + " ordering margins");
    o.require(rep.boundary_error <= 1e-9, std::string(st.name) + " underline-u = phi on dD");
    o.note(std::string(st.name) + ": c*=" + fmt(cs) + " min margin=" + fmt(rep.min_margin()) +
           " boundary err=" + fmt(rep.boundary_error) + " far rate=" + fmt(rep.far_field_rate) + " (pred " +
           fmt(rep.predicted_rate) + ")");
  }
  const auto sol = solve_isotropic_exterior(3, 3, 2, 1.0, 0.5, 3.0);
  const auto pts = annulus_samples(sol.pair.a(), 1.0, 1e6, 10000, 910);
  const double residual = plug_back_residual(sol.profile, pts);
  std::vector<double> r, g;
  for (double s : geometric_samples(1e2, 1e6, 40)) {
    r.push_back(std::sqrt(2 * s / sol.pair.a()[0]));
    g.push_back(3.0 - sol.profile.omega_minus_linear(s));
  }
  const double slope = fit_log_log(r, g).slope;
  o.require(residual <= 1e-8, "isotropic plug-back residual");
  o.require(std::abs(slope - (2 - 3)) <= 0.05, "isotropic decay exponent 2 - n");
  o.note("isotropic n=3: residual=" + fmt(residual) + " decay=" + fmt(slope));
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"worked examples (exact)", worked_examples},
      {"symmetric-function identities", symmetric_identities},
      {"first-integral residual", first_integral_residual},
      {"G-Sym sigma vs finite-difference oracle", gsym_oracle_equivalence},
      {"subsolution certification, all four cases", subsolution_certification},
      {"asymptotic-rate fits", asymptotic_rates},
      {"rigidity verdicts", rigidity},
      {"Legendre build", legendre_build},
      {"Perron sandwich and isotropic exterior solve", perron_sandwich},
  };
  int failures = 0, index = 0;
  for (const auto& [name, fn] : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = fn();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (out.time_limit > 0 && secs > out.time_limit) {
      out.pass = false;
      out.note("runtime " + fmt(secs) + " s exceeds " + fmt(out.time_limit) + " s");
    }
    if (!out.pass) ++failures;
    std::printf("%s criterion %d: %s [%.2f s] %s\n", out.pass ? "PASS" : "FAIL", index, name, secs,
                out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %d criteria passed\n", index - failures, index);
  return failures == 0 ? 0 : 1;
}
