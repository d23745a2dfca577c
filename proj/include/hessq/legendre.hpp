#pragma once

// Legendre-transform subsolutions of S_{n,n-1}(D^2 u) = 1, the radial interior
// solution on a ball used for interior gluing, and the n = 2 reduction to the
// Monge-Ampere equation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hessq/admissibility.hpp"
#include "hessq/errors.hpp"
#include "hessq/fit.hpp"
#include "hessq/quadratic.hpp"
#include "hessq/sampling.hpp"
#include "hessq/symfunc.hpp"

namespace hessq {

/// Radial C^2 replacement of the power term inside |y| < R0: a quadratic
/// Q(rho) = q0 + q1 rho + q2 rho^2 in rho = |y|^2, matching value, first and
/// second radial derivatives at R0. Being polynomial in |y|^2 it is smooth at 0.
struct InnerExtension {
  double R0 = 0;
  double q0 = 0, q1 = 0, q2 = 0;
  int epsilon_doublings = 0;   // times the collar had to be widened
  double min_eigen_margin = 0; // min over the radial check grid of lambda_min(D^2 ubar) - delta
};

/// ubar(y) = y^T A^{-1} y / 2 - c + G(y), G = +-alpha |y|^gamma outside B_{K+eps}.
struct LegendreBuild {
  AdmissiblePair pair;
  Eigen::VectorXd a;      // A = diag(a) in the sorted eigenbasis
  Eigen::VectorXd a_inv;
  double gamma = -1;
  double c = 0;
  double alpha = 0;
  double delta = 0;
  double Lambda = 0;      // smallest eigenvalue of A^{-1}
  double K = 0;
  double epsilon = 0;
  int sign = 1;           // +1 for 2-n <= gamma < 0, -1 for gamma < 2-n
  InnerExtension extension;

  int n() const { return static_cast<int>(a.size()); }
  double trace_inverse() const { return a_inv.sum(); }

  /// G(r) and the two Hessian scalars: D^2 G = phi1 I + (phi2 - phi1) yhat yhat^T.
  struct Radial {
    double G, phi1, phi2;
  };
  Radial radial(double r) const {
    if (alpha == 0) return {0, 0, 0};
    if (r >= extension.R0) {
      const double p = sign * alpha * std::pow(r, gamma - 2.0);
      return {p * r * r, gamma * p, gamma * (gamma - 1.0) * p};
    }
    const double rho = r * r;
    const auto& e = extension;
    return {e.q0 + rho * (e.q1 + rho * e.q2), 2.0 * e.q1 + 4.0 * e.q2 * rho, 2.0 * e.q1 + 12.0 * e.q2 * rho};
  }

  double value(const Eigen::VectorXd& y) const {
    return 0.5 * y.dot(a_inv.cwiseProduct(y)) - c + radial(y.norm()).G;
  }

  Eigen::MatrixXd hessian(const Eigen::VectorXd& y) const {
    const double r = y.norm();
    const auto rd = radial(r);
    Eigen::MatrixXd H = Eigen::MatrixXd(a_inv.asDiagonal());
    H.diagonal().array() += rd.phi1;
    if (r > 0) H += (rd.phi2 - rd.phi1) / (r * r) * y * y.transpose();
    return H;
  }

  double laplacian(const Eigen::VectorXd& y) const {
    const auto rd = radial(y.norm());
    return trace_inverse() + (n() - 1) * rd.phi1 + rd.phi2;
  }
};

/// The admissible radius K for D^2 ubar > delta I on |y| > K.
inline double legendre_K(double alpha, double gamma, double Lambda, double delta, int n) {
  if (gamma >= 2.0 - n) return std::pow(-alpha * gamma / (Lambda - delta), 1.0 / (2.0 - gamma));
  return std::pow(alpha * gamma * (gamma - 1.0) / (Lambda - delta), 1.0 / (2.0 - gamma));
}

namespace detail {

inline InnerExtension fit_extension(double R0, int sign, double alpha, double gamma) {
  InnerExtension e;
  e.R0 = R0;
  const double p = sign * alpha * std::pow(R0, gamma - 2.0);
  const double g = p * R0 * R0, g1_over_r = gamma * p, g2 = gamma * (gamma - 1.0) * p;
  e.q2 = (g2 - g1_over_r) / (8.0 * R0 * R0);
  e.q1 = 0.5 * (g1_over_r - 4.0 * e.q2 * R0 * R0);
  e.q0 = g - e.q1 * R0 * R0 - e.q2 * R0 * R0 * R0 * R0;
  return e;
}

}  // namespace detail

/// Builds ubar for A in A_{n,n-1}. delta defaults to Lambda / 2; epsilon
/// defaults to K / 10 (or 1e-3 when K = 0). The collar is doubled until the
/// inner extension keeps D^2 ubar > delta I on a fine radial grid.
inline LegendreBuild build_bar_u(const AdmissiblePair& pair, double gamma, double c, double alpha,
                                 std::optional<double> delta = std::nullopt,
                                 std::optional<double> epsilon = std::nullopt) {
  const int n = pair.n();
  if (pair.k != n || pair.l != n - 1) throw argument_error("build_bar_u: needs (k,l) = (n,n-1)");
  if (n < 3) throw argument_error("build_bar_u: needs n >= 3");
  if (!(gamma < 0)) throw argument_error("build_bar_u: gamma must be negative");
  if (!(alpha >= 0)) throw argument_error("build_bar_u: alpha must be >= 0");
  LegendreBuild b;
  b.pair = pair;
  b.a = Eigen::Map<const Eigen::VectorXd>(pair.a().data(), n);
  b.a_inv = b.a.cwiseInverse();
  b.gamma = gamma;
  b.c = c;
  b.alpha = alpha;
  b.Lambda = b.a_inv.minCoeff();
  b.delta = delta.value_or(0.5 * b.Lambda);
  if (!(b.delta > 0) || !(b.delta < b.Lambda)) throw argument_error("build_bar_u: need 0 < delta < Lambda");
  b.sign = gamma >= 2.0 - n ? 1 : -1;
  b.K = alpha > 0 ? legendre_K(alpha, gamma, b.Lambda, b.delta, n) : 0.0;
  b.epsilon = epsilon.value_or(b.K > 0 ? 0.1 * b.K : 1e-3);
  if (!(b.epsilon > 0)) throw argument_error("build_bar_u: epsilon must be positive");
  if (alpha == 0) {
    b.extension.R0 = 0;
    b.extension.min_eigen_margin = b.Lambda - b.delta;
    return b;
  }
  for (int tries = 0;; ++tries) {
    if (tries > 60) throw numeric_error("build_bar_u: no collar width gives a convex extension");
    b.extension = detail::fit_extension(b.K + b.epsilon, b.sign, alpha, gamma);
    b.extension.epsilon_doublings = tries;
    double margin = std::numeric_limits<double>::infinity();
    const int steps = 512;
    for (int i = 0; i <= steps; ++i) {
      const double r = b.extension.R0 * i / steps;
      const auto rd = b.radial(r);
      margin = std::min(margin, b.Lambda + std::min(rd.phi1, rd.phi2) - b.delta);
    }
    b.extension.min_eigen_margin = margin;
    if (margin > 0) break;
    b.epsilon *= 2;
  }
  return b;
}

/// x = D ubar(y) = A^{-1} y + phi1(|y|) y.
inline Eigen::VectorXd forward_map(const LegendreBuild& b, const Eigen::VectorXd& y) {
  const auto rd = b.radial(y.norm());
  return b.a_inv.cwiseProduct(y) + rd.phi1 * y;
}

/// y with D ubar(y) = x, by damped Newton from y0 = A x.
inline Eigen::VectorXd inverse_map(const LegendreBuild& b, const Eigen::VectorXd& x) {
  if (x.size() != b.n()) throw argument_error("inverse_map: wrong dimension");
  Eigen::VectorXd y = b.a.cwiseProduct(x);
  const double tol = 1e-11 * (1.0 + x.norm());
  Eigen::VectorXd res = forward_map(b, y) - x;
  double rn = res.norm();
  for (int it = 0; it < 100; ++it) {
    if (rn <= 1e-3 * tol) return y;
    const Eigen::VectorXd step = b.hessian(y).ldlt().solve(res);
    double t = 1.0;
    Eigen::VectorXd y_new;
    double rn_new = 0;
    for (int h = 0; h < 60; ++h) {
      y_new = y - t * step;
      rn_new = (forward_map(b, y_new) - x).norm();
      if (rn_new < rn) break;
      t *= 0.5;
    }
    if (!(rn_new < rn)) {
      // Stagnated at rounding level.
      if (rn <= tol) return y;
      throw numeric_error("inverse_map: Newton stagnated", rn);
    }
    y = y_new;
    res = forward_map(b, y) - x;
    rn = res.norm();
  }
  if (rn <= tol) return y;
  throw numeric_error("inverse_map: iteration cap reached", rn);
}

/// u(x) - x^T A x / 2 - c. With eta = y - A x = -phi1 A y (from the map
/// equation), this is -phi1^2 y^T A y / 2 - G(y), free of the O(|x|^2) cancellation.
inline double u_deviation(const LegendreBuild& b, const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = inverse_map(b, x);
  const auto rd = b.radial(y.norm());
  return -0.5 * rd.phi1 * rd.phi1 * y.dot(b.a.cwiseProduct(y)) - rd.G;
}

/// u(x) = x . y(x) - ubar(y(x)).
inline double u_legendre(const LegendreBuild& b, const Eigen::VectorXd& x) {
  return 0.5 * x.dot(b.a.cwiseProduct(x)) + b.c + u_deviation(b, x);
}

/// S_{n,n-1}(D^2 u(x)) through D^2 u = (D^2 ubar(y))^{-1}.
inline double legendre_quotient(const LegendreBuild& b, const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = inverse_map(b, x);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.hessian(y), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd mu = es.eigenvalues().cwiseInverse();
  std::vector<double> m(mu.data(), mu.data() + mu.size());
  return sigma(b.n(), m) / sigma(b.n() - 1, m);
}

struct LegendreReport {
  double trace_inverse = 0;
  double K = 0, delta = 0, epsilon = 0;
  double min_convexity_margin = 0;    // min lambda_min(D^2 ubar) - delta over sampled y
  double max_laplacian_outer = 0;     // max Delta ubar over sampled |y| >= R0
  double max_roundtrip_error = 0;     // |forward(inverse(x)) - x| / (1 + |x|)
  double min_lipschitz_ratio = 0;     // min |forward(y) - forward(y')| / |y - y'|
  double sampled_min_margin_Skl = 0;  // min S_{n,n-1}(D^2 u) - 1 outside the collar image
  double max_duality_error = 0;       // relative eigenvalue mismatch of D^2 u vs (D^2 ubar)^{-1}
  double asymptotic_fit_gamma = 0;    // slope of log|u - x^T A x/2 - c| vs log|x|
  double map_fit_exponent = 0;        // slope of log|x - A^{-1} y| vs log|y|
  std::size_t points = 0;
};

/// Sampled verification of a build. Radii are in units of R0 (or 1 when the
/// build is purely quadratic).
inline LegendreReport verify_legendre(const LegendreBuild& b, std::size_t samples, std::uint64_t seed) {
  LegendreReport rep;
  const int n = b.n();
  rep.trace_inverse = b.trace_inverse();
  rep.K = b.K;
  rep.delta = b.delta;
  rep.epsilon = b.epsilon;
  rep.points = samples;
  const double R0 = std::max(b.extension.R0, 1e-3);
  const double x_scale = R0 / b.Lambda;

  rep.min_convexity_margin = std::numeric_limits<double>::infinity();
  rep.max_laplacian_outer = -std::numeric_limits<double>::infinity();
  for (const auto& y : shell_samples(n, 1e-3 * R0, 1e3 * R0, samples, seed)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.hessian(y), Eigen::EigenvaluesOnly);
    rep.min_convexity_margin = std::min(rep.min_convexity_margin, es.eigenvalues().minCoeff() - b.delta);
    if (y.norm() >= b.extension.R0) rep.max_laplacian_outer = std::max(rep.max_laplacian_outer, b.laplacian(y));
  }

  std::mt19937_64 rng(seed + 1);
  rep.min_lipschitz_ratio = std::numeric_limits<double>::infinity();
  const auto ys = shell_samples(n, 1e-2 * R0, 1e2 * R0, samples, seed + 2);
  for (std::size_t i = 0; i + 1 < ys.size(); i += 2) {
    const double dy = (ys[i] - ys[i + 1]).norm();
    if (dy > 0) rep.min_lipschitz_ratio = std::min(rep.min_lipschitz_ratio,
                                                   (forward_map(b, ys[i]) - forward_map(b, ys[i + 1])).norm() / dy);
  }

  rep.sampled_min_margin_Skl = std::numeric_limits<double>::infinity();
  const auto xs = shell_samples(n, 1e-2 * x_scale, 1e3 * x_scale, samples, seed + 3);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto& x = xs[i];
    const Eigen::VectorXd y = inverse_map(b, x);
    rep.max_roundtrip_error = std::max(rep.max_roundtrip_error, (forward_map(b, y) - x).norm() / (1.0 + x.norm()));
    if (y.norm() >= b.extension.R0) {
      rep.sampled_min_margin_Skl = std::min(rep.sampled_min_margin_Skl, legendre_quotient(b, x) - 1.0);
    }
    if (i % 16 == 0) {
      // D^2 u = D_x y(x) by central differences on the inverse map.
      const double h = 1e-5 * (1.0 + x.norm());
      Eigen::MatrixXd J(n, n);
      for (int j = 0; j < n; ++j) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[j] = h;
        J.col(j) = (inverse_map(b, x + e) - inverse_map(b, x - e)) / (2 * h);
      }
      J = 0.5 * (J + J.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> fd(J, Eigen::EigenvaluesOnly);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(b.hessian(y), Eigen::EigenvaluesOnly);
      Eigen::VectorXd recip = ex.eigenvalues().cwiseInverse();
      std::sort(recip.data(), recip.data() + n);
      const double err = ((fd.eigenvalues() - recip).cwiseAbs().array() / recip.cwiseAbs().array()).maxCoeff();
      rep.max_duality_error = std::max(rep.max_duality_error, err);
    }
  }

  if (b.alpha > 0) {
    std::mt19937_64 dir_rng(seed + 4);
    const Eigen::VectorXd dir = random_unit_vector(n, dir_rng);
    const auto radii = geometric_samples(10 * x_scale, 1e4 * x_scale, 40);
    std::vector<double> dev, rad, map_err, yr;
    for (double r : radii) {
      const Eigen::VectorXd x = r * dir;
      dev.push_back(u_deviation(b, x));
      rad.push_back(r);
      const Eigen::VectorXd y = r * b.a.cwiseProduct(dir);
      map_err.push_back(std::abs(b.radial(y.norm()).phi1) * y.norm());
      yr.push_back(y.norm());
    }
    rep.asymptotic_fit_gamma = fit_log_log(rad, dev).slope;
    rep.map_fit_exponent = fit_log_log(yr, map_err).slope;
  }
  return rep;
}

/// Radial solution of S_{k,l}(D^2 v) = 1 on B_R with v = 0 on the sphere.
///
/// With A = I the G-Sym reduction gives, for w = v'(s), s = |x|^2 / 2,
///   w' = (C_n^l w^l - C_n^k w^k) / (2 s (C_{n-1}^{k-1} w^{k-1} - C_{n-1}^{l-1} w^{l-1})),
/// integrated by RK4 from the regular centre w(0) = c*(k,l).
struct RadialProfile {
  int n = 0, k = 0, l = 0;
  double R = 0;
  std::vector<double> s;  // nodes on [0, R^2 / 2]
  std::vector<double> w;  // v'(s)
  std::vector<double> dw; // v''(s)
  std::vector<double> v;  // v(s), v(R^2/2) = 0

  double s_max() const { return 0.5 * R * R; }

  /// Piecewise-cubic Hermite evaluation of v, v', v'' at s.
  struct Eval {
    double v, w, dw;
  };
  Eval at(double sq) const {
    if (sq < 0 || sq > s_max() * (1 + 1e-12)) throw argument_error("RadialProfile: s outside the ball");
    sq = std::min(sq, s_max());
    auto it = std::upper_bound(s.begin(), s.end(), sq);
    std::size_t i = it == s.begin() ? 0 : static_cast<std::size_t>(it - s.begin()) - 1;
    if (i + 1 >= s.size()) i = s.size() - 2;
    const double h = s[i + 1] - s[i], t = (sq - s[i]) / h;
    const double h00 = 2 * t * t * t - 3 * t * t + 1, h10 = t * t * t - 2 * t * t + t;
    const double h01 = -2 * t * t * t + 3 * t * t, h11 = t * t * t - t * t;
    const double wi = w[i] + t * (w[i + 1] - w[i]);
    return {h00 * v[i] + h10 * h * w[i] + h01 * v[i + 1] + h11 * h * w[i + 1], wi,
            dw[i] + t * (dw[i + 1] - dw[i])};
  }
};

namespace detail {

inline double radial_rhs(int n, int k, int l, double s, double w) {
  if (s <= 0) return 0.0;
  const double num = static_cast<double>(binomial(n, l)) * std::pow(w, l) -
                     static_cast<double>(binomial(n, k)) * std::pow(w, k);
  const double den = static_cast<double>(binomial(n - 1, k - 1)) * std::pow(w, k - 1) -
                     (l >= 1 ? static_cast<double>(binomial(n - 1, l - 1)) * std::pow(w, l - 1) : 0.0);
  // At the isotropic root the numerator vanishes to rounding; keep the germ constant.
  const double scale = static_cast<double>(binomial(n, k)) * std::pow(w, k);
  if (std::abs(num) <= 1e-14 * scale) return 0.0;
  if (den <= 0) throw numeric_error("radial_interior_solution: ODE left the admissible range", den);
  return num / (2.0 * s * den);
}

}  // namespace detail

inline RadialProfile radial_interior_solution(int n, int k, int l, double R, int steps = 2000) {
  check_orders(n, k, l);
  if (!(R > 0)) throw argument_error("radial_interior_solution: R must be positive");
  RadialProfile p;
  p.n = n;
  p.k = k;
  p.l = l;
  p.R = R;
  const double S = p.s_max(), h = S / steps;
  p.s.resize(static_cast<std::size_t>(steps) + 1);
  p.w.resize(p.s.size());
  p.dw.resize(p.s.size());
  p.v.assign(p.s.size(), 0.0);
  auto f = [&](double s, double w) { return detail::radial_rhs(n, k, l, s, w); };
  double w = c_star(n, k, l);
  for (int i = 0; i <= steps; ++i) {
    const double s = i * h;
    p.s[static_cast<std::size_t>(i)] = s;
    p.w[static_cast<std::size_t>(i)] = w;
    p.dw[static_cast<std::size_t>(i)] = f(s, w);
    if (i == steps) break;
    const double k1 = f(s, w), k2 = f(s + h / 2, w + h / 2 * k1);
    const double k3 = f(s + h / 2, w + h / 2 * k2), k4 = f(s + h, w + h * k3);
    w += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!std::isfinite(w) || w <= 0) throw numeric_error("radial_interior_solution: RK4 step failed", w);
  }
  // v by the Hermite rule on (w, w'), then shift so that v(R^2/2) = 0.
  for (std::size_t i = 1; i < p.s.size(); ++i) {
    const double hh = p.s[i] - p.s[i - 1];
    p.v[i] = p.v[i - 1] + hh / 2 * (p.w[i - 1] + p.w[i]) + hh * hh / 12 * (p.dw[i - 1] - p.dw[i]);
  }
  const double end = p.v.back();
  for (auto& x : p.v) x -= end;
  p.v.back() = 0.0;
  return p;
}

/// D^2 v(x) = w I + w' x x^T for the radial profile.
inline Eigen::MatrixXd radial_hessian(const RadialProfile& p, const Eigen::VectorXd& x) {
  const auto e = p.at(0.5 * x.squaredNorm());
  Eigen::MatrixXd H = e.w * Eigen::MatrixXd::Identity(p.n, p.n) + e.dw * x * x.transpose();
  return H;
}

struct GlueReport {
  double alpha_glue = 1;
  double bound = 1;               // alpha_glue^{k-l}
  double min_quotient = 0;        // min S_{k,l}(D^2 u) over the ball grid
  double min_margin = 0;          // min S_{k,l}(D^2 u) - bound
  bool phi_k_convex = false;
  double max_boundary_error = 0;  // max |u - phi| on the sphere
  double v0 = 0;                  // min over the inner ball of -v
  double inner_margin = 0;        // min over the inner ball of (phi - alpha v0) - u
  double min_k_convexity = 0;     // min over m <= k of sigma_m(D^2 u)
  bool passed = false;
};

/// Checks u = phi + alpha_glue v on B_R: the concavity bound, the boundary
/// values and the inner-ball margin (inner ball of radius inner_fraction R).
inline GlueReport glue_interior_subsolution(const QuadraticData& phi, const RadialProfile& v, double alpha_glue,
                                            std::size_t samples = 2000, std::uint64_t seed = 0,
                                            double inner_fraction = 0.5) {
  if (!(alpha_glue >= 1)) throw argument_error("glue_interior_subsolution: alpha_glue must be >= 1");
  if (phi.dim() != v.n) throw argument_error("glue_interior_subsolution: dimension mismatch");
  const int n = v.n, k = v.k, l = v.l;
  GlueReport rep;
  rep.alpha_glue = alpha_glue;
  rep.bound = std::pow(alpha_glue, k - l);
  rep.phi_k_convex = is_k_convex_matrix(phi.hessian(), k);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  rep.min_quotient = rep.min_k_convexity = std::numeric_limits<double>::infinity();
  rep.v0 = std::numeric_limits<double>::infinity();
  std::vector<Eigen::VectorXd> inner;
  for (std::size_t i = 0; i < samples; ++i) {
    const double r = v.R * std::pow(U(rng), 1.0 / n);
    const Eigen::VectorXd x = r * random_unit_vector(n, rng);
    const Eigen::MatrixXd H = phi.hessian() + alpha_glue * radial_hessian(v, x);
    const auto lam = symmetric_eigenvalues(0.5 * (H + H.transpose()));
    for (int m = 1; m <= k; ++m) rep.min_k_convexity = std::min(rep.min_k_convexity, sigma(m, lam));
    rep.min_quotient = std::min(rep.min_quotient, sigma(k, lam) / sigma(l, lam));
    if (r <= inner_fraction * v.R) {
      rep.v0 = std::min(rep.v0, -v.at(0.5 * r * r).v);
      inner.push_back(x);
    }
    const Eigen::VectorXd xb = v.R * random_unit_vector(n, rng);
    rep.max_boundary_error = std::max(rep.max_boundary_error,
                                      std::abs(alpha_glue * v.at(0.5 * xb.squaredNorm()).v));
  }
  rep.min_margin = rep.min_quotient - rep.bound;
  rep.inner_margin = std::numeric_limits<double>::infinity();
  for (const auto& x : inner) {
    const double u = phi(x) + alpha_glue * v.at(0.5 * x.squaredNorm()).v;
    rep.inner_margin = std::min(rep.inner_margin, phi(x) - alpha_glue * rep.v0 - u);
  }
  const double tol = 1e-8 * rep.bound;
  rep.passed = rep.min_margin >= -tol && rep.min_k_convexity >= -tol && rep.max_boundary_error <= 1e-10 &&
               rep.inner_margin >= -1e-10 && rep.v0 > 0;
  return rep;
}

/// S_{2,1}(M) = det M / tr M.
inline double s21(const Eigen::Matrix2d& M) { return M.determinant() / M.trace(); }

struct N2Reduction {
  double det_A_minus_I = 0;
  double residual = 0;  // |det(A - I) - 1|
};

/// For A in A_{2,1}: lambda1 lambda2 = lambda1 + lambda2 gives det(A - I) = 1,
/// so u = w + |x|^2 / 2 turns det D^2 w = 1 into S_{2,1}(D^2 u) = 1.
inline N2Reduction reduce_n2(const Eigen::Matrix2d& A) {
  Eigen::MatrixXd Ad = A;
  const auto lam = symmetric_eigenvalues(Ad);
  if (!(lam[0] > 0)) throw argument_error("reduce_n2: A must be positive definite");
  const double s1 = lam[0] + lam[1], s2 = lam[0] * lam[1];
  if (std::abs(s2 - s1) > 1e-10 * s1) throw argument_error("reduce_n2: A is not in A_{2,1}");
  N2Reduction r;
  r.det_A_minus_I = (A - Eigen::Matrix2d::Identity()).determinant();
  r.residual = std::abs(r.det_A_minus_I - 1.0);
  return r;
}

struct N2PointCheck {
  double det_w = 0;   // det D^2 w
  double s21_u = 0;   // S_{2,1}(D^2 w + I)
  /// det(D^2 w) - 1 and S_{2,1}(D^2 u) - 1 vanish together:
  /// S_{2,1}(D^2 w + I) = (det D^2 w + tr D^2 w + 1) / (tr D^2 w + 2).
  bool consistent(double tol = 1e-10) const {
    return (std::abs(det_w - 1.0) <= tol) == (std::abs(s21_u - 1.0) <= tol);
  }
};

inline N2PointCheck reduce_n2_point(const Eigen::Matrix2d& hess_w) {
  const Eigen::Matrix2d Hu = hess_w + Eigen::Matrix2d::Identity();
  return {hess_w.determinant(), s21(Hu)};
}

}  // namespace hessq
