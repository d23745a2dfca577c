#pragma once

// The G-Sym subsolution family omega_alpha(s), s = x^T A x / 2.
//
// v = omega' is the root v > 1 of the first integral
//     (v^{k-l} - 1) v^{2 H h_l} = alpha s^{-H},      H = (k-l) / (2 (H_k - h_l)),
// and omega_alpha(s) = beta + int_{s_bar}^s v(t) dt.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hessq/admissibility.hpp"
#include "hessq/errors.hpp"
#include "hessq/fit.hpp"
#include "hessq/parallel.hpp"
#include "hessq/symfunc.hpp"

namespace hessq {

struct QuadratureSpec {
  double abs_tol_factor = 1e-11;  // absolute tolerance = factor * (1 + |b - a|)
  unsigned max_depth = 15;
  double kronrod_rel_tol = 1e-12;
  double panel_width = 1.0;       // panel length in log t
};

namespace detail {

inline double softplus(double z) {  // log(1 + e^z)
  return z > 30 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

inline double log_expm1(double x) {  // log(e^x - 1), x > 0
  return x > 30 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
}

}  // namespace detail

/// A concrete omega_alpha over an admissible pair. Immutable; every
/// evaluation is const and thread-safe.
class GSymProfile {
 public:
  GSymProfile(AdmissiblePair pair, double alpha, double beta, double s_bar, QuadratureSpec quad = {})
      : pair_(std::move(pair)), alpha_(alpha), beta_(beta), s_bar_(s_bar), quad_(quad) {
    if (!(alpha_ >= 0) || !std::isfinite(alpha_)) throw argument_error("GSymProfile: alpha must be >= 0");
    if (!(s_bar_ > 0)) throw argument_error("GSymProfile: s_bar must be > 0");
    d_ = pair_.k - pair_.l;
    sH_ = pair_.script_H;
    p_ = 2.0 * sH_ * pair_.h;
    log_alpha_ = alpha_ > 0 ? std::log(alpha_) : -std::numeric_limits<double>::infinity();
  }

  const AdmissiblePair& pair() const noexcept { return pair_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  double s_bar() const noexcept { return s_bar_; }
  const QuadratureSpec& quadrature() const noexcept { return quad_; }
  double script_H() const noexcept { return sH_; }
  int order_gap() const noexcept { return d_; }

  /// alpha s^{-H}, the right-hand side of the first integral.
  double rhs(double s) const {
    check_s(s);
    return alpha_ > 0 ? std::exp(log_alpha_ - sH_ * std::log(s)) : 0.0;
  }

  /// log(v(s)), solved in the variable L = log v so the root is resolved to
  /// full relative precision for both v -> 1 and v >> 1.
  double log_v(double s) const {
    check_s(s);
    if (alpha_ == 0) return 0.0;
    const double log_r = log_alpha_ - sH_ * std::log(s);
    // F(L) = log(e^{dL} - 1) + p L - log R is increasing and concave, so
    // Newton from a point left of the root climbs to it monotonically.
    const double d = d_;
    const double hi = detail::softplus(log_r) / d;           // h_l = 0 closed form
    const double lo = detail::softplus(log_r - p_ * hi) / d;  // bound with v^{p} <= e^{p hi}
    double L = lo;
    for (int it = 0; it < 200; ++it) {
      const double F = detail::log_expm1(d * L) + p_ * L - log_r;
      const double dF = d / (-std::expm1(-d * L)) + p_;
      double next = L - F / dF;
      if (!(next > 0)) next = 0.5 * L;
      next = std::min(next, hi);
      if (std::abs(next - L) <= 2 * std::numeric_limits<double>::epsilon() * next) {
        L = next;
        break;
      }
      L = next;
    }
    return L;
  }

  /// v(s) - 1, accurate when v is close to 1.
  double excess(double s) const { return std::expm1(log_v(s)); }

  /// (v - 1) - alpha s^{-H} / (k-l), the excess beyond its leading term.
  ///
  /// Written through L = log v as expm1(L) - (expm1((d+p) L) - expm1(p L)) / d,
  /// which is O(L^2); for small L the Taylor series
  ///   sum_{j>=2} L^j / j! (1 - ((d+p)^j - p^j) / d)
  /// avoids the cancellation that the direct difference suffers at large s.
  double excess_minus_leading(double s) const {
    const double L = log_v(s);
    const double d = d_, q = d_ + p_;
    if (q * L < 0.25) {
      double term = L, total = 0, qj = q, pj = p_;
      for (int j = 2; j < 40; ++j) {
        term *= L / j;
        qj *= q;
        pj *= p_;
        const double add = term * (1.0 - (qj - pj) / d);
        total += add;
        if (std::abs(add) <= 1e-18 * std::abs(total)) break;
      }
      return total;
    }
    return std::expm1(L) - (std::expm1(q * L) - std::expm1(p_ * L)) / d;
  }

  /// v_alpha(s) = omega'(s) > 1.
  double solve_v(double s) const { return std::exp(log_v(s)); }

  /// (v^{k-l} - 1) v^{2 H h_l} - alpha s^{-H} at a given v.
  double first_integral_residual(double v, double s) const {
    return (std::pow(v, d_) - 1.0) * std::pow(v, p_) - rhs(s);
  }

  /// v'(s) = -v (v^{k-l} - 1) / (2 s (H_k v^{k-l} - h_l)) < 0, which is the
  /// derivative relation with alpha s^{-H} eliminated through the first integral.
  double v_prime(double s) const {
    const double L = log_v(s);
    const double e = std::expm1(d_ * L);
    if (e == 0) return 0.0;
    const double ratio = std::isfinite(e) ? e / (pair_.H * (1.0 + e) - pair_.h) : 1.0 / pair_.H;
    return -std::exp(L) * ratio / (2.0 * s);
  }

  /// Signed int_a^b (v(t) - 1) dt.
  double excess_integral(double a, double b) const {
    double err = 0;
    return integrate_log(a, b, [this](double t) { return excess(t); }, &err);
  }

  /// omega(s) - s = beta - s_bar + int_{s_bar}^s (v - 1); avoids the
  /// cancellation of forming omega and subtracting s.
  double omega_minus_linear(double s) const {
    check_s(s);
    return beta_ - s_bar_ + excess_integral(s_bar_, s);
  }

  double omega(double s) const { return s + omega_minus_linear(s); }

  /// omega(s) - s at many points, accumulating between sorted neighbours.
  std::vector<double> omega_minus_linear(std::span<const double> s) const {
    std::vector<std::size_t> order(s.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s[a] < s[b]; });
    std::vector<double> out(s.size());
    double prev_s = s_bar_;
    double acc = 0;
    // Walk upward from s_bar for s >= s_bar and downward for s < s_bar.
    auto split = std::lower_bound(order.begin(), order.end(), s_bar_,
                                  [&](std::size_t i, double v) { return s[i] < v; });
    for (auto it = split; it != order.end(); ++it) {
      acc += excess_integral(prev_s, s[*it]);
      prev_s = s[*it];
      out[*it] = beta_ - s_bar_ + acc;
    }
    prev_s = s_bar_;
    acc = 0;
    for (auto it = split; it != order.begin();) {
      --it;
      acc += excess_integral(prev_s, s[*it]);
      prev_s = s[*it];
      out[*it] = beta_ - s_bar_ + acc;
    }
    return out;
  }

  /// Signed integral of g over [a, b] in the variable t = e^tau, panel by
  /// panel. Throws numeric_error when the estimated error exceeds
  /// abs_tol_factor (1 + |b - a|).
  template <class G>
  double integrate_log(double a, double b, G&& g, double* error_out) const {
    check_s(a);
    check_s(b);
    *error_out = 0;
    if (a == b || alpha_ == 0) return 0.0;
    const double sign = b > a ? 1.0 : -1.0;
    const double lo = std::log(std::min(a, b));
    const double hi = std::log(std::max(a, b));
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / quad_.panel_width)));
    const double w = (hi - lo) / panels;
    double total = 0, err_total = 0;
    auto f = [&](double tau) {
      const double t = std::exp(tau);
      return g(t) * t;
    };
    const double tol = quad_.abs_tol_factor * (1.0 + std::abs(b - a));
    for (int i = 0; i < panels; ++i) {
      const double p0 = lo + i * w;
      const double p1 = i + 1 == panels ? hi : p0 + w;
      double err = 0;
      total += adaptive_panel(f, p0, p1, tol / panels, quad_.max_depth, &err);
      err_total += err;
    }
    if (err_total > tol) {
      throw numeric_error("quadrature did not reach tolerance", err_total);
    }
    *error_out = err_total;
    return sign * total;
  }

 private:
  // Bisection driver around the 31-point Kronrod rule. The rule is called
  // non-adaptively because the error it reports is for the interval mapped to
  // [-1, 1]; it is rescaled by the half-width here.
  template <class F>
  double adaptive_panel(F& f, double a, double b, double abs_tol, unsigned depth, double* err) const {
    double e = 0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &e);
    e *= 0.5 * (b - a);
    if (depth == 0 || e <= abs_tol || e <= quad_.kronrod_rel_tol * std::abs(v)) {
      *err = e;
      return v;
    }
    const double m = 0.5 * (a + b);
    double e1 = 0, e2 = 0;
    const double v1 = adaptive_panel(f, a, m, 0.5 * abs_tol, depth - 1, &e1);
    const double v2 = adaptive_panel(f, m, b, 0.5 * abs_tol, depth - 1, &e2);
    *err = e1 + e2;
    return v1 + v2;
  }

  void check_s(double s) const {
    if (!(s > 0) || !std::isfinite(s)) throw argument_error("s must be positive and finite");
  }

  AdmissiblePair pair_;
  double alpha_;
  double beta_;
  double s_bar_;
  QuadratureSpec quad_;
  int d_ = 1;
  double sH_ = 1;
  double p_ = 0;
  double log_alpha_ = 0;
};

/// Leading behaviour of omega_alpha at infinity:
///   omega(s) = s + [log or power term] + mu + O(s^{remainder_exponent}).
struct AsymptoticForm {
  AsymptoticCase case_tag = AsymptoticCase::Case1;
  double mu = 0;
  std::optional<double> log_coefficient;    // alpha/2 (Case2), alpha (Case3)
  std::optional<double> power_coefficient;  // alpha / (1 - H) (Case4)
  std::optional<double> power_exponent;     // 1 - H (Case4)
  double remainder_exponent = 0;            // 1 - H (Case1), 1 - 2H otherwise
  double error_bound = 0;                   // quadrature + analytic tail bound on mu
  double s_max = 0;                         // numerical integration stopped here

  /// The growing non-linear term: alpha/2 ln s, alpha ln s, c s^{1-H}, or 0.
  double growth_term(double s) const {
    if (log_coefficient) return *log_coefficient * std::log(s);
    if (power_coefficient) return *power_coefficient * std::pow(s, *power_exponent);
    return 0.0;
  }
  /// s + growth_term(s) + mu.
  double leading(double s) const { return s + growth_term(s) + mu; }
};

namespace detail {

// The leading-order excess alpha s^{-H} / (k-l) is subtracted in Cases 2-4,
// which is alpha/(2s), alpha/s and alpha s^{-1/(2(H_k-h_l))} respectively.
inline bool subtracts_leading(AsymptoticCase c) { return c != AsymptoticCase::Case1; }

}  // namespace detail

/// mu_i(alpha) and the rest of the case's expansion.
///
/// The integral to infinity is split at S_max >= max(1e6, 1e4 s_bar). Beyond
/// S_max the excess satisfies
///   alpha s^{-H}/(k-l) - (2 H H_k - 1) (alpha s^{-H}/(k-l))^2 <= v - 1 <= alpha s^{-H}/(k-l),
/// so the leading part is integrated exactly (Case1) and the rest enters only
/// as error_bound. S_max is pushed out until that bound is below 1e-12.
inline AsymptoticForm mu(const GSymProfile& prof) {
  const auto& pair = prof.pair();
  AsymptoticForm form;
  form.case_tag = pair.case_tag;
  const double alpha = prof.alpha();
  const double sH = prof.script_H();
  const double d = prof.order_gap();
  const double s_bar = prof.s_bar();
  const bool sub = detail::subtracts_leading(pair.case_tag);

  if (pair.case_tag == AsymptoticCase::Case1) {
    form.remainder_exponent = 1.0 - sH;
  } else {
    form.remainder_exponent = 1.0 - 2.0 * sH;
    if (pair.case_tag == AsymptoticCase::Case4) {
      form.power_exponent = 1.0 - sH;
      form.power_coefficient = alpha / d / (1.0 - sH);
    } else {
      form.log_coefficient = alpha / d;
    }
  }
  if (alpha == 0) {
    form.mu = prof.beta() - s_bar;
    form.s_max = s_bar;
    return form;
  }
  if (pair.case_tag == AsymptoticCase::Case1 && !(sH > 1)) {
    throw numeric_error("Case1 requires H_{k,l} > 1", sH);
  }

  const double c_bound = std::abs(2.0 * sH * pair.H - 1.0) * alpha * alpha / (d * d * (2.0 * sH - 1.0));
  const double tail_tol = 1e-12;
  double s_max = std::max(1e6, 1e4 * s_bar);
  if (c_bound > 0) {
    const double needed = std::pow(c_bound / tail_tol, 1.0 / (2.0 * sH - 1.0));
    if (std::isfinite(needed)) s_max = std::max(s_max, needed);
    else s_max = 1e250;
  }
  s_max = std::min(s_max, 1e250);
  const double tail_bound = c_bound * std::pow(s_max, 1.0 - 2.0 * sH);
  if (tail_bound > 1e-10) throw numeric_error("mu: analytic tail bound exceeds tolerance", tail_bound);

  double quad_err = 0;
  const double body = prof.integrate_log(
      s_bar, s_max,
      [&](double t) {
        return sub ? prof.excess_minus_leading(t) : prof.excess(t);
      },
      &quad_err);
  // Relative quadrature tolerance on a long range: accept the estimate as part of the bound.
  double value = prof.beta() - s_bar - form.growth_term(s_bar) + body;
  if (!sub) value += alpha * std::pow(s_max, 1.0 - sH) / (d * (sH - 1.0));
  form.mu = value;
  form.error_bound = quad_err + tail_bound;
  form.s_max = s_max;
  return form;
}

/// alpha(c) with mu_1(alpha(c)) = c, for Case1 pairs.
inline double invert_mu(const AdmissiblePair& pair, double c, double beta, double s_bar,
                        double tol = 1e-9) {
  if (pair.case_tag != AsymptoticCase::Case1) {
    throw unsupported_case_error("invert_mu: only Case1 profiles have a finite mu_1 to invert");
  }
  const double floor_value = beta - s_bar;
  if (!(c > floor_value)) {
    throw threshold_error("invert_mu: c must exceed mu_1(0) = beta - s_bar", floor_value);
  }
  auto f = [&](double a) { return mu(GSymProfile(pair, a, beta, s_bar)).mu - c; };
  double lo = 0, f_lo = floor_value - c;
  double hi = 1, f_hi = f(hi);
  for (int i = 0; f_hi < 0; ++i) {
    if (i > 200) throw numeric_error("invert_mu: could not bracket alpha(c)", f_hi);
    lo = hi;
    f_lo = f_hi;
    hi *= 2;
    f_hi = f(hi);
  }
  // Illinois regula falsi on the monotone map alpha -> mu_1(alpha).
  int side = 0;
  double a = hi;
  for (int it = 0; it < 300; ++it) {
    a = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
    if (!(a > lo && a < hi)) a = 0.5 * (lo + hi);
    const double fa = f(a);
    if (std::abs(fa) <= tol) return a;
    if (fa < 0) {
      lo = a;
      f_lo = fa;
      if (side == -1) f_hi *= 0.5;
      side = -1;
    } else {
      hi = a;
      f_hi = fa;
      if (side == 1) f_lo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  const double final_gap = f(a);
  if (std::abs(final_gap) > tol) throw numeric_error("invert_mu: did not converge", final_gap);
  return a;
}

/// sigma_m(lambda(D^2 w)) for a G-Sym function w = w(x^T A x / 2), A = diag(a):
///   sigma_m(a) w1^m + w2 w1^{m-1} sum_i sigma_{m-1;i}(a) (a_i x_i)^2,
/// with x given in the (sorted) eigenbasis of the pair.
inline double gsym_sigma(const AdmissiblePair& pair, double w1, double w2, const Eigen::VectorXd& x,
                         int m) {
  const auto& a = pair.a();
  const int n = pair.n();
  if (m < 1 || m > n) throw range_error("gsym_sigma: m outside 1..n");
  if (x.size() != n) throw argument_error("gsym_sigma: point has wrong dimension");
  double sum = 0;
  for (int i = 0; i < n; ++i) {
    const std::size_t ex[] = {static_cast<std::size_t>(i)};
    const double ax = a[static_cast<std::size_t>(i)] * x[i];
    sum += sigma_restricted<double>(m - 1, a, ex) * ax * ax;
  }
  return sigma(m, a) * std::pow(w1, m) + w2 * std::pow(w1, m - 1) * sum;
}

inline double quadratic_level(const AdmissiblePair& pair, const Eigen::VectorXd& x) {
  double s = 0;
  for (int i = 0; i < pair.n(); ++i) s += pair.a()[static_cast<std::size_t>(i)] * x[i] * x[i];
  return 0.5 * s;
}

struct SubsolutionReport {
  double tolerance = 0;                       // 1e-8 sigma_k(a)
  std::vector<double> min_sigma;              // per m = 1..k, min over points of sigma_m(D^2 omega)
  std::vector<std::size_t> argmin_sigma;
  double min_convexity_margin = 0;            // min over m and points
  double min_difference_margin = 0;           // min of sigma_k - sigma_l
  double min_quotient_margin = 0;             // min of sigma_k / sigma_l - 1
  std::size_t argmin_difference = 0;
  double min_scalar_margin = 0;               // min of v + 2 s v' H_k over the grid's s-range
  std::size_t points = 0;
  bool passed = false;
};

/// k-convexity and the sub-solution inequality at every grid point.
inline SubsolutionReport verify_subsolution(const GSymProfile& prof,
                                           std::span<const Eigen::VectorXd> grid) {
  const auto& pair = prof.pair();
  const int k = pair.k, l = pair.l;
  SubsolutionReport rep;
  rep.points = grid.size();
  rep.tolerance = 1e-8 * sigma(k, pair.a());
  std::vector<std::vector<double>> sig(grid.size(), std::vector<double>(static_cast<std::size_t>(k) + 1));
  std::vector<double> scalar(grid.size());
  parallel_for(grid.size(), [&](std::size_t p) {
    const double s = quadratic_level(pair, grid[p]);
    const double v = prof.solve_v(s);
    const double vp = prof.v_prime(s);
    for (int m = 1; m <= k; ++m) sig[p][static_cast<std::size_t>(m)] = gsym_sigma(pair, v, vp, grid[p], m);
    sig[p][0] = 1.0;
    scalar[p] = v + 2.0 * s * vp * pair.H;
  });
  rep.min_sigma.assign(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
  rep.argmin_sigma.assign(static_cast<std::size_t>(k), 0);
  rep.min_difference_margin = std::numeric_limits<double>::infinity();
  rep.min_quotient_margin = std::numeric_limits<double>::infinity();
  rep.min_scalar_margin = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    for (int m = 1; m <= k; ++m) {
      const double val = sig[p][static_cast<std::size_t>(m)];
      auto& cur = rep.min_sigma[static_cast<std::size_t>(m - 1)];
      if (val < cur) { cur = val; rep.argmin_sigma[static_cast<std::size_t>(m - 1)] = p; }
    }
    const double sk = sig[p][static_cast<std::size_t>(k)];
    const double sl = sig[p][static_cast<std::size_t>(l)];
    if (sk - sl < rep.min_difference_margin) { rep.min_difference_margin = sk - sl; rep.argmin_difference = p; }
    rep.min_quotient_margin = std::min(rep.min_quotient_margin, sk / sl - 1.0);
    rep.min_scalar_margin = std::min(rep.min_scalar_margin, scalar[p]);
  }
  rep.min_convexity_margin = *std::min_element(rep.min_sigma.begin(), rep.min_sigma.end());
  rep.passed = rep.min_convexity_margin >= -rep.tolerance && rep.min_difference_margin >= -rep.tolerance &&
               rep.min_quotient_margin >= -rep.tolerance && rep.min_scalar_margin >= -rep.tolerance;
  return rep;
}

struct FittedAsymptotics {
  AsymptoticForm predicted;
  double remainder_exponent = 0;                // slope of log|omega - leading| vs log s
  std::optional<double> log_coefficient;        // Cases 2-3: slope of (omega - s) vs ln s
  std::optional<double> power_exponent;         // Case4: slope of log(omega - s - mu) vs log s
  std::optional<double> power_coefficient;      // Case4: exp(intercept) of that fit
  bool insufficient_decay = false;              // fitted remainder exponent >= 0
};

/// Log-log fits of omega_alpha against its predicted expansion.
inline FittedAsymptotics fit_asymptotics(const GSymProfile& prof, std::span<const double> s_samples) {
  if (s_samples.size() < 3) throw argument_error("fit_asymptotics: need at least 3 samples");
  const auto [mn, mx] = std::minmax_element(s_samples.begin(), s_samples.end());
  if (*mx < 1e3 * std::max(*mn, prof.s_bar())) {
    throw argument_error("fit_asymptotics: samples must span >= 3 decades beyond s_bar");
  }
  FittedAsymptotics out;
  out.predicted = mu(prof);
  const auto& form = out.predicted;
  const auto wl = prof.omega_minus_linear(s_samples);  // omega - s
  std::vector<double> rem(s_samples.size()), ls(s_samples.size());
  for (std::size_t i = 0; i < s_samples.size(); ++i) {
    rem[i] = wl[i] - form.growth_term(s_samples[i]) - form.mu;
    ls[i] = std::log(s_samples[i]);
  }
  out.remainder_exponent = fit_log_log(s_samples, rem).slope;
  out.insufficient_decay = !(out.remainder_exponent < 0);
  if (form.log_coefficient) {
    out.log_coefficient = fit_line(ls, wl).slope;
  }
  if (form.power_exponent) {
    std::vector<double> z(s_samples.size());
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = wl[i] - form.mu;
    const auto f = fit_log_log(s_samples, z);
    out.power_exponent = f.slope;
    out.power_coefficient = std::exp(f.intercept);
  }
  return out;
}

}  // namespace hessq
