#pragma once

// Independent reference implementations used as test oracles. None of these
// call into the library's numerical kernels.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "hessq/admissibility.hpp"

namespace hessq::testing {

/// sigma_k by enumerating all k-subsets (bitmask walk).
inline long double brute_sigma(int k, const std::vector<double>& a) {
  const int n = static_cast<int>(a.size());
  long double total = 0;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    long double prod = 1;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) prod *= a[static_cast<std::size_t>(i)];
    total += prod;
  }
  return total;
}

inline long double brute_sigma_without(int k, const std::vector<double>& a, std::vector<int> drop) {
  if (k < 0) return 0;
  std::vector<double> r;
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    if (std::find(drop.begin(), drop.end(), i) == drop.end()) r.push_back(a[static_cast<std::size_t>(i)]);
  if (k > static_cast<int>(r.size())) return 0;
  return brute_sigma(k, r);
}

inline std::vector<double> random_positive(int n, std::mt19937_64& rng, double lo = 0.1, double hi = 10.0) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  std::vector<double> a(static_cast<std::size_t>(n));
  for (auto& x : a) x = std::exp(u(rng));
  return a;
}

/// A random spectrum rescaled into A_{k,l}.
inline AdmissiblePair random_pair(int n, int k, int l, std::mt19937_64& rng, double spread = 10.0) {
  for (;;) {
    auto a = random_positive(n, rng, 1.0, spread);
    auto norm = normalize_to_class(Spectrum(a), k, l);
    auto m = membership(norm.scaled, k, l);
    if (auto* p = std::get_if<AdmissiblePair>(&m)) {
      if (!p->near_case_boundary) return *p;
    }
  }
}

/// Root v > 1 of (v^d - 1) v^p = R: Newton in long double on the raw
/// polynomial form, falling back to bisection whenever a step leaves the bracket.
inline long double bisect_v(int d, long double p, long double R) {
  if (R == 0) return 1;
  long double lo = 1, hi = std::pow(1 + R, 1.0L / d) + 1;
  long double v = 0.5L * (lo + hi);
  for (int i = 0; i < 400; ++i) {
    const long double vd = std::pow(v, d), vp = std::pow(v, p);
    const long double f = (vd - 1) * vp - R;
    if (f == 0) return v;
    (f < 0 ? lo : hi) = v;
    const long double df = d * vd / v * vp + (vd - 1) * p * vp / v;
    long double next = v - f / df;
    if (!(next > lo && next < hi)) next = 0.5L * (lo + hi);
    if (std::abs(next - v) <= 1e-19L * v) return next;
    v = next;
  }
  return v;
}

inline long double oracle_v(const AdmissiblePair& pair, double alpha, double s) {
  const long double sH = pair.script_H;
  return bisect_v(pair.k - pair.l, 2 * sH * pair.h, alpha * std::pow(static_cast<long double>(s), -sH));
}

/// int_{s0}^{s0 + ds} v by 10-point Gauss-Legendre on the short interval.
inline double local_integral(const AdmissiblePair& pair, double alpha, double s0, double ds) {
  auto f = [&](double t) { return static_cast<double>(oracle_v(pair, alpha, s0 + t)); };
  return boost::math::quadrature::gauss<double, 10>::integrate(f, 0.0, ds);
}

/// Hessian of omega(x^T A x / 2) by central differences, where every
/// difference of omega is a local integral of v between nearby levels.
inline Eigen::MatrixXd fd_hessian(const AdmissiblePair& pair, double alpha, const Eigen::VectorXd& x) {
  const int n = pair.n();
  const auto& a = pair.a();
  const double h = 1e-4 * (1.0 + x.norm());
  auto level_diff = [&](const Eigen::VectorXd& y) {
    double s = 0;
    for (int i = 0; i < n; ++i) s += 0.5 * a[static_cast<std::size_t>(i)] * (y[i] - x[i]) * (y[i] + x[i]);
    return s;
  };
  double s0 = 0;
  for (int i = 0; i < n; ++i) s0 += 0.5 * a[static_cast<std::size_t>(i)] * x[i] * x[i];
  auto dw = [&](const Eigen::VectorXd& y) { return local_integral(pair, alpha, s0, level_diff(y)); };
  Eigen::MatrixXd H(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(n), ej = Eigen::VectorXd::Zero(n);
      ei[i] = h;
      ej[j] = h;
      double v;
      if (i == j) {
        v = (dw(x + ei) + dw(x - ei)) / (h * h);
      } else {
        v = (dw(x + ei + ej) - dw(x + ei - ej) - dw(x - ei + ej) + dw(x - ei - ej)) / (4 * h * h);
      }
      H(i, j) = H(j, i) = v;
    }
  }
  return H;
}

}  // namespace hessq::testing
