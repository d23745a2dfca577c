#pragma once

// Garding-cone membership, the matrix class A_{k,l} = {A > 0 : sigma_k(A) = sigma_l(A)},
// the extremal ratios H_k / h_l, and the four-way asymptotic classification.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hessq/errors.hpp"
#include "hessq/symfunc.hpp"

namespace hessq {

namespace tolerance {
/// |sigma_k - sigma_l| <= membership_rel * sigma_k for class membership.
inline constexpr double membership_rel = 1e-9;
/// Half-width of the H_k - h_l = 1/2 band treated as the Case3 boundary.
inline constexpr double case_boundary = 1e-10;
/// Relative symmetry tolerance for matrix inputs.
inline constexpr double symmetry_rel = 1e-12;
}  // namespace tolerance

enum class AsymptoticCase { Case1, Case2, Case3, Case4 };

inline std::string_view to_string(AsymptoticCase c) {
  switch (c) {
    case AsymptoticCase::Case1: return "Case1";
    case AsymptoticCase::Case2: return "Case2";
    case AsymptoticCase::Case3: return "Case3";
    case AsymptoticCase::Case4: return "Case4";
  }
  return "?";
}

inline void check_orders(int n, int k, int l) {
  if (l < 0 || l >= k || k > n) {
    throw argument_error("need 0 <= l < k <= n, got n=" + std::to_string(n) + " k=" +
                         std::to_string(k) + " l=" + std::to_string(l));
  }
}

/// lambda in Gamma_k, i.e. sigma_j(lambda) > 0 for j = 1..k.
inline bool in_gamma_k(std::span<const double> lambda, int k) {
  const int n = static_cast<int>(lambda.size());
  if (k < 1 || k > n) throw range_error("in_gamma_k: k outside 1..n");
  const auto e = detail::sigma_prefix(lambda, k);
  for (int j = 1; j <= k; ++j)
    if (!(e[static_cast<std::size_t>(j)] > 0.0)) return false;
  return true;
}

inline bool in_gamma_k(const std::vector<double>& lambda, int k) {
  return in_gamma_k(std::span<const double>(lambda), k);
}

/// Eigenvalues of a symmetric matrix, ascending. Throws on asymmetric input.
inline std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw argument_error("matrix is not square");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > tolerance::symmetry_rel * scale) {
    throw argument_error("matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(M, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw numeric_error("symmetric eigensolve failed");
  const Eigen::VectorXd& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// lambda(M) in the closure of Gamma_k, with sigma_j >= -1e-10 (1 + |M|).
inline bool is_k_convex_matrix(const Eigen::MatrixXd& M, int k) {
  const auto lambda = symmetric_eigenvalues(M);
  const int n = static_cast<int>(lambda.size());
  if (k < 1 || k > n) throw range_error("is_k_convex_matrix: k outside 1..n");
  const double tol = 1e-10 * (1.0 + M.norm());
  const auto e = detail::sigma_prefix<double>(lambda, k);
  for (int j = 1; j <= k; ++j)
    if (e[static_cast<std::size_t>(j)] < -tol) return false;
  return true;
}

/// sigma_k(lambda(M)) / sigma_l(lambda(M)) for a symmetric matrix.
inline double hessian_quotient(const Eigen::MatrixXd& M, int k, int l) {
  const auto lambda = symmetric_eigenvalues(M);
  const auto e = sigma_all<double>(lambda);
  return e[static_cast<std::size_t>(k)] / e[static_cast<std::size_t>(l)];
}

template <class T>
struct BasicExtremalRatios {
  T H;                  // max_i sigma_{k-1;i} a_i / sigma_k
  T h;                  // min_i sigma_{l-1;i} a_i / sigma_l  (0 when l = 0)
  std::size_t argmax;   // lowest index attaining H
  std::size_t argmin;   // lowest index attaining h
};

using ExtremalRatios = BasicExtremalRatios<double>;

namespace detail {

template <class T>
bool close(const T& a, const T& b) {
  if constexpr (std::is_floating_point_v<T>) {
    return std::abs(a - b) <= 1e-12 * std::max({T(1), std::abs(a), std::abs(b)});
  } else {
    return a == b;
  }
}

}  // namespace detail

/// H_k and h_l evaluated over every index. For a sorted positive spectrum the
/// extremes sit at the last and first index respectively; that is checked.
template <class T>
BasicExtremalRatios<T> extremal_ratios(const BasicSpectrum<T>& a, int k, int l) {
  const int n = a.n();
  check_orders(n, k, l);
  if (!a.is_positive()) throw argument_error("extremal_ratios: spectrum must be positive");
  const auto vals = a.entries();
  const T sk = sigma(k, vals);
  const T sl = sigma(l, vals);
  BasicExtremalRatios<T> r{T(0), T(0), 0, 0};
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t ex[] = {i};
    const T ratio_k = sigma_restricted<T>(k - 1, vals, ex) * vals[i] / sk;
    const T ratio_l = l == 0 ? T(0) : sigma_restricted<T>(l - 1, vals, ex) * vals[i] / sl;
    if (i == 0 || ratio_k > r.H) { r.H = ratio_k; r.argmax = i; }
    if (i == 0 || ratio_l < r.h) { r.h = ratio_l; r.argmin = i; }
  }
  const std::size_t last = a.size() - 1;
  const std::size_t ex_last[] = {last};
  const std::size_t ex_first[] = {0};
  const T at_last = sigma_restricted<T>(k - 1, vals, ex_last) * vals[last] / sk;
  const T at_first = l == 0 ? T(0) : sigma_restricted<T>(l - 1, vals, ex_first) * vals[0] / sl;
  if (!detail::close(at_last, r.H) || !detail::close(at_first, r.h)) {
    throw numeric_error("extremal_ratios: sorted-spectrum extremes not at the ends");
  }
  return r;
}

/// A positive spectrum in A_{k,l} together with everything derived from it.
struct AdmissiblePair {
  Spectrum spectrum;
  int k = 0;
  int l = 0;
  double sigma_value = 0;   // the common value sigma_k(a) = sigma_l(a)
  double H = 0;             // H_k
  double h = 0;             // h_l
  double script_H = 0;      // (k - l) / (2 (H - h))
  AsymptoticCase case_tag = AsymptoticCase::Case1;
  bool exact = false;       // H, h and the case decided in exact arithmetic
  bool near_case_boundary = false;

  int n() const noexcept { return spectrum.n(); }
  int order_gap() const noexcept { return k - l; }
  double gap() const noexcept { return H - h; }
  const std::vector<double>& a() const noexcept { return spectrum.values(); }
};

/// Why a spectrum is not in A_{k,l}, and the rescaling that would put it there.
struct ClassRejection {
  double sigma_k = 0;
  double sigma_l = 0;
  double scale_factor = 0;  // t with t * a in A_{k,l}
};

/// Case tag from (n, k, l) and H_k - h_l.
inline AsymptoticCase classify_case(int n, int k, int l, double gap) {
  if (n == 2 && k == 2 && l == 0) return AsymptoticCase::Case2;
  if (k - l == 1) {
    if (std::abs(gap - 0.5) <= tolerance::case_boundary) return AsymptoticCase::Case3;
    return gap > 0.5 ? AsymptoticCase::Case4 : AsymptoticCase::Case1;
  }
  if (gap < 0.5 * (k - l)) return AsymptoticCase::Case1;
  throw numeric_error("H_k - h_l >= (k-l)/2 with k-l >= 2 outside (n,k,l) = (2,2,0)", gap);
}

namespace detail {

inline AdmissiblePair finish_pair(Spectrum spectrum, int k, int l, double sigma_value, double H,
                                  double h, std::optional<AsymptoticCase> exact_case) {
  AdmissiblePair p;
  p.spectrum = std::move(spectrum);
  p.k = k;
  p.l = l;
  p.sigma_value = sigma_value;
  p.H = H;
  p.h = h;
  const double gap = H - h;
  const int n = p.spectrum.n();
  const double lo = static_cast<double>(k - l) / n;
  if (gap < lo * (1 - 1e-12) - 1e-14 || gap > 1 + 1e-12) {
    throw numeric_error("H_k - h_l outside [(k-l)/n, 1]", gap);
  }
  p.script_H = (k - l) / (2.0 * gap);
  p.exact = exact_case.has_value();
  p.case_tag = exact_case ? *exact_case : classify_case(n, k, l, gap);
  p.near_case_boundary =
      !p.exact && k - l == 1 && std::abs(gap - 0.5) < 10 * tolerance::case_boundary;
  return p;
}

}  // namespace detail

/// Builds the AdmissiblePair, or explains the rejection when sigma_k != sigma_l.
inline std::variant<AdmissiblePair, ClassRejection> membership(const Spectrum& a, int k, int l) {
  check_orders(a.n(), k, l);
  if (!a.is_positive()) throw argument_error("membership: spectrum must be positive");
  const double sk = sigma(k, a);
  const double sl = sigma(l, a);
  if (std::abs(sk - sl) > tolerance::membership_rel * sk) {
    return ClassRejection{sk, sl, std::pow(sl / sk, 1.0 / (k - l))};
  }
  const auto r = extremal_ratios(a, k, l);
  return detail::finish_pair(a, k, l, sk, r.H, r.h, std::nullopt);
}

/// Exact path: when sigma_k = sigma_l holds exactly in rationals, H_k, h_l and
/// the case (including the Case3 boundary) are decided exactly. Otherwise it
/// falls back to the floating-point tolerance test.
inline std::variant<AdmissiblePair, ClassRejection> membership(const ExactSpectrum& a, int k,
                                                               int l) {
  check_orders(a.n(), k, l);
  if (!a.is_positive()) throw argument_error("membership: spectrum must be positive");
  const Rational sk = sigma(k, a);
  const Rational sl = sigma(l, a);
  if (sk != sl) return membership(to_double(a), k, l);
  const auto r = extremal_ratios(a, k, l);
  const Rational gap = r.H - r.h;
  AsymptoticCase tag;
  const int n = a.n();
  if (n == 2 && k == 2 && l == 0) {
    tag = AsymptoticCase::Case2;
  } else if (k - l == 1) {
    const Rational half(1, 2);
    tag = gap == half ? AsymptoticCase::Case3
                      : (gap > half ? AsymptoticCase::Case4 : AsymptoticCase::Case1);
  } else {
    tag = AsymptoticCase::Case1;
  }
  return detail::finish_pair(to_double(a), k, l, to_double(sk), to_double(r.H), to_double(r.h),
                             tag);
}

class not_in_class_error : public argument_error {
 public:
  explicit not_in_class_error(const ClassRejection& r)
      : argument_error("spectrum is not in A_{k,l}: sigma_k=" + std::to_string(r.sigma_k) +
                       " sigma_l=" + std::to_string(r.sigma_l) +
                       " (rescale by t=" + std::to_string(r.scale_factor) + ")"),
        rejection_(r) {}
  const ClassRejection& rejection() const noexcept { return rejection_; }

 private:
  ClassRejection rejection_;
};

/// membership() that throws not_in_class_error instead of returning a rejection.
template <class S>
AdmissiblePair classify(const S& a, int k, int l) {
  auto m = membership(a, k, l);
  if (auto* rej = std::get_if<ClassRejection>(&m)) throw not_in_class_error(*rej);
  return std::get<AdmissiblePair>(std::move(m));
}

struct Normalized {
  double t = 1;
  Spectrum scaled;
};

/// The unique t > 0 with t * a in A_{k,l}: t = (sigma_l / sigma_k)^{1/(k-l)}.
inline Normalized normalize_to_class(const Spectrum& a, int k, int l) {
  check_orders(a.n(), k, l);
  if (!a.is_positive()) throw argument_error("normalize_to_class: spectrum must be positive");
  const double t = std::pow(sigma(l, a) / sigma(k, a), 1.0 / (k - l));
  return {t, a.scaled(t)};
}

struct ExactNormalized {
  Rational t;
  ExactSpectrum scaled;
};

/// Exact normalization when k - l = 1 (the root is then rational).
inline std::optional<ExactNormalized> normalize_to_class_exact(const ExactSpectrum& a, int k, int l) {
  check_orders(a.n(), k, l);
  if (k - l != 1) return std::nullopt;
  const Rational t = sigma(l, a) / sigma(k, a);
  return ExactNormalized{t, a.scaled(t)};
}

struct RigidityWitness {
  std::size_t i = 0;
  std::size_t j = 0;
  double ratio = 0;                   // sigma_{k-1;ij} / sigma_{l-1;ij}, +inf if l = 0
  std::optional<double> forced_slope;  // the constant w' the ratio forces, if any
};

struct RigidityReport {
  bool nonlinear_possible = false;
  bool isotropic = false;
  std::vector<RigidityWitness> witnesses;
  std::string verdict() const { return nonlinear_possible ? "possible" : "obstructed"; }
};

/// Whether a G-Sym solution with w'' != 0 can exist for this pair. For each
/// pair of distinct eigenvalues the ratio sigma_{k-1;ij}/sigma_{l-1;ij} would
/// have to equal (w')^{l-k}, pinning w' to a constant.
inline RigidityReport rigidity_report(const AdmissiblePair& pair) {
  RigidityReport rep;
  const auto& a = pair.a();
  const int n = pair.n();
  const double cs = c_star(n, pair.k, pair.l);
  rep.isotropic = std::all_of(a.begin(), a.end(),
                              [&](double x) { return std::abs(x - cs) <= 1e-10 * cs; });
  rep.nonlinear_possible = (pair.l == 0 && pair.k == n) || rep.isotropic;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (std::abs(a[i] - a[j]) <= 1e-10 * std::max(a[i], a[j])) continue;
      const std::size_t ex[] = {i, j};
      const double num = sigma_restricted<double>(pair.k - 1, a, ex);
      const double den = sigma_restricted<double>(pair.l - 1, a, ex);
      RigidityWitness w{i, j, 0.0, std::nullopt};
      if (den == 0.0) {
        w.ratio = std::numeric_limits<double>::infinity();
      } else {
        w.ratio = num / den;
        if (w.ratio > 0) w.forced_slope = std::pow(w.ratio, 1.0 / (pair.l - pair.k));
      }
      rep.witnesses.push_back(w);
    }
  }
  return rep;
}

}  // namespace hessq
