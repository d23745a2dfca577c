#pragma once

// Elementary symmetric polynomials sigma_k, their index-restricted variants
// sigma_{k;i1..it}, and the isotropic normalization constant c*(k,l).
//
// Everything here is templated on the scalar type so the same code runs on
// double and on exact rationals (see Rational below).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "hessq/errors.hpp"

namespace hessq {

using Rational = boost::multiprecision::cpp_rational;

/// Eigenvalues a_1 <= ... <= a_n of a diagonal matrix.
///
/// Entries are sorted on construction; ties keep their original order, and
/// original_index(i) gives the input position of sorted entry i. Indices are
/// zero-based throughout the library.
template <class T>
class BasicSpectrum {
 public:
  BasicSpectrum() = default;

  explicit BasicSpectrum(std::vector<T> values) {
    if (values.size() < 2) {
      throw argument_error("spectrum needs at least two eigenvalues");
    }
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    entries_.reserve(values.size());
    for (auto i : order) entries_.push_back(values[i]);
    original_index_ = std::move(order);
  }

  int n() const noexcept { return static_cast<int>(entries_.size()); }
  std::size_t size() const noexcept { return entries_.size(); }
  const T& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const T> entries() const noexcept { return entries_; }
  const std::vector<T>& values() const noexcept { return entries_; }
  std::size_t original_index(std::size_t i) const { return original_index_[i]; }

  bool is_positive() const {
    return std::all_of(entries_.begin(), entries_.end(), [](const T& x) { return x > 0; });
  }

  bool is_isotropic() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [&](const T& x) { return x == entries_.front(); });
  }

  /// Adopts entries that are already sorted, with their original positions.
  static BasicSpectrum from_sorted(std::vector<T> sorted, std::vector<std::size_t> original_index) {
    BasicSpectrum s;
    s.entries_ = std::move(sorted);
    s.original_index_ = std::move(original_index);
    return s;
  }

  template <class F>
  BasicSpectrum scaled(const F& t) const {
    std::vector<T> out(entries_);
    for (auto& x : out) x *= t;
    BasicSpectrum s;
    s.entries_ = std::move(out);
    s.original_index_ = original_index_;
    return s;
  }

 private:
  std::vector<T> entries_;
  std::vector<std::size_t> original_index_;
};

using Spectrum = BasicSpectrum<double>;
using ExactSpectrum = BasicSpectrum<Rational>;

namespace detail {

// sigma_0..sigma_kmax of `a` by the one-pass prefix recurrence
//   e_j <- e_j + x * e_{j-1}   (j descending),
// which involves only additions of like-signed terms for positive input.
template <class T>
std::vector<T> sigma_prefix(std::span<const T> a, int kmax) {
  std::vector<T> e(static_cast<std::size_t>(kmax) + 1, T(0));
  e[0] = T(1);
  int seen = 0;
  for (const T& x : a) {
    ++seen;
    for (int j = std::min(seen, kmax); j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e;
}

}  // namespace detail

/// sigma_k(a); sigma_0 = 1 and sigma_n = prod(a). O(n k).
template <class T>
T sigma(int k, std::span<const T> a) {
  const int n = static_cast<int>(a.size());
  if (k < 0 || k > n) {
    throw range_error("sigma: order " + std::to_string(k) + " outside 0.." + std::to_string(n));
  }
  return detail::sigma_prefix(a, k)[static_cast<std::size_t>(k)];
}

template <class T>
T sigma(int k, const BasicSpectrum<T>& a) {
  return sigma(k, a.entries());
}

template <class T>
T sigma(int k, const std::vector<T>& a) {
  return sigma(k, std::span<const T>(a));
}

/// All of sigma_0..sigma_n in one pass.
template <class T>
std::vector<T> sigma_all(std::span<const T> a) {
  return detail::sigma_prefix(a, static_cast<int>(a.size()));
}

/// sigma_k with the entries at `excluded` set to zero, evaluated on the
/// reduced spectrum. Returns 0 when k < 0 or k exceeds the reduced length
/// (so sigma_{-1;i} = 0, which makes h_0 = 0 fall out naturally).
template <class T>
T sigma_restricted(int k, std::span<const T> a, std::span<const std::size_t> excluded) {
  const std::size_t n = a.size();
  std::vector<bool> drop(n, false);
  for (auto i : excluded) {
    if (i >= n) throw argument_error("sigma_restricted: index " + std::to_string(i) + " out of range");
    if (drop[i]) throw argument_error("sigma_restricted: duplicate index " + std::to_string(i));
    drop[i] = true;
  }
  const int remaining = static_cast<int>(n - excluded.size());
  if (k < 0 || k > remaining) return T(0);
  std::vector<T> reduced;
  reduced.reserve(static_cast<std::size_t>(remaining));
  for (std::size_t i = 0; i < n; ++i)
    if (!drop[i]) reduced.push_back(a[i]);
  return detail::sigma_prefix<T>(reduced, k)[static_cast<std::size_t>(k)];
}

template <class T>
T sigma_restricted(int k, const BasicSpectrum<T>& a, std::initializer_list<std::size_t> excluded) {
  std::vector<std::size_t> ex(excluded);
  return sigma_restricted<T>(k, a.entries(), ex);
}

template <class T>
T sigma_restricted(int k, std::span<const T> a, std::initializer_list<std::size_t> excluded) {
  std::vector<std::size_t> ex(excluded);
  return sigma_restricted<T>(k, a, ex);
}

template <class T>
T sigma_restricted(int k, const std::vector<T>& a, std::span<const std::size_t> excluded) {
  return sigma_restricted<T>(k, std::span<const T>(a), excluded);
}

/// Exact binomial coefficient C(n, k).
inline std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  }
  return r;
}

/// c*(k,l) = (C_n^l / C_n^k)^{1/(k-l)}, the unique t with t*I in the class A_{k,l}.
inline double c_star(int n, int k, int l) {
  if (l < 0 || k > n || n < 1) throw argument_error("c_star: need 0 <= l < k <= n");
  if (l >= k) throw argument_error("c_star: need l < k");
  const double ratio = static_cast<double>(binomial(n, l)) / static_cast<double>(binomial(n, k));
  return std::pow(ratio, 1.0 / static_cast<double>(k - l));
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline Spectrum to_double(const ExactSpectrum& s) {
  std::vector<double> v;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < s.size(); ++i) {
    v.push_back(to_double(s[i]));
    idx.push_back(s.original_index(i));
  }
  // Conversion is monotone, so the sorted order carries over.
  return Spectrum::from_sorted(std::move(v), std::move(idx));
}

}  // namespace hessq
