#pragma once

// Seeded point generators for grids and spot checks. All draws go through
// std::mt19937_64 so a given seed reproduces the same points on every run.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace hessq {

inline Eigen::VectorXd random_unit_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd v(n);
  do {
    for (int i = 0; i < n; ++i) v[i] = g(rng);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

/// Points on E(s_lo..s_hi) = {s_lo <= x^T A x / 2 <= s_hi}, uniform in log s
/// and uniform in direction before the A-scaling.
inline std::vector<Eigen::VectorXd> annulus_samples(const std::vector<double>& a, double s_lo, double s_hi,
                                                    std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(std::log(s_lo), std::log(s_hi));
  const int n = static_cast<int>(a.size());
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double s = std::exp(u(rng));
    Eigen::VectorXd z = random_unit_vector(n, rng);
    for (int j = 0; j < n; ++j) z[j] *= std::sqrt(2.0 * s / a[static_cast<std::size_t>(j)]);
    out.push_back(z);
  }
  return out;
}

/// Points in the Euclidean shell r_lo <= |x| <= r_hi, uniform in log r.
inline std::vector<Eigen::VectorXd> shell_samples(int n, double r_lo, double r_hi, std::size_t count,
                                                  std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(std::log(r_lo), std::log(r_hi));
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = std::exp(u(rng));
    out.push_back(r * random_unit_vector(n, rng));
  }
  return out;
}

}  // namespace hessq
