#pragma once

// Sub/supersolution scaffolding for the exterior Dirichlet problem
//   S_{k,l}(D^2 u) = 1 outside D,  u = phi on dD,  u ~ x^T A x / 2 + c.
//
// Coordinates are those of the pair's sorted eigenbasis, so A = diag(a).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hessq/admissibility.hpp"
#include "hessq/errors.hpp"
#include "hessq/fit.hpp"
#include "hessq/parallel.hpp"
#include "hessq/quadratic.hpp"
#include "hessq/sampling.hpp"
#include "hessq/subsolution.hpp"

namespace hessq {

/// A bounded strictly convex open set given by a level function (negative inside).
class ConvexDomain {
 public:
  enum class Kind { Ellipsoid, LevelSet };

  /// {(x - x0)^T Q (x - x0) < 1}, Q symmetric positive definite.
  static ConvexDomain ellipsoid(Eigen::VectorXd center, Eigen::MatrixXd Q) {
    if (Q.rows() != center.size() || Q.cols() != center.size()) throw argument_error("ellipsoid: bad sizes");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    if (!(es.eigenvalues().minCoeff() > 0)) throw argument_error("ellipsoid: Q must be positive definite");
    ConvexDomain d;
    d.kind_ = Kind::Ellipsoid;
    d.center_ = std::move(center);
    d.Q_ = std::move(Q);
    d.sqrt_Q_inv_ = es.operatorInverseSqrt();
    d.lambda_max_ = es.eigenvalues().maxCoeff();
    return d;
  }

  static ConvexDomain ball(Eigen::VectorXd center, double radius) {
    if (!(radius > 0)) throw argument_error("ball: radius must be positive");
    const auto n = center.size();
    return ellipsoid(std::move(center), Eigen::MatrixXd::Identity(n, n) / (radius * radius));
  }

  /// A user level set F < 0 with gradient, star-shaped about `interior`,
  /// contained in the ball of radius `bound` around it.
  static ConvexDomain level_set(std::function<double(const Eigen::VectorXd&)> F,
                                std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad,
                                Eigen::VectorXd interior, double bound) {
    if (!(F(interior) < 0)) throw argument_error("level_set: interior point is not inside");
    ConvexDomain d;
    d.kind_ = Kind::LevelSet;
    d.F_ = std::move(F);
    d.grad_ = std::move(grad);
    d.center_ = std::move(interior);
    d.bound_ = bound;
    return d;
  }

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(center_.size()); }
  const Eigen::VectorXd& center() const { return center_; }
  const Eigen::MatrixXd& Q() const { return Q_; }

  double level(const Eigen::VectorXd& x) const {
    if (kind_ == Kind::Ellipsoid) {
      const Eigen::VectorXd d = x - center_;
      return d.dot(Q_ * d) - 1.0;
    }
    return F_(x);
  }
  bool contains(const Eigen::VectorXd& x) const { return level(x) < 0; }

  Eigen::VectorXd outward_normal(const Eigen::VectorXd& x) const {
    Eigen::VectorXd g = kind_ == Kind::Ellipsoid ? Eigen::VectorXd(2.0 * Q_ * (x - center_)) : grad_(x);
    const double nrm = g.norm();
    if (!(nrm > 0)) throw numeric_error("outward_normal: vanishing gradient");
    return g / nrm;
  }

  /// The boundary point on the ray from the centre in direction u.
  Eigen::VectorXd boundary_point(const Eigen::VectorXd& u) const {
    if (kind_ == Kind::Ellipsoid) return center_ + u / std::sqrt(u.dot(Q_ * u));
    double lo = 0, hi = bound_;
    if (F_(center_ + hi * u) < 0) throw argument_error("level_set: bound does not enclose the domain");
    for (int i = 0; i < 200 && hi - lo > 1e-15 * bound_; ++i) {
      const double mid = 0.5 * (lo + hi);
      (F_(center_ + mid * u) < 0 ? lo : hi) = mid;
    }
    return center_ + 0.5 * (lo + hi) * u;
  }

  /// Boundary samples. Ellipsoids are sampled by surface area, level sets by
  /// radial projection of uniform directions.
  std::vector<Eigen::VectorXd> boundary_samples(std::size_t count, std::uint64_t seed) const {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    while (out.size() < count) {
      const Eigen::VectorXd z = random_unit_vector(dim(), rng);
      if (kind_ == Kind::Ellipsoid) {
        // x = x0 + Q^{-1/2} z has area density proportional to |Q^{1/2} z|.
        const Eigen::VectorXd x = sqrt_Q_inv_ * z;
        if (U(rng) * std::sqrt(lambda_max_) > std::sqrt(z.dot(Q_ * z))) continue;
        out.push_back(center_ + x);
      } else {
        out.push_back(boundary_point(z));
      }
    }
    return out;
  }

  /// Radius of a centred ball containing the domain.
  double bounding_radius() const {
    if (kind_ == Kind::Ellipsoid) return 1.0 / std::sqrt(Q_.selfadjointView<Eigen::Lower>().eigenvalues().minCoeff());
    return bound_;
  }

 private:
  Kind kind_ = Kind::Ellipsoid;
  Eigen::VectorXd center_;
  Eigen::MatrixXd Q_;
  Eigen::MatrixXd sqrt_Q_inv_;
  double lambda_max_ = 1;
  double bound_ = 0;
  std::function<double(const Eigen::VectorXd&)> F_;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad_;
};

/// E(s) = {x^T A x / 2 < s}.
struct EllipsoidDomain {
  AdmissiblePair pair;
  double s_level = 1;

  EllipsoidDomain(AdmissiblePair p, double s) : pair(std::move(p)), s_level(s) {
    if (!(s_level > 0)) throw argument_error("EllipsoidDomain: s must be positive");
  }
  ConvexDomain domain() const {
    const int n = pair.n();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) Q(i, i) = pair.a()[static_cast<std::size_t>(i)] / (2.0 * s_level);
    return ConvexDomain::ellipsoid(Eigen::VectorXd::Zero(n), Q);
  }
  std::vector<Eigen::VectorXd> boundary_samples(std::size_t count, std::uint64_t seed) const {
    return domain().boundary_samples(count, seed);
  }
};

/// w_xi(x) = phi(xi) + (x - xi)^T A (x - xi) / 2 + (x - xi) . p, p = A (xi - x_bar).
/// Each w_xi solves S_{k,l}(D^2 w) = 1 exactly since D^2 w = A.
struct Barrier {
  Eigen::VectorXd xi;
  Eigen::VectorXd x_bar;
  Eigen::VectorXd p;
  Eigen::VectorXd a;
  double phi_xi = 0;
  double t = 0;
  double margin = 0;  // min over boundary samples outside the cap of phi - w_xi

  double operator()(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd d = x - xi;
    return phi_xi + 0.5 * d.dot(a.cwiseProduct(d)) + d.dot(p);
  }
  /// Unconstrained minimum, attained at x_bar.
  double minimum() const { return phi_xi - 0.5 * p.dot(p.cwiseQuotient(a)); }
};

struct BarrierOptions {
  double cap = 1e-3;
  double t_max = 65536;
};

/// x_bar = xi - A^{-1} (g_T + t nu) with g_T the tangential part of D phi(xi)
/// and nu the outward normal, over t = 1, 2, 4, ... until w_xi < phi on every
/// boundary sample farther than `cap` from xi.
inline Barrier make_barrier(const Eigen::VectorXd& xi, const QuadraticData& phi, const Eigen::VectorXd& a,
                            const ConvexDomain& D, const std::vector<Eigen::VectorXd>& boundary,
                            BarrierOptions opt = {}) {
  const Eigen::VectorXd nu = D.outward_normal(xi);
  const Eigen::VectorXd g = phi.gradient(xi);
  const Eigen::VectorXd gT = g - g.dot(nu) * nu;
  Barrier b;
  b.xi = xi;
  b.a = a;
  b.phi_xi = phi(xi);
  double last = -std::numeric_limits<double>::infinity();
  for (double t = 1; t <= opt.t_max; t *= 2) {
    b.t = t;
    b.p = gT + t * nu;
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& x : boundary) {
      if ((x - xi).norm() <= opt.cap) continue;
      margin = std::min(margin, phi(x) - b(x));
      if (margin <= 0) break;
    }
    last = margin;
    if (margin > 0) {
      b.margin = margin;
      b.x_bar = xi - b.p.cwiseQuotient(a);
      return b;
    }
  }
  throw numeric_error("make_barrier: no t up to t_max separates w_xi from phi", last);
}

struct EnvelopeValue {
  double value;
  std::size_t index;
};

/// underline-w(x) = max over barriers of w_xi(x).
inline EnvelopeValue lower_envelope(const std::vector<Barrier>& barriers, const Eigen::VectorXd& x) {
  if (barriers.empty()) throw argument_error("lower_envelope: no barriers");
  EnvelopeValue e{barriers[0](x), 0};
  for (std::size_t i = 1; i < barriers.size(); ++i) {
    const double v = barriers[i](x);
    if (v > e.value) e = {v, i};
  }
  return e;
}

struct SandwichOptions {
  std::size_t boundary_samples = 2000;  // dD samples for barrier validation and maxima
  std::size_t barrier_count = 256;      // number of xi
  double s_bar_factor = 1.1;
  double s_hat_factor = 2.0;            // s_hat = factor * s_bar
  double safety = 1e-6;                 // relative margin added to sampled maxima
  std::uint64_t seed = 0;
};

/// Everything in the sandwich underline-u <= ubar = x^T A x / 2 + c.
struct Sandwich {
  AdmissiblePair pair;
  QuadraticData phi;
  std::optional<ConvexDomain> D;
  double c = 0;
  double s_bar = 0, s_hat = 0;
  double beta = 0;
  double b_hat = 0;        // max over dD of phi - x^T A x / 2
  double seam_max = 0;     // max over dE(s_hat) of underline-w
  double alpha_hat = 0;
  double alpha_c = 0;
  double c_star = 0;       // measured threshold
  std::vector<Barrier> barriers;
  std::optional<GSymProfile> profile;      // omega_{alpha(c)}
  std::optional<GSymProfile> hat_profile;  // omega_{alpha_hat}

  double level(const Eigen::VectorXd& x) const { return quadratic_level(pair, x); }
  double bar_u(const Eigen::VectorXd& x) const { return level(x) + c; }
  double underline_w(const Eigen::VectorXd& x) const { return lower_envelope(barriers, x).value; }
  double omega(const Eigen::VectorXd& x) const { return profile->omega(level(x)); }
  /// max(omega, underline-w) on E(s_hat) \ D, omega outside.
  double underline_u(const Eigen::VectorXd& x) const {
    const double s = level(x);
    const double w = profile->omega(s);
    return s < s_hat ? std::max(w, underline_w(x)) : w;
  }
};

namespace detail {

struct SandwichGeometry {
  double s_bar = 0, s_hat = 0, beta = 0, b_hat = 0, seam_max = 0;
  std::vector<Barrier> barriers;
};

inline SandwichGeometry sandwich_geometry(const AdmissiblePair& pair, const ConvexDomain& D,
                                          const QuadraticData& phi, const SandwichOptions& opt) {
  const int n = pair.n();
  if (D.dim() != n || phi.dim() != n) throw argument_error("sandwich: dimension mismatch");
  if (!D.contains(Eigen::VectorXd::Zero(n))) throw argument_error("sandwich: D must contain the origin");
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(pair.a().data(), n);
  SandwichGeometry g;
  const auto boundary = D.boundary_samples(opt.boundary_samples, opt.seed);
  double smax = 0;
  g.b_hat = -std::numeric_limits<double>::infinity();
  for (const auto& x : boundary) {
    const double s = quadratic_level(pair, x);
    smax = std::max(smax, s);
    g.b_hat = std::max(g.b_hat, phi(x) - s);
  }
  g.b_hat += opt.safety * (1.0 + std::abs(g.b_hat));
  g.s_bar = opt.s_bar_factor * smax;
  g.s_hat = opt.s_hat_factor * g.s_bar;
  const std::size_t stride = std::max<std::size_t>(1, boundary.size() / opt.barrier_count);
  std::vector<std::size_t> picks;
  for (std::size_t i = 0; i < boundary.size() && picks.size() < opt.barrier_count; i += stride) picks.push_back(i);
  g.barriers.resize(picks.size());
  parallel_for(picks.size(), [&](std::size_t j) {
    g.barriers[j] = make_barrier(boundary[picks[j]], phi, a, D, boundary);
  });
  // beta: a lower bound for underline-w on closure(E(s_bar)) \ D. Each w_xi is
  // bounded below by its unconstrained minimum, which needs no sampling.
  g.beta = std::numeric_limits<double>::infinity();
  for (const auto& b : g.barriers) g.beta = std::min(g.beta, b.minimum());
  // On dE(s_hat), w_xi = s_hat + [phi(xi) + xi^T A xi / 2 - xi . p] + x . q with
  // q = p - A xi, and an affine function peaks on the ellipsoid at
  // sqrt(2 s_hat q^T A^{-1} q). So the seam maximum is exact, not sampled.
  g.seam_max = -std::numeric_limits<double>::infinity();
  for (const auto& b : g.barriers) {
    const Eigen::VectorXd q = b.p - a.cwiseProduct(b.xi);
    const double peak = g.s_hat + b.phi_xi + 0.5 * b.xi.dot(a.cwiseProduct(b.xi)) - b.xi.dot(b.p) +
                        std::sqrt(2.0 * g.s_hat * q.dot(q.cwiseQuotient(a)));
    g.seam_max = std::max(g.seam_max, peak);
  }
  g.seam_max += opt.safety * (1.0 + std::abs(g.seam_max));
  return g;
}

/// Smallest alpha (to relative 1e-8, rounded up) with omega_alpha(s_hat) > target.
inline double alpha_for_seam(const AdmissiblePair& pair, double beta, double s_bar, double s_hat, double target) {
  auto value = [&](double a) { return GSymProfile(pair, a, beta, s_bar).omega(s_hat); };
  if (value(0) > target) return 0.0;
  double lo = 0, hi = 1;
  for (int i = 0; value(hi) <= target; ++i) {
    if (i > 200) throw numeric_error("alpha_for_seam: could not bracket", hi);
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1e-8 * hi) {
    const double mid = 0.5 * (lo + hi);
    (value(mid) > target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace detail

/// The measured threshold c* = max(b_hat, mu_1(alpha_hat)) for the given s_hat.
inline double measure_threshold(const AdmissiblePair& pair, const ConvexDomain& D, const QuadraticData& phi,
                                SandwichOptions opt = {}) {
  if (pair.case_tag != AsymptoticCase::Case1) {
    throw unsupported_case_error("measure_threshold: the quadratic supersolution controls only Case1");
  }
  const auto g = detail::sandwich_geometry(pair, D, phi, opt);
  const double ah = detail::alpha_for_seam(pair, g.beta, g.s_bar, g.s_hat, g.seam_max);
  return std::max(g.b_hat, mu(GSymProfile(pair, ah, g.beta, g.s_bar)).mu);
}

/// Assembles the sandwich for c above the measured threshold.
inline Sandwich build_sandwich(const AdmissiblePair& pair, const ConvexDomain& D, const QuadraticData& phi,
                               double c, SandwichOptions opt = {}) {
  if (pair.case_tag != AsymptoticCase::Case1) {
    throw unsupported_case_error(
        "build_sandwich: for Case2-4 the quadratic supersolution cannot control the subsolution at infinity");
  }
  const auto g = detail::sandwich_geometry(pair, D, phi, opt);
  Sandwich sw;
  sw.pair = pair;
  sw.phi = phi;
  sw.D = D;
  sw.c = c;
  sw.s_bar = g.s_bar;
  sw.s_hat = g.s_hat;
  sw.beta = g.beta;
  sw.b_hat = g.b_hat;
  sw.seam_max = g.seam_max;
  sw.barriers = g.barriers;
  sw.alpha_hat = detail::alpha_for_seam(pair, g.beta, g.s_bar, g.s_hat, g.seam_max);
  const double mu_hat = mu(GSymProfile(pair, sw.alpha_hat, g.beta, g.s_bar)).mu;
  sw.c_star = std::max({g.b_hat, mu_hat, g.beta - g.s_bar});
  if (!(c > sw.c_star)) throw threshold_error("build_sandwich: c must exceed the measured threshold", sw.c_star);
  sw.alpha_c = invert_mu(pair, c, g.beta, g.s_bar);
  // invert_mu meets mu = c only to 1e-9; never go below the seam value.
  sw.alpha_c = std::max(sw.alpha_c, sw.alpha_hat);
  sw.profile.emplace(pair, sw.alpha_c, g.beta, g.s_bar);
  sw.hat_profile.emplace(pair, sw.alpha_hat, g.beta, g.s_bar);
  return sw;
}

struct SandwichReport {
  double omega_below_beta = 0;      // min over E(s_bar)\D of beta - omega_{alpha(c)}
  double omega_above_seam = 0;      // min over dE(s_hat) of omega_{alpha(c)} - underline-w
  double hat_above_seam = 0;        // min over dE(s_hat) of omega_{alpha_hat} - underline-w
  double beta_below_w = 0;          // min over E(s_bar)\D of underline-w - beta
  double omega_below_bar_u = 0;     // min over R^n\D of ubar - omega_{alpha(c)}
  double underline_below_bar_u = 0; // min over R^n\D of ubar - underline-u
  double boundary_error = 0;        // max over dD of |underline-u - phi|
  double far_field_rate = 0;        // fitted exponent of ubar - underline-u in |x|
  double predicted_rate = 0;        // 2 - (k-l)/(H_k - h_l)
  std::size_t samples = 0;

  double min_margin() const {
    return std::min({omega_below_beta, omega_above_seam, hat_above_seam, beta_below_w, omega_below_bar_u,
                     underline_below_bar_u});
  }
};

namespace detail {

// Uniform points of E(s) \ D.
inline std::vector<Eigen::VectorXd> ellipsoid_shell_points(const AdmissiblePair& pair, const ConvexDomain& D,
                                                           double s, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int n = pair.n();
  std::vector<Eigen::VectorXd> out;
  out.reserve(count);
  for (std::size_t tries = 0; out.size() < count; ++tries) {
    if (tries > 1000 * count) throw numeric_error("ellipsoid_shell_points: rejection sampling stalled");
    Eigen::VectorXd z = random_unit_vector(n, rng) * std::pow(U(rng), 1.0 / n);
    for (int i = 0; i < n; ++i) z[i] *= std::sqrt(2.0 * s / pair.a()[static_cast<std::size_t>(i)]);
    if (!D.contains(z)) out.push_back(z);
  }
  return out;
}

}  // namespace detail

/// Samples the five orderings of the construction together with the boundary
/// identity and the far-field rate.
inline SandwichReport verify_sandwich(const Sandwich& sw, std::size_t samples, std::uint64_t seed) {
  SandwichReport rep;
  rep.samples = samples;
  const auto& pair = sw.pair;
  const auto& D = *sw.D;
  const double inf = std::numeric_limits<double>::infinity();
  rep.omega_below_beta = rep.beta_below_w = rep.omega_above_seam = rep.hat_above_seam = inf;
  rep.omega_below_bar_u = rep.underline_below_bar_u = inf;

  const auto inner = detail::ellipsoid_shell_points(pair, D, sw.s_bar, samples, seed);
  std::vector<double> m1(inner.size()), m3(inner.size());
  parallel_for(inner.size(), [&](std::size_t i) {
    m1[i] = sw.beta - sw.omega(inner[i]);
    m3[i] = sw.underline_w(inner[i]) - sw.beta;
  });
  for (std::size_t i = 0; i < inner.size(); ++i) {
    rep.omega_below_beta = std::min(rep.omega_below_beta, m1[i]);
    rep.beta_below_w = std::min(rep.beta_below_w, m3[i]);
  }

  const auto seam = EllipsoidDomain(pair, sw.s_hat).boundary_samples(samples, seed + 1);
  const double om_seam = sw.profile->omega(sw.s_hat), hat_seam = sw.hat_profile->omega(sw.s_hat);
  for (const auto& x : seam) {
    const double w = sw.underline_w(x);
    rep.omega_above_seam = std::min(rep.omega_above_seam, om_seam - w);
    rep.hat_above_seam = std::min(rep.hat_above_seam, hat_seam - w);
  }

  // Exterior: half inside E(s_hat) \ D, half on a log-spread far region.
  auto outer = detail::ellipsoid_shell_points(pair, D, sw.s_hat, samples / 2, seed + 2);
  const auto far = annulus_samples(pair.a(), sw.s_hat, 1e6 * sw.s_hat, samples - samples / 2, seed + 3);
  outer.insert(outer.end(), far.begin(), far.end());
  std::vector<double> m4(outer.size()), m5(outer.size());
  parallel_for(outer.size(), [&](std::size_t i) {
    const double ub = sw.bar_u(outer[i]);
    m4[i] = ub - sw.omega(outer[i]);
    m5[i] = ub - sw.underline_u(outer[i]);
  });
  for (std::size_t i = 0; i < outer.size(); ++i) {
    rep.omega_below_bar_u = std::min(rep.omega_below_bar_u, m4[i]);
    rep.underline_below_bar_u = std::min(rep.underline_below_bar_u, m5[i]);
  }

  for (const auto& b : sw.barriers) {
    rep.boundary_error = std::max(rep.boundary_error, std::abs(sw.underline_u(b.xi) - sw.phi(b.xi)));
  }

  // Far field along a ray: ubar - underline-u = c - (omega - s) in |x|.
  std::mt19937_64 rng(seed + 4);
  const Eigen::VectorXd dir = random_unit_vector(pair.n(), rng);
  const double s_dir = quadratic_level(pair, dir);
  const auto ss = geometric_samples(1e2 * sw.s_hat, 1e5 * sw.s_hat, 30);
  const auto wl = sw.profile->omega_minus_linear(ss);
  std::vector<double> r(ss.size()), gap(ss.size());
  for (std::size_t i = 0; i < ss.size(); ++i) {
    r[i] = std::sqrt(ss[i] / s_dir);
    gap[i] = sw.c - wl[i];
  }
  rep.far_field_rate = fit_log_log(r, gap).slope;
  rep.predicted_rate = 2.0 - static_cast<double>(pair.k - pair.l) / pair.gap();
  return rep;
}

/// Grid solution of the Laplace problem on E(s_bar) \ closure(D) with data
/// phi on dD and s_bar + c on dE(s_bar), by the Shortley-Weller stencil.
struct HarmonicBarrier {
  std::vector<Eigen::VectorXd> nodes;
  Eigen::VectorXd values;
  double boundary_min = 0, boundary_max = 0;
  double h = 0;
  bool max_principle = false;  // all node values inside [boundary_min, boundary_max]
};

inline HarmonicBarrier harmonic_upper_barrier(const AdmissiblePair& pair, const ConvexDomain& D, double s_bar,
                                              const QuadraticData& phi, double c, int nodes_per_axis = 24) {
  const int n = pair.n();
  if (nodes_per_axis < 4) throw argument_error("harmonic_upper_barrier: need at least 4 nodes per axis");
  std::vector<double> half(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    half[static_cast<std::size_t>(i)] = std::sqrt(2.0 * s_bar / pair.a()[static_cast<std::size_t>(i)]);
  }
  const double h = 2.0 * *std::max_element(half.begin(), half.end()) / (nodes_per_axis - 1);
  std::vector<int> dims(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) dims[static_cast<std::size_t>(i)] = 2 * static_cast<int>(std::ceil(half[static_cast<std::size_t>(i)] / h)) + 1;
  auto in_E = [&](const Eigen::VectorXd& x) { return quadratic_level(pair, x) < s_bar; };
  auto in_region = [&](const Eigen::VectorXd& x) { return in_E(x) && !D.contains(x); };
  std::size_t total = 1;
  for (int d : dims) total *= static_cast<std::size_t>(d);
  auto coords = [&](std::size_t idx) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) {
      const int di = dims[static_cast<std::size_t>(i)];
      const int j = static_cast<int>(idx % static_cast<std::size_t>(di));
      idx /= static_cast<std::size_t>(di);
      x[i] = (j - (di - 1) / 2) * h;
    }
    return x;
  };
  std::vector<long> unknown(total, -1);
  HarmonicBarrier out;
  out.h = h;
  for (std::size_t idx = 0; idx < total; ++idx) {
    const auto x = coords(idx);
    if (in_region(x)) {
      unknown[idx] = static_cast<long>(out.nodes.size());
      out.nodes.push_back(x);
    }
  }
  if (out.nodes.empty()) throw numeric_error("harmonic_upper_barrier: grid has no interior nodes");
  const long N = static_cast<long>(out.nodes.size());
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N);
  out.boundary_min = std::numeric_limits<double>::infinity();
  out.boundary_max = -out.boundary_min;
  std::vector<std::size_t> stride(static_cast<std::size_t>(n));
  stride[0] = 1;
  for (int i = 1; i < n; ++i) stride[static_cast<std::size_t>(i)] = stride[static_cast<std::size_t>(i - 1)] * static_cast<std::size_t>(dims[static_cast<std::size_t>(i - 1)]);
  for (std::size_t idx = 0; idx < total; ++idx) {
    const long row = unknown[idx];
    if (row < 0) continue;
    const auto x = out.nodes[static_cast<std::size_t>(row)];
    double diag = 0;
    for (int ax = 0; ax < n; ++ax) {
      double hs[2];
      double bval[2];
      long col[2];
      for (int side = 0; side < 2; ++side) {
        const double sgn = side == 0 ? -1.0 : 1.0;
        Eigen::VectorXd y = x;
        y[ax] += sgn * h;
        // The box extends past E(s_bar) on every axis, so an in-region
        // neighbour is always a grid node.
        const std::size_t st = stride[static_cast<std::size_t>(ax)];
        const long nb = in_region(y) ? unknown[side == 0 ? idx - st : idx + st] : -1;
        if (nb >= 0) {
          hs[side] = h;
          col[side] = nb;
          bval[side] = 0;
          continue;
        }
        // Boundary crossing by bisection on region membership.
        double lo = 0, hi = 1;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          Eigen::VectorXd z = x;
          z[ax] += sgn * mid * h;
          (in_region(z) ? lo : hi) = mid;
        }
        const double theta = std::max(0.5 * (lo + hi), 1e-9);
        Eigen::VectorXd z = x;
        z[ax] += sgn * theta * h;
        // Which boundary: the one whose level function is closer to zero.
        const double lev_E = std::abs(quadratic_level(pair, z) / s_bar - 1.0);
        const double lev_D = std::abs(D.level(z));
        const double value = lev_D < lev_E ? phi(z) : s_bar + c;
        out.boundary_min = std::min(out.boundary_min, value);
        out.boundary_max = std::max(out.boundary_max, value);
        hs[side] = theta * h;
        col[side] = -1;
        bval[side] = value;
      }
      const double scale = 2.0 / (hs[0] + hs[1]);
      for (int side = 0; side < 2; ++side) {
        const double w = scale / hs[side];
        diag += w;
        if (col[side] >= 0) trip.emplace_back(row, col[side], -w);
        else rhs[row] += w * bval[side];
      }
    }
    trip.emplace_back(row, row, diag);
  }
  Eigen::SparseMatrix<double> M(N, N);
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(M);
  if (solver.info() != Eigen::Success) throw numeric_error("harmonic_upper_barrier: factorization failed");
  out.values = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw numeric_error("harmonic_upper_barrier: solve failed");
  const double slack = 1e-10 * (1.0 + std::max(std::abs(out.boundary_min), std::abs(out.boundary_max)));
  out.max_principle = out.values.minCoeff() >= out.boundary_min - slack &&
                      out.values.maxCoeff() <= out.boundary_max + slack;
  if (!out.max_principle) throw numeric_error("harmonic_upper_barrier: discrete maximum principle violated");
  return out;
}

/// The exact G-Sym exterior solution for A = c*(k,l) I.
struct IsotropicExterior {
  AdmissiblePair pair;
  double beta = 0;
  double alpha = 0;
  GSymProfile profile;
};

inline IsotropicExterior solve_isotropic_exterior(int n, int k, int l, double s_bar, double phi_bar, double c) {
  check_orders(n, k, l);
  const double cs = c_star(n, k, l);
  const auto pair = classify(Spectrum(std::vector<double>(static_cast<std::size_t>(n), cs)), k, l);
  if (pair.case_tag != AsymptoticCase::Case1) {
    throw unsupported_case_error("solve_isotropic_exterior: isotropic pair is not Case1");
  }
  const double alpha = invert_mu(pair, c, phi_bar, s_bar);
  return {pair, phi_bar, alpha, GSymProfile(pair, alpha, phi_bar, s_bar)};
}

/// max over points of |S_{k,l}(D^2 omega) - 1| for a G-Sym profile.
inline double plug_back_residual(const GSymProfile& prof, const std::vector<Eigen::VectorXd>& points) {
  const auto& pair = prof.pair();
  std::vector<double> res(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const double s = quadratic_level(pair, points[i]);
    const double v = prof.solve_v(s), vp = prof.v_prime(s);
    res[i] = std::abs(gsym_sigma(pair, v, vp, points[i], pair.k) /
                          (pair.l == 0 ? 1.0 : gsym_sigma(pair, v, vp, points[i], pair.l)) -
                      1.0);
  });
  return res.empty() ? 0.0 : *std::max_element(res.begin(), res.end());
}

struct ComparisonReport {
  double tolerance = 0;
  bool boundary_ordered = false;
  double max_violation = 0;                   // max of sub - super over interior samples
  std::vector<Eigen::VectorXd> violations;    // interior points with sub > super + tol
  bool passed() const { return boundary_ordered && violations.empty(); }
};

/// Checks sub <= super + tol on interior samples, given the ordering on the
/// boundary samples. tol = 1e-9 * max(1, max |super|).
inline ComparisonReport comparison_spotcheck(const std::function<double(const Eigen::VectorXd&)>& sub,
                                             const std::function<double(const Eigen::VectorXd&)>& super,
                                             const std::vector<Eigen::VectorXd>& interior,
                                             const std::vector<Eigen::VectorXd>& boundary) {
  ComparisonReport rep;
  std::vector<double> s_in(interior.size()), u_in(interior.size());
  double scale = 1;
  for (std::size_t i = 0; i < interior.size(); ++i) {
    s_in[i] = sub(interior[i]);
    u_in[i] = super(interior[i]);
    scale = std::max(scale, std::abs(u_in[i]));
  }
  for (const auto& x : boundary) scale = std::max(scale, std::abs(super(x)));
  rep.tolerance = 1e-9 * scale;
  rep.boundary_ordered = true;
  for (const auto& x : boundary) {
    if (sub(x) > super(x) + rep.tolerance) rep.boundary_ordered = false;
  }
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < interior.size(); ++i) {
    const double d = s_in[i] - u_in[i];
    rep.max_violation = std::max(rep.max_violation, d);
    if (d > rep.tolerance) rep.violations.push_back(interior[i]);
  }
  return rep;
}

}  // namespace hessq
