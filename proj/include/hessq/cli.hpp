#pragma once

// Command-line front end. Each command writes its primary artifact (JSON or
// CSV) to `out`; secondary tables go to --output-dir when one is given.
//
// Exit codes: 0 success, 2 validation or threshold errors, 3 numeric errors,
// 64 unknown command.

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hessq/admissibility.hpp"
#include "hessq/io.hpp"
#include "hessq/legendre.hpp"
#include "hessq/perron.hpp"
#include "hessq/subsolution.hpp"
#include "hessq/symfunc.hpp"

namespace hessq::cli {

inline constexpr std::array<const char*, 7> kCommands = {"classify", "subsolution", "asymptotics", "rigidity",
                                                         "legendre", "sandwich",    "solve-isotropic"};

struct RunConfig {
  std::string command;
  std::string input;       // path or inline JSON (sandwich)
  std::string output_dir;
  std::uint64_t seed = 0;
  std::string format;      // csv | json; empty means the command's default

  std::string A;
  int n = 3, k = 0, l = 0;
  double alpha = 1, beta = 0, s_bar = 1;
  std::string s_range;     // lo:hi[:count]
  double gamma = -1;
  std::optional<double> c, delta, epsilon;
  double phi_bar = 0;
  std::size_t samples = 2000;
};

inline std::string usage() {
  std::string s = "usage: hessq <command> [options]\ncommands:";
  for (auto c : kCommands) s += std::string(" ") + c;
  return s + "\nrun 'hessq <command> --help' for the options of a command\n";
}

struct Parsed {
  RunConfig config;
  int exit_code = -1;      // >= 0 when parsing already decided the outcome (help, errors)
  std::string message;
};

inline Parsed parse_args(int argc, const char* const* argv) {
  Parsed p;
  if (argc < 2 || std::find_if(kCommands.begin(), kCommands.end(),
                               [&](const char* c) { return std::string(argv[1]) == c; }) == kCommands.end()) {
    if (argc >= 2 && (std::string(argv[1]) == "--help" || std::string(argv[1]) == "-h")) {
      p.exit_code = 0;
      p.message = usage();
      return p;
    }
    p.exit_code = 64;
    p.message = (argc >= 2 ? "unknown command '" + std::string(argv[1]) + "'\n" : std::string()) + usage();
    return p;
  }
  auto& cfg = p.config;
  cfg.command = argv[1];
  CLI::App app{"hessq " + cfg.command};
  app.add_option("--input", cfg.input, "JSON file or inline JSON");
  app.add_option("--output-dir", cfg.output_dir, "directory for secondary CSV artifacts");
  app.add_option("--seed", cfg.seed, "seed for sample grids");
  app.add_option("--format", cfg.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--A", cfg.A, "eigenvalues, comma separated decimals or p/q");
  app.add_option("--n", cfg.n, "dimension");
  app.add_option("--k", cfg.k, "numerator order");
  app.add_option("--l", cfg.l, "denominator order");
  app.add_option("--alpha", cfg.alpha, "profile or power-term coefficient");
  app.add_option("--beta", cfg.beta, "profile value at s_bar");
  app.add_option("--s-bar", cfg.s_bar, "profile base point");
  app.add_option("--s", cfg.s_range, "lo:hi[:count], geometric");
  app.add_option("--gamma", cfg.gamma, "decay exponent for the Legendre build");
  app.add_option("--c", cfg.c, "asymptotic constant");
  app.add_option("--delta", cfg.delta, "convexity floor of the Legendre build");
  app.add_option("--epsilon", cfg.epsilon, "extension collar of the Legendre build");
  app.add_option("--phi-bar", cfg.phi_bar, "boundary value for solve-isotropic");
  app.add_option("--samples", cfg.samples, "sample count for verification grids");
  try {
    app.parse(argc - 1, argv + 1);
  } catch (const CLI::CallForHelp&) {
    p.exit_code = 0;
    p.message = app.help();
  } catch (const CLI::ParseError& e) {
    p.exit_code = 2;
    p.message = std::string(e.what()) + "\n";
  }
  return p;
}

namespace detail {

struct LoadedPair {
  AdmissiblePair pair;
  bool normalized = false;
  double t = 1;
  std::optional<std::string> t_exact;
  std::optional<std::string> sigma_exact;
};

/// Parses the spectrum and, when it is not in A_{k,l}, rescales it into the class.
inline LoadedPair load_pair(const std::vector<Rational>& values, int k, int l) {
  if (values.size() < 2) throw argument_error("--A needs at least two eigenvalues");
  ExactSpectrum exact(values);
  check_orders(exact.n(), k, l);
  LoadedPair lp;
  const bool in_class = sigma(k, exact) == sigma(l, exact);
  if (!in_class) {
    const auto m = membership(exact, k, l);
    if (auto* pair = std::get_if<AdmissiblePair>(&m)) {
      lp.pair = *pair;
      return lp;
    }
    lp.normalized = true;
    if (auto en = normalize_to_class_exact(exact, k, l)) {
      lp.t = to_double(en->t);
      lp.t_exact = rational_string(en->t);
      exact = en->scaled;
    } else {
      const auto nd = normalize_to_class(to_double(exact), k, l);
      lp.t = nd.t;
      lp.pair = classify(nd.scaled, k, l);
      return lp;
    }
  }
  lp.sigma_exact = rational_string(sigma(k, exact));
  lp.pair = classify(exact, k, l);
  return lp;
}

inline LoadedPair load_pair(const std::string& text, int k, int l) {
  if (text.empty()) throw argument_error("--A is required");
  return load_pair(parse_rational_list(text), k, l);
}

inline Json pair_json(const LoadedPair& lp) {
  Json j = to_json(lp.pair);
  j["normalized"] = lp.normalized;
  j["scale_factor"] = lp.t;
  if (lp.t_exact) j["scale_factor_exact"] = *lp.t_exact;
  if (lp.sigma_exact) j["sigma_exact"] = *lp.sigma_exact;
  return j;
}

struct Range {
  double lo, hi;
  std::size_t count;
};

inline Range parse_range(const std::string& text, Range fallback) {
  if (text.empty()) return fallback;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 3) throw argument_error("--s expects lo:hi[:count]");
  Range r{to_double(parse_rational(parts[0])), to_double(parse_rational(parts[1])), fallback.count};
  if (parts.size() == 3) r.count = static_cast<std::size_t>(std::stoul(parts[2]));
  if (!(r.lo > 0) || !(r.hi > r.lo) || r.count < 2) throw argument_error("--s needs 0 < lo < hi and count >= 2");
  return r;
}

inline void write_side_file(const RunConfig& cfg, const std::string& name, const std::string& body) {
  if (cfg.output_dir.empty()) return;
  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream f(std::filesystem::path(cfg.output_dir) / name, std::ios::binary);
  if (!f) throw argument_error("cannot write to " + cfg.output_dir);
  f << body;
}

inline Json form_json(const AsymptoticForm& f) {
  Json j;
  j["case"] = std::string(to_string(f.case_tag));
  j["mu"] = f.mu;
  j["log_coefficient"] = f.log_coefficient ? Json(*f.log_coefficient) : Json(nullptr);
  j["power_coefficient"] = f.power_coefficient ? Json(*f.power_coefficient) : Json(nullptr);
  j["power_exponent"] = f.power_exponent ? Json(*f.power_exponent) : Json(nullptr);
  j["remainder_exponent"] = f.remainder_exponent;
  j["error_bound"] = f.error_bound;
  j["s_max"] = f.s_max;
  return j;
}

inline Eigen::VectorXd json_vector(const Json& j, const char* what) {
  if (!j.is_array()) throw argument_error(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

inline Eigen::MatrixXd json_matrix(const Json& j, int n, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw argument_error(std::string(what) + " must be n x n");
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i) {
    const auto row = json_vector(j[static_cast<std::size_t>(i)], what);
    if (row.size() != n) throw argument_error(std::string(what) + " must be n x n");
    M.row(i) = row.transpose();
  }
  return M;
}

inline std::string json_number_text(const Json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  return format_double(j.get<double>());
}

}  // namespace detail

inline int cmd_classify(const RunConfig& cfg, std::ostream& out) {
  const auto lp = detail::load_pair(cfg.A, cfg.k, cfg.l);
  Json j = detail::pair_json(lp);
  j["tolerances"] = tolerances_json();
  out << j.dump(2) << '\n';
  return 0;
}

inline int cmd_rigidity(const RunConfig& cfg, std::ostream& out) {
  const auto lp = detail::load_pair(cfg.A, cfg.k, cfg.l);
  const auto r = rigidity_report(lp.pair);
  Json j;
  j["pair"] = detail::pair_json(lp);
  j["verdict"] = r.verdict();
  j["isotropic"] = r.isotropic;
  Json w = Json::array();
  for (const auto& x : r.witnesses) {
    Json e;
    e["i"] = x.i;
    e["j"] = x.j;
    e["ratio"] = std::isfinite(x.ratio) ? Json(x.ratio) : Json("inf");
    e["forced_slope"] = x.forced_slope ? Json(*x.forced_slope) : Json(nullptr);
    w.push_back(e);
  }
  j["witnesses"] = w;
  j["tolerances"] = tolerances_json();
  j["tolerances"]["isotropy"] = 1e-10;
  out << j.dump(2) << '\n';
  return 0;
}

inline int cmd_subsolution(const RunConfig& cfg, std::ostream& out) {
  const auto lp = detail::load_pair(cfg.A, cfg.k, cfg.l);
  const GSymProfile prof(lp.pair, cfg.alpha, cfg.beta, cfg.s_bar);
  const auto form = mu(prof);
  const auto r = detail::parse_range(cfg.s_range, {cfg.s_bar, 1e3 * cfg.s_bar, 50});
  const auto ss = geometric_samples(r.lo, r.hi, r.count);
  const auto wl = prof.omega_minus_linear(ss);
  std::ostringstream csv;
  CsvWriter w(csv, {"s", "v", "v_prime", "omega", "omega_minus_s_minus_mu"});
  Json rows = Json::array();
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const double s = ss[i];
    // omega - s - mu, with the log or power growth term removed in Cases 2-4.
    const double rem = wl[i] - form.growth_term(s) - form.mu;
    const std::vector<double> row = {s, prof.solve_v(s), prof.v_prime(s), s + wl[i], rem};
    w.row(row);
    rows.push_back(row);
  }
  if (cfg.format == "json") {
    Json j;
    j["pair"] = detail::pair_json(lp);
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    j["s_bar"] = cfg.s_bar;
    j["asymptotic_form"] = detail::form_json(form);
    j["columns"] = {"s", "v", "v_prime", "omega", "omega_minus_s_minus_mu"};
    j["rows"] = rows;
    j["tolerances"] = {{"quadrature_abs_factor", prof.quadrature().abs_tol_factor}};
    out << j.dump(2) << '\n';
  } else {
    out << csv.str();
  }
  return 0;
}

inline int cmd_asymptotics(const RunConfig& cfg, std::ostream& out) {
  const auto lp = detail::load_pair(cfg.A, cfg.k, cfg.l);
  const GSymProfile prof(lp.pair, cfg.alpha, cfg.beta, cfg.s_bar);
  const auto r = detail::parse_range(cfg.s_range, {10 * cfg.s_bar, 1e5 * cfg.s_bar, 40});
  const auto ss = geometric_samples(r.lo, r.hi, r.count);
  const auto fit = fit_asymptotics(prof, ss);
  Json j;
  j["pair"] = detail::pair_json(lp);
  j["alpha"] = cfg.alpha;
  j["predicted"] = detail::form_json(fit.predicted);
  Json f;
  f["remainder_exponent"] = fit.remainder_exponent;
  f["log_coefficient"] = fit.log_coefficient ? Json(*fit.log_coefficient) : Json(nullptr);
  f["power_exponent"] = fit.power_exponent ? Json(*fit.power_exponent) : Json(nullptr);
  f["power_coefficient"] = fit.power_coefficient ? Json(*fit.power_coefficient) : Json(nullptr);
  f["insufficient_decay"] = fit.insufficient_decay;
  f["s_range"] = {r.lo, r.hi};
  f["points"] = r.count;
  j["fitted"] = f;
  out << j.dump(2) << '\n';
  return 0;
}

inline int cmd_legendre(const RunConfig& cfg, std::ostream& out) {
  const int k = cfg.k ? cfg.k : static_cast<int>(parse_rational_list(cfg.A).size());
  const auto lp = detail::load_pair(cfg.A, k, cfg.l ? cfg.l : k - 1);
  const auto b = build_bar_u(lp.pair, cfg.gamma, cfg.c.value_or(0.0), cfg.alpha, cfg.delta, cfg.epsilon);
  const auto rep = verify_legendre(b, cfg.samples, cfg.seed);
  Json j;
  j["K"] = rep.K;
  j["delta"] = rep.delta;
  j["sampled_min_margin_Skl"] = rep.sampled_min_margin_Skl;
  j["asymptotic_fit_gamma"] = rep.asymptotic_fit_gamma;
  j["gamma"] = b.gamma;
  j["alpha"] = b.alpha;
  j["c"] = b.c;
  j["epsilon"] = rep.epsilon;
  j["epsilon_doublings"] = b.extension.epsilon_doublings;
  j["trace_inverse"] = rep.trace_inverse;
  j["min_convexity_margin"] = rep.min_convexity_margin;
  j["max_laplacian_outer"] = rep.max_laplacian_outer;
  j["max_roundtrip_error"] = rep.max_roundtrip_error;
  j["max_duality_error"] = rep.max_duality_error;
  j["pair"] = detail::pair_json(lp);
  j["tolerances"] = {{"inverse_map_residual", 1e-11}, {"quotient_floor", 1e-7}};
  out << j.dump(2) << '\n';

  std::ostringstream csv;
  CsvWriter w(csv, {"abs_x", "u_minus_quadratic"});
  std::mt19937_64 rng(cfg.seed);
  const Eigen::VectorXd dir = random_unit_vector(b.n(), rng);
  const double scale = std::max(b.extension.R0, 1e-3) / b.Lambda;
  for (double r : geometric_samples(1e-1 * scale, 1e4 * scale, 60)) w.row({r, u_deviation(b, r * dir)});
  detail::write_side_file(cfg, "legendre_profile.csv", csv.str());
  return 0;
}

inline Json read_input(const std::string& input) {
  if (input.empty()) throw argument_error("--input is required");
  const auto first = input.find_first_not_of(" \t\r\n");
  std::string text;
  if (first != std::string::npos && input[first] == '{') {
    text = input;
  } else {
    std::ifstream f(input);
    if (!f) throw argument_error("cannot read input file " + input);
    std::stringstream ss;
    ss << f.rdbuf();
    text = ss.str();
  }
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw argument_error(std::string("invalid JSON input: ") + e.what());
  }
}

inline int cmd_sandwich(const RunConfig& cfg, std::ostream& out) {
  const Json in = read_input(cfg.input);
  try {
    std::vector<Rational> values;
    for (const auto& x : in.at("A")) values.push_back(parse_rational(detail::json_number_text(x)));
    const int k = in.at("k").get<int>(), l = in.at("l").get<int>();
    const auto lp = detail::load_pair(values, k, l);
    const int n = lp.pair.n();
    // Inputs are in the given coordinates; the library works in the sorted basis.
    auto to_sorted = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd r(n);
      for (int i = 0; i < n; ++i) r[i] = v[static_cast<Eigen::Index>(lp.pair.spectrum.original_index(static_cast<std::size_t>(i)))];
      return r;
    };
    auto to_sorted_m = [&](const Eigen::MatrixXd& M) {
      Eigen::MatrixXd r(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          r(i, j) = M(static_cast<Eigen::Index>(lp.pair.spectrum.original_index(static_cast<std::size_t>(i))),
                      static_cast<Eigen::Index>(lp.pair.spectrum.original_index(static_cast<std::size_t>(j))));
      return r;
    };
    const Json& dj = in.at("D");
    const std::string type = dj.at("type").get<std::string>();
    const Json& pj = dj.contains("params") ? dj.at("params") : dj;
    const Eigen::VectorXd center =
        pj.contains("center") ? to_sorted(detail::json_vector(pj.at("center"), "D.center")) : Eigen::VectorXd::Zero(n);
    if (center.size() != n) throw argument_error("D.center has the wrong dimension");
    std::optional<ConvexDomain> D;
    if (type == "ball") {
      D = ConvexDomain::ball(center, pj.at("radius").get<double>());
    } else if (type == "ellipsoid") {
      Eigen::MatrixXd Q;
      if (pj.contains("Q")) {
        Q = to_sorted_m(detail::json_matrix(pj.at("Q"), n, "D.Q"));
      } else {
        const Eigen::VectorXd axes = to_sorted(detail::json_vector(pj.at("semi_axes"), "D.semi_axes"));
        Q = axes.array().square().inverse().matrix().asDiagonal();
      }
      D = ConvexDomain::ellipsoid(center, Q);
    } else {
      throw argument_error("D.type must be ball or ellipsoid");
    }
    QuadraticData phi = QuadraticData::constant(n, 0.0);
    if (in.contains("phi")) {
      const Json& fj = in.at("phi");
      const Eigen::MatrixXd M = fj.contains("M") ? to_sorted_m(detail::json_matrix(fj.at("M"), n, "phi.M"))
                                                 : Eigen::MatrixXd::Zero(n, n);
      const Eigen::VectorXd b = fj.contains("b") ? to_sorted(detail::json_vector(fj.at("b"), "phi.b"))
                                                 : Eigen::VectorXd::Zero(n);
      phi = QuadraticData(M, b, fj.value("c0", 0.0));
    }
    SandwichOptions opt;
    opt.seed = cfg.seed;
    if (in.contains("s_hat_factor")) opt.s_hat_factor = in.at("s_hat_factor").get<double>();
    const std::size_t samples = in.value("samples", std::size_t{10000});
    const double c_measured = measure_threshold(lp.pair, *D, phi, opt);
    const bool c_given = in.contains("c");
    const double c = c_given ? in.at("c").get<double>() : c_measured + 1.0;
    const auto sw = build_sandwich(lp.pair, *D, phi, c, opt);
    const auto rep = verify_sandwich(sw, samples, cfg.seed);

    Json j;
    j["c_star_measured"] = sw.c_star;
    j["c"] = c;
    j["c_supplied"] = c_given;
    j["alpha_c"] = sw.alpha_c;
    j["alpha_hat"] = sw.alpha_hat;
    j["s_bar"] = sw.s_bar;
    j["s_hat"] = sw.s_hat;
    j["beta"] = sw.beta;
    j["barriers"] = sw.barriers.size();
    Json m;
    m["omega_below_beta"] = rep.omega_below_beta;
    m["omega_above_seam"] = rep.omega_above_seam;
    m["hat_above_seam"] = rep.hat_above_seam;
    m["beta_below_underline_w"] = rep.beta_below_w;
    m["omega_below_bar_u"] = rep.omega_below_bar_u;
    m["underline_u_below_bar_u"] = rep.underline_below_bar_u;
    m["boundary_error"] = rep.boundary_error;
    j["min_margins"] = m;
    j["asymptotic_fit"] = {{"rate", rep.far_field_rate}, {"predicted", rep.predicted_rate}};
    j["samples"] = rep.samples;
    j["pair"] = detail::pair_json(lp);
    j["tolerances"] = {{"barrier_cap", BarrierOptions{}.cap}, {"mu_inversion", 1e-9}, {"safety", opt.safety}};
    out << j.dump(2) << '\n';

    if (!cfg.output_dir.empty() && in.contains("rays")) {
      std::size_t idx = 0;
      for (const auto& ray : in.at("rays")) {
        Eigen::VectorXd dir = to_sorted(detail::json_vector(ray, "rays[]"));
        if (dir.size() != n || !(dir.norm() > 0)) throw argument_error("rays must be non-zero n-vectors");
        dir /= dir.norm();
        // The origin is inside D; find where the ray leaves it.
        double lo = 0, hi = 1;
        while (D->contains(hi * dir)) hi *= 2;
        for (int it = 0; it < 100; ++it) (D->contains(0.5 * (lo + hi) * dir) ? lo : hi) = 0.5 * (lo + hi);
        const double r0 = hi;
        const double r1 = std::sqrt(1e3 * sw.s_hat / quadratic_level(lp.pair, dir));
        std::ostringstream csv;
        CsvWriter w(csv, {"r", "bar_u", "underline_u", "omega", "underline_w"});
        for (double r : geometric_samples(std::max(r0, 1e-6), std::max(r1, 2 * r0), 80)) {
          const Eigen::VectorXd x = r * dir;
          if (D->contains(x)) continue;
          w.row({r, sw.bar_u(x), sw.underline_u(x), sw.omega(x), sw.underline_w(x)});
        }
        detail::write_side_file(cfg, "sandwich_ray_" + std::to_string(idx++) + ".csv", csv.str());
      }
    }
    return 0;
  } catch (const Json::exception& e) {
    throw argument_error(std::string("sandwich input: ") + e.what());
  }
}

inline int cmd_solve_isotropic(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.c) throw argument_error("--c is required");
  const auto sol = solve_isotropic_exterior(cfg.n, cfg.k, cfg.l, cfg.s_bar, cfg.phi_bar, *cfg.c);
  const auto pts = annulus_samples(sol.pair.a(), cfg.s_bar, 1e4 * cfg.s_bar, cfg.samples, cfg.seed);
  const double residual = plug_back_residual(sol.profile, pts);
  const auto ss = geometric_samples(10 * cfg.s_bar, 1e5 * cfg.s_bar, 40);
  const auto wl = sol.profile.omega_minus_linear(ss);
  std::vector<double> r(ss.size()), gap(ss.size());
  const double a0 = sol.pair.a()[0];
  for (std::size_t i = 0; i < ss.size(); ++i) {
    r[i] = std::sqrt(2.0 * ss[i] / a0);
    gap[i] = *cfg.c - wl[i];
  }
  Json j;
  j["pair"] = to_json(sol.pair);
  j["alpha"] = sol.alpha;
  j["beta"] = sol.beta;
  j["c"] = *cfg.c;
  j["mu"] = mu(sol.profile).mu;
  j["plug_back_residual"] = residual;
  j["decay_exponent_fit"] = fit_log_log(r, gap).slope;
  j["decay_exponent_predicted"] = 2.0 - cfg.n;
  j["samples"] = cfg.samples;
  j["tolerances"] = {{"mu_inversion", 1e-9}, {"residual", 1e-8}};
  out << j.dump(2) << '\n';
  return 0;
}

/// Dispatches a parsed configuration. Library errors map onto exit codes.
inline int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "classify") return cmd_classify(cfg, out);
    if (cfg.command == "rigidity") return cmd_rigidity(cfg, out);
    if (cfg.command == "subsolution") return cmd_subsolution(cfg, out);
    if (cfg.command == "asymptotics") return cmd_asymptotics(cfg, out);
    if (cfg.command == "legendre") return cmd_legendre(cfg, out);
    if (cfg.command == "sandwich") return cmd_sandwich(cfg, out);
    if (cfg.command == "solve-isotropic") return cmd_solve_isotropic(cfg, out);
    err << "unknown command '" << cfg.command << "'\n" << usage();
    return 64;
  } catch (const threshold_error& e) {
    err << "error: " << e.what() << " (measured threshold " << format_double(e.threshold()) << ")\n";
    return 2;
  } catch (const numeric_error& e) {
    err << "numeric error: " << e.what() << " (achieved " << format_double(e.achieved()) << ")\n";
    return 3;
  } catch (const argument_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const range_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

inline int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  auto p = parse_args(argc, argv);
  if (p.exit_code >= 0) {
    (p.exit_code == 0 ? out : err) << p.message;
    return p.exit_code;
  }
  return run(p.config, out, err);
}

}  // namespace hessq::cli
