#pragma once

// Text formats: exact parsing of eigenvalue lists, full-precision CSV and the
// JSON forms of the library's records.

#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hessq/admissibility.hpp"
#include "hessq/errors.hpp"
#include "hessq/symfunc.hpp"

namespace hessq {

using Json = nlohmann::ordered_json;

/// "p/q", "-3", "1.25", "2.5e-3" as an exact rational.
inline Rational parse_rational(std::string_view text) {
  std::string s;
  for (char ch : text)
    if (ch != ' ' && ch != '\t') s += ch;
  if (s.empty()) throw argument_error("empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    const Rational num = parse_rational(s.substr(0, slash));
    const Rational den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw argument_error("zero denominator in '" + s + "'");
    return num / den;
  }
  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  boost::multiprecision::cpp_int digits = 0;
  int scale = 0;
  bool any = false, point = false;
  for (; i < s.size() && s[i] != 'e' && s[i] != 'E'; ++i) {
    if (s[i] == '.') {
      if (point) throw argument_error("malformed number '" + s + "'");
      point = true;
    } else if (s[i] >= '0' && s[i] <= '9') {
      digits = digits * 10 + (s[i] - '0');
      if (point) --scale;
      any = true;
    } else {
      throw argument_error("malformed number '" + s + "'");
    }
  }
  if (!any) throw argument_error("malformed number '" + s + "'");
  if (i < s.size()) {
    const std::string ex = s.substr(i + 1);
    std::size_t used = 0;
    int e = 0;
    try {
      e = std::stoi(ex, &used);
    } catch (const std::exception&) {
      throw argument_error("malformed exponent in '" + s + "'");
    }
    if (used != ex.size() || e > 4000 || e < -4000) throw argument_error("malformed exponent in '" + s + "'");
    scale += e;
  }
  Rational q(digits);
  boost::multiprecision::cpp_int p10 = 1;
  for (int k = 0; k < std::abs(scale); ++k) p10 *= 10;
  q = scale >= 0 ? q * Rational(p10) : q / Rational(p10);
  return negative ? Rational(-q) : q;
}

/// Comma-separated list of exact numbers.
inline std::vector<Rational> parse_rational_list(std::string_view text) {
  std::vector<Rational> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? text.size() : comma;
    out.push_back(parse_rational(text.substr(start, end - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

/// %.17e: round-trips every double.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17e", x);
  return buf;
}

inline std::string rational_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str() +
         (boost::multiprecision::denominator(q) == 1 ? "" : "/" + boost::multiprecision::denominator(q).str());
}

/// Comma-separated, header row, LF endings.
class CsvWriter {
 public:
  CsvWriter(std::ostream& os, const std::vector<std::string>& header) : os_(os), width_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) os_ << (i ? "," : "") << header[i];
    os_ << '\n';
  }
  void row(const std::vector<double>& values) {
    if (values.size() != width_) throw argument_error("CsvWriter: row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) os_ << (i ? "," : "") << format_double(values[i]);
    os_ << '\n';
  }

 private:
  std::ostream& os_;
  std::size_t width_;
};

inline Json to_json(const AdmissiblePair& p) {
  Json j;
  j["n"] = p.n();
  j["k"] = p.k;
  j["l"] = p.l;
  j["eigenvalues"] = p.a();
  j["sigma"] = p.sigma_value;
  j["Hk"] = p.H;
  j["hl"] = p.h;
  j["H_minus_h"] = p.gap();
  j["scriptH"] = p.script_H;
  j["case"] = std::string(to_string(p.case_tag));
  j["exact"] = p.exact;
  j["near_case_boundary"] = p.near_case_boundary;
  return j;
}

inline Json tolerances_json() {
  Json t;
  t["membership_rel"] = tolerance::membership_rel;
  t["case_boundary"] = tolerance::case_boundary;
  return t;
}

}  // namespace hessq
