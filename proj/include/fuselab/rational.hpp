#pragma once

#include <cctype>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

#include "fuselab/errors.hpp"

namespace fuselab {

// All structure constants and exact-mode coefficients live on these types;
// nothing in the exact paths ever rounds.
using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(const Int& n) { return n.convert_to<double>(); }

inline std::string to_string(const Int& n) { return n.str(); }

/// Canonical text form: "p" for integers, "p/q" otherwise.
inline std::string to_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return numerator(q).str() + "/" + denominator(q).str();
}

/// Parses "3", "-5", "1/2", "0.25" exactly (decimal literals become exact
/// decimal fractions, not binary doubles).
inline Rational parse_rational(std::string_view text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) raise(Errc::syntax_error, "empty rational literal");

  auto parse_int = [](std::string_view t) -> Int {
    if (t.empty()) raise(Errc::syntax_error, "empty integer literal");
    std::size_t i = 0;
    if (t[0] == '+' || t[0] == '-') i = 1;
    if (i == t.size()) raise(Errc::syntax_error, "bare sign in integer literal");
    for (std::size_t j = i; j < t.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(t[j])))
        raise(Errc::syntax_error, "bad integer literal '" + std::string(t) + "'");
    return Int(std::string(t));
  };

  auto slash = s.find('/');
  if (slash != std::string::npos) {
    Int num = parse_int(std::string_view(s).substr(0, slash));
    Int den = parse_int(std::string_view(s).substr(slash + 1));
    if (den == 0) raise(Errc::syntax_error, "zero denominator in '" + s + "'");
    return Rational(num, den);
  }
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string head = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (frac.empty()) raise(Errc::syntax_error, "trailing '.' in '" + s + "'");
    bool neg = !head.empty() && head[0] == '-';
    if (head.empty() || head == "-" || head == "+") head += "0";
    Int whole = parse_int(head);
    Int num = parse_int(frac);
    Int den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    Rational r = Rational(whole) + (neg ? -Rational(num, den) : Rational(num, den));
    return r;
  }
  return Rational(parse_int(s));
}

/// Embeds a double exactly (every finite double is a dyadic rational).
inline Rational rational_from_double(double x) {
  if (!(x == x) || x > 1e308 || x < -1e308)
    raise(Errc::parameter_out_of_range, "non-finite value cannot be embedded exactly");
  return Rational(x);
}

}  // namespace fuselab
