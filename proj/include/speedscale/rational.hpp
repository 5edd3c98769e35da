#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace speedscale {

// Exact rational used for every time, work and speed value.
using Rational = mpq_class;

inline double to_double(const Rational& q) { return q.get_d(); }

// p/q in lowest terms. mpq_class(p, q) alone does not reduce, and GMP
// comparisons assume reduced operands.
inline Rational ratio(long p, long q) {
  Rational r(p, q);
  r.canonicalize();
  return r;
}

// Canonical "p/q" form (lowest terms, q > 0); integers print as "p/1".
inline std::string to_string(const Rational& q) {
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Parses "p/q", an integer, or a decimal literal with optional exponent
// ("1.25", "-3e-2"). Decimals are converted exactly. Returns nullopt on
// malformed input or a zero denominator.
inline std::optional<Rational> parse_rational(std::string_view text) {
  auto is_digits = [](std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    }
    return true;
  };

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    std::string_view num_digits = (!num.empty() && (num[0] == '-' || num[0] == '+')) ? num.substr(1) : num;
    if (!is_digits(num_digits) || !is_digits(den)) return std::nullopt;
    mpz_class n(std::string(num_digits), 10);
    mpz_class d(std::string(den), 10);
    if (d == 0) return std::nullopt;
    if (!num.empty() && num[0] == '-') n = -n;
    Rational q(n, d);
    q.canonicalize();
    return q;
  }

  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part[0] == '-' || exp_part[0] == '+')) {
      exp_negative = exp_part[0] == '-';
      exp_part.remove_prefix(1);
    }
    if (!is_digits(exp_part) || exp_part.size() > 6) return std::nullopt;
    exponent = std::stol(std::string(exp_part));
    if (exp_negative) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if (int_part.empty() && frac_part.empty()) return std::nullopt;
  if (!int_part.empty() && !is_digits(int_part)) return std::nullopt;
  if (!frac_part.empty() && !is_digits(frac_part)) return std::nullopt;

  mpz_class mantissa(std::string(int_part) + std::string(frac_part) + (int_part.empty() && frac_part.empty() ? "0" : ""), 10);
  exponent -= static_cast<long>(frac_part.size());
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational q = exponent >= 0 ? Rational(mantissa * scale) : Rational(mantissa, scale);
  q.canonicalize();
  if (negative) q = -q;
  return q;
}

// Exact conversion of a finite double (doubles are dyadic rationals).
inline Rational from_double(double value) {
  Rational q(value);
  q.canonicalize();
  return q;
}

}  // namespace speedscale
