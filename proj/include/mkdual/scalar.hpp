#pragma once

// Arithmetic modes. Every algorithm in the library is a template over a
// scalar type S; two instantiations are supported:
//
//   Rational  exact GMP rationals, comparisons are exact
//   double    IEEE doubles, comparisons use one process-wide tolerance
//
// The helpers below are the only place where the two modes differ.

#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

#include <boost/multiprecision/gmp.hpp>

namespace mkdual {

using Rational = boost::multiprecision::mpq_rational;

enum class ArithmeticMode { rational, floating };

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

template <class S>
constexpr ArithmeticMode mode_of() {
  return is_exact_v<S> ? ArithmeticMode::rational : ArithmeticMode::floating;
}

inline std::string_view to_string(ArithmeticMode m) {
  return m == ArithmeticMode::rational ? "rational" : "float";
}

namespace detail {
inline std::atomic<double>& tolerance_slot() {
  static std::atomic<double> tol{1e-9};
  return tol;
}
}  // namespace detail

/// Float-mode comparison tolerance. Ignored in rational mode.
inline double tolerance() { return detail::tolerance_slot().load(std::memory_order_relaxed); }
inline void set_tolerance(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("tolerance must be nonnegative");
  detail::tolerance_slot().store(t, std::memory_order_relaxed);
}

template <class S>
bool approx_eq(const S& a, const S& b) {
  if constexpr (is_exact_v<S>) {
    return a == b;
  } else {
    return std::abs(a - b) <= tolerance();
  }
}

/// a <= b up to the mode tolerance.
template <class S>
bool approx_le(const S& a, const S& b) {
  if constexpr (is_exact_v<S>) {
    return a <= b;
  } else {
    return a <= b + tolerance();
  }
}

/// Strictly negative beyond the mode tolerance.
template <class S>
bool definitely_negative(const S& a) {
  if constexpr (is_exact_v<S>) {
    return a < 0;
  } else {
    return a < -tolerance();
  }
}

template <class S>
bool definitely_positive(const S& a) {
  return definitely_negative<S>(-a);
}

template <class S>
S abs_value(const S& a) {
  return a < 0 ? S(-a) : a;
}

template <class S>
double to_double(const S& a) {
  if constexpr (is_exact_v<S>) {
    return a.template convert_to<double>();
  } else {
    return static_cast<double>(a);
  }
}

/// Parses "p/q", "p", or a decimal literal such as "-0.125" / "1e-3".
/// Decimal literals are converted exactly in rational mode.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto fail = [&] { throw std::invalid_argument("not a rational literal: '" + s + "'"); };
  if (s.empty()) fail();
  if (auto slash = s.find('/'); slash != std::string::npos) {
    auto is_integer = [](const std::string& t) {
      std::size_t k = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
      if (k == t.size()) return false;
      for (; k < t.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(t[k]))) return false;
      return true;
    };
    std::string num = s.substr(0, slash), den = s.substr(slash + 1);
    if (!is_integer(num) || !is_integer(den)) fail();
    if (num[0] == '+') num.erase(0, 1);
    if (den[0] == '+') den.erase(0, 1);
    boost::multiprecision::mpz_int p(num), q(den);
    if (q == 0) fail();
    return Rational(p, q);  // canonicalizes
  }
  // decimal: [sign] digits [. digits] [e [sign] digits]
  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  std::string digits;
  int scale = 0;
  bool seen_digit = false;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
    digits += s[i++];
    seen_digit = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
      digits += s[i++];
      --scale;
      seen_digit = true;
    }
  }
  if (!seen_digit) fail();
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    std::size_t consumed = 0;
    int exponent = 0;
    try {
      exponent = std::stoi(s.substr(i), &consumed);
    } catch (const std::exception&) {
      fail();
    }
    if (consumed == 0) fail();
    i += consumed;
    scale += exponent;
  }
  if (i != s.size()) fail();
  boost::multiprecision::mpz_int numerator(digits.empty() ? std::string("0") : digits);
  boost::multiprecision::mpz_int power = 1;
  for (int k = 0; k < std::abs(scale); ++k) power *= 10;
  Rational r = scale >= 0 ? Rational(numerator * power) : Rational(numerator, power);
  return negative ? Rational(-r) : r;
}

/// Always "p/q", including integers ("3/1") and zero ("0/1").
inline std::string format_rational(const Rational& r) {
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

template <class S>
S parse_scalar(std::string_view text) {
  if constexpr (is_exact_v<S>) {
    return parse_rational(text);
  } else {
    if (text.find('/') != std::string_view::npos) return to_double(parse_rational(text));
    std::string s(text);
    std::size_t consumed = 0;
    double v = 0;
    try {
      v = std::stod(s, &consumed);
    } catch (const std::exception&) {
      throw std::invalid_argument("not a numeric literal: '" + s + "'");
    }
    if (consumed != s.size()) throw std::invalid_argument("not a numeric literal: '" + s + "'");
    return v;
  }
}

/// Small-integer construction that works for both modes.
template <class S>
S from_ratio(std::int64_t p, std::int64_t q = 1) {
  if constexpr (is_exact_v<S>) {
    return Rational(p, q);
  } else {
    return static_cast<double>(p) / static_cast<double>(q);
  }
}

}  // namespace mkdual
