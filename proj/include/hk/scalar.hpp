#pragma once

// Numeric contract for the simulator: every algorithm is a template over a
// scalar type with a ScalarTraits specialization. Two are provided:
//
//   double     binary64, tolerances come from SimParams
//   Rational   GMP arbitrary-precision rational, all comparisons exact

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace hk {

using Rational = mpq_class;

enum class NumericMode { exact, float64 };

inline std::string_view to_string(NumericMode mode) {
  return mode == NumericMode::exact ? "exact" : "float";
}

inline NumericMode parse_mode(std::string_view s) {
  if (s == "exact") return NumericMode::exact;
  if (s == "float" || s == "float64") return NumericMode::float64;
  throw std::invalid_argument("unknown numeric mode: " + std::string(s));
}

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (c < '0' || c > '9') return false;
  return true;
}

// Parses "[-+]int[.frac][e[-+]exp]" into an exact rational.
inline Rational parse_decimal_exact(std::string_view text) {
  std::string_view s = text;
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_text = s.substr(e + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), exponent);
    if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size())
      throw ParseError("bad exponent in literal '" + std::string(text) + "'");
    s = s.substr(0, e);
  }
  std::string digits;
  std::string_view int_part = s;
  std::string_view frac_part;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    int_part = s.substr(0, dot);
    frac_part = s.substr(dot + 1);
  }
  if ((int_part.empty() && frac_part.empty()) ||
      (!int_part.empty() && !all_digits(int_part)) ||
      (!frac_part.empty() && !all_digits(frac_part)))
    throw ParseError("bad numeric literal '" + std::string(text) + "'");
  digits.append(int_part);
  digits.append(frac_part);
  if (digits.empty()) digits = "0";
  exponent -= static_cast<long>(frac_part.size());
  if (exponent < -100000 || exponent > 100000)
    throw ParseError("exponent out of range in '" + std::string(text) + "'");

  mpz_class num(digits, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational out = exponent < 0 ? Rational(num, scale) : Rational(num * scale, 1);
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

}  // namespace detail

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr NumericMode mode = NumericMode::float64;
  static constexpr bool exact = false;

  static double from_double(double v) { return v; }
  static double from_ratio(long num, unsigned long den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double to_double(double v) { return v; }

  // Shortest representation that round-trips.
  static std::string to_string(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc{}) throw std::runtime_error("to_chars failed");
    return std::string(buf, ptr);
  }

  // Decimal literals; "p/q" is accepted and evaluated in binary64.
  static double parse(std::string_view text) {
    std::string_view s = detail::trim(text);
    if (auto slash = s.find('/'); slash != std::string_view::npos)
      return parse(s.substr(0, slash)) / parse(s.substr(slash + 1));
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
      throw ParseError("bad float literal '" + std::string(text) + "'");
    return v;
  }

  static std::size_t bit_size(double) { return 0; }
  static double abs(double v) { return std::fabs(v); }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr NumericMode mode = NumericMode::exact;
  static constexpr bool exact = true;

  // Exact: every finite double is a dyadic rational.
  static Rational from_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value in exact mode");
    return Rational(v);
  }
  static Rational from_ratio(long num, unsigned long den) {
    Rational r{mpz_class(num), mpz_class(den)};
    r.canonicalize();
    return r;
  }
  static double to_double(const Rational& v) { return v.get_d(); }

  // "p/q" in lowest terms, or "p" for integers.
  static std::string to_string(const Rational& v) {
    Rational c = v;
    c.canonicalize();
    return c.get_str(10);
  }

  // Accepts "p/q", integers and decimal literals (converted exactly).
  static Rational parse(std::string_view text) {
    std::string_view s = detail::trim(text);
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
      std::string_view num = detail::trim(s.substr(0, slash));
      std::string_view den = detail::trim(s.substr(slash + 1));
      std::string_view num_digits = num;
      if (!num_digits.empty() && (num_digits.front() == '-' || num_digits.front() == '+'))
        num_digits.remove_prefix(1);
      if (!detail::all_digits(num_digits) || !detail::all_digits(den))
        throw ParseError("bad rational literal '" + std::string(text) + "'");
      mpz_class d(std::string(den), 10);
      if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
      std::string n(num.front() == '+' ? num.substr(1) : num);
      Rational r(mpz_class(n, 10), d);
      r.canonicalize();
      return r;
    }
    return detail::parse_decimal_exact(s);
  }

  static std::size_t bit_size(const Rational& v) {
    return mpz_sizeinbase(v.get_num_mpz_t(), 2) + mpz_sizeinbase(v.get_den_mpz_t(), 2);
  }
  static Rational abs(const Rational& v) { return ::abs(v); }
};

template <class S>
concept Scalar = requires {
  { ScalarTraits<S>::mode } -> std::convertible_to<NumericMode>;
};

template <Scalar S>
inline constexpr bool is_exact_v = ScalarTraits<S>::exact;

template <Scalar S>
std::string format_scalar(const S& v) {
  return ScalarTraits<S>::to_string(v);
}

template <Scalar S>
S parse_scalar(std::string_view text) {
  return ScalarTraits<S>::parse(text);
}

template <Scalar S>
double to_double(const S& v) {
  return ScalarTraits<S>::to_double(v);
}

}  // namespace hk
