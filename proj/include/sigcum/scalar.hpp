#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstdint>
#include <string>

namespace sigcum {

// Exact rational coefficients (GMP backed, no expression templates).
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <class S>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static double ratio(std::int64_t p, std::int64_t q) {
    return static_cast<double>(p) / static_cast<double>(q);
  }
  static double from_double(double x) { return x; }
  static double from_rational(const Rational& r) { return r.convert_to<double>(); }
  static double to_double(double x) { return x; }
  static bool is_zero(double x) { return x == 0.0; }
  static double abs(double x) { return std::fabs(x); }
  static const char* name() { return "float"; }
};

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static Rational ratio(std::int64_t p, std::int64_t q) {
    return Rational(boost::multiprecision::mpz_int(p), boost::multiprecision::mpz_int(q));
  }
  // Exact binary value of x.
  static Rational from_double(double x) { return Rational(x); }
  static Rational from_rational(const Rational& r) { return r; }
  static double to_double(const Rational& x) { return x.convert_to<double>(); }
  static bool is_zero(const Rational& x) { return x.is_zero(); }
  static Rational abs(const Rational& x) { return boost::multiprecision::abs(x); }
  static const char* name() { return "rational"; }
};

template <class S>
inline double to_double(const S& x) {
  return ScalarTraits<S>::to_double(x);
}

template <class S>
inline bool is_zero_scalar(const S& x) {
  return ScalarTraits<S>::is_zero(x);
}

// Parses "p/q", "p" or a decimal literal into an exact rational.
Rational parse_rational(const std::string& text);

std::string rational_to_string(const Rational& r);

}  // namespace sigcum
