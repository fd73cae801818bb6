#include "sigcum/scalar.hpp"

#include "sigcum/errors.hpp"

#include <cctype>

namespace sigcum {

namespace {

boost::multiprecision::mpz_int parse_integer(const std::string& s, const std::string& whole) {
  if (s.empty()) throw InputError("bad rational literal '" + whole + "'");
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) throw InputError("bad rational literal '" + whole + "'");
  for (std::size_t j = i; j < s.size(); ++j)
    if (!std::isdigit(static_cast<unsigned char>(s[j])))
      throw InputError("bad rational literal '" + whole + "'");
  // Leading zeros would make GMP read the digits as octal.
  std::string digits = s.substr(i);
  const auto first = digits.find_first_not_of('0');
  digits = first == std::string::npos ? "0" : digits.substr(first);
  boost::multiprecision::mpz_int v(digits);
  return s[0] == '-' ? boost::multiprecision::mpz_int(-v) : v;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    auto p = parse_integer(text.substr(0, slash), text);
    auto q = parse_integer(text.substr(slash + 1), text);
    if (q == 0) throw InputError("zero denominator in '" + text + "'");
    return Rational(p, q);
  }
  // Decimal literal: a.b[e±c] read exactly.
  std::string mant = text;
  long exponent = 0;
  const auto epos = text.find_first_of("eE");
  if (epos != std::string::npos) {
    mant = text.substr(0, epos);
    try {
      exponent = std::stol(text.substr(epos + 1));
    } catch (const std::exception&) {
      throw InputError("bad rational literal '" + text + "'");
    }
  }
  const auto dot = mant.find('.');
  if (dot != std::string::npos) {
    exponent -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  Rational r(parse_integer(mant, text));
  boost::multiprecision::mpz_int ten_pow = boost::multiprecision::pow(
      boost::multiprecision::mpz_int(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  if (exponent < 0)
    r /= Rational(ten_pow);
  else
    r *= Rational(ten_pow);
  return r;
}

std::string rational_to_string(const Rational& r) { return r.str(); }

}  // namespace sigcum
