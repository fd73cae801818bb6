#pragma once

#include "sigcum/sym_tensor.hpp"
#include "sigcum/tensor.hpp"

#include <json.hpp>

#include <string>

namespace sigcum {

using json = nlohmann::json;

// Floats are written as JSON numbers (shortest round-trip form); rationals as "p/q" strings.
inline json scalar_to_json(double x) { return x; }
inline json scalar_to_json(const Rational& x) {
  if (boost::multiprecision::denominator(x) == 1) {
    const auto num = boost::multiprecision::numerator(x);
    if (boost::multiprecision::abs(num) < boost::multiprecision::mpz_int(1LL << 52))
      return num.convert_to<long long>();
  }
  return x.str();
}

template <class S>
S scalar_from_json(const json& j) {
  if (j.is_number_integer()) return S(j.get<long long>());
  if (j.is_number()) return ScalarTraits<S>::from_double(j.get<double>());
  if (j.is_string()) return ScalarTraits<S>::from_rational(parse_rational(j.get<std::string>()));
  throw InputError("expected a number or a rational string, got " + j.dump());
}

template <class S>
json to_json(const Tensor<S>& x) {
  json levels = json::array();
  for (int k = 0; k <= x.depth(); ++k) {
    json lv = json::array();
    for (const S& c : x.level(k)) lv.push_back(scalar_to_json(c));
    levels.push_back(std::move(lv));
  }
  return json{{"d", x.dim()}, {"N", x.depth()}, {"levels", std::move(levels)}};
}

inline int json_int_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number_integer())
    throw InputError(std::string("missing or non-integer field '") + key + "'");
  return j[key].get<int>();
}

template <class S>
Tensor<S> tensor_from_json(const json& j) {
  const int d = json_int_field(j, "d");
  const int n = json_int_field(j, "N");
  if (!j.contains("levels") || !j["levels"].is_array())
    throw InputError("tensor JSON needs a 'levels' array");
  const json& levels = j["levels"];
  if (static_cast<int>(levels.size()) != n + 1)
    throw InputError("tensor JSON: expected N+1 = " + std::to_string(n + 1) + " levels");
  Tensor<S> x{AlgebraShape(d, n)};
  for (int k = 0; k <= n; ++k) {
    const json& lv = levels[static_cast<std::size_t>(k)];
    auto out = x.level(k);
    if (!lv.is_array() || lv.size() != out.size())
      throw InputError("tensor JSON: level " + std::to_string(k) + " must have d^k = " +
                       std::to_string(out.size()) + " entries");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scalar_from_json<S>(lv[i]);
  }
  return x;
}

template <class S>
json to_json(const SymTensor<S>& x) {
  json levels = json::array();
  for (int k = 0; k <= x.depth(); ++k) {
    json lv = json::array();
    for (const S& c : x.level(k)) lv.push_back(scalar_to_json(c));
    levels.push_back(std::move(lv));
  }
  return json{{"d", x.dim()}, {"N", x.depth()}, {"symmetric", true}, {"levels", std::move(levels)}};
}

template <class S>
SymTensor<S> sym_tensor_from_json(const json& j) {
  const int d = json_int_field(j, "d");
  const int n = json_int_field(j, "N");
  if (!j.contains("levels") || !j["levels"].is_array() ||
      static_cast<int>(j["levels"].size()) != n + 1)
    throw InputError("symmetric tensor JSON needs N+1 levels");
  SymTensor<S> x{SymShape(d, n)};
  for (int k = 0; k <= n; ++k) {
    const json& lv = j["levels"][static_cast<std::size_t>(k)];
    auto out = x.level(k);
    if (!lv.is_array() || lv.size() != out.size())
      throw InputError("symmetric tensor JSON: level " + std::to_string(k) + " must have " +
                       std::to_string(out.size()) + " entries");
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = scalar_from_json<S>(lv[i]);
  }
  return x;
}

}  // namespace sigcum
