#pragma once

// Random inputs and brute-force oracles shared by the unit and acceptance tests.

#include "sigcum/lie.hpp"
#include "sigcum/sym_tensor.hpp"
#include "sigcum/tensor.hpp"

#include <random>
#include <vector>

namespace sigcum::testing {

using Q = Rational;

inline Q rq(std::mt19937_64& rng, int num_range = 5, int den_range = 4) {
  std::uniform_int_distribution<int> num(-num_range, num_range);
  std::uniform_int_distribution<int> den(1, den_range);
  return Q(num(rng)) / Q(den(rng));
}

inline double rd(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return u(rng);
}

template <class S>
S random_scalar(std::mt19937_64& rng) {
  if constexpr (std::is_same_v<S, Q>)
    return rq(rng);
  else
    return rd(rng);
}

// Random coefficients on every level; `sparsity` is the chance of leaving one at zero.
template <class S>
Tensor<S> random_tensor(const AlgebraShape& sh, std::mt19937_64& rng, double sparsity = 0.0) {
  Tensor<S> t(sh);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto& c : t.data())
    if (u(rng) >= sparsity) c = random_scalar<S>(rng);
  return t;
}

template <class S>
Tensor<S> random_T0(const AlgebraShape& sh, std::mt19937_64& rng, double sparsity = 0.0) {
  auto t = random_tensor<S>(sh, rng, sparsity);
  t.scalar() = S(0);
  return t;
}

template <class S>
Tensor<S> random_level_one(const AlgebraShape& sh, std::mt19937_64& rng) {
  Tensor<S> t(sh);
  for (auto& c : t.level(1)) c = random_scalar<S>(rng);
  return t;
}

// Product by explicit enumeration of every splitting w = w1 w2.
template <class S>
Tensor<S> product_by_splitting(const Tensor<S>& a, const Tensor<S>& b) {
  Tensor<S> r(a.shape());
  const int d = a.dim();
  for (int n = 0; n <= a.depth(); ++n)
    for (std::size_t i = 0; i < a.shape().level_size(n); ++i) {
      const Word w = word_from_index(i, n, d);
      S acc(0);
      for (int cut = 0; cut <= n; ++cut) {
        Word w1(w.begin(), w.begin() + cut), w2(w.begin() + cut, w.end());
        acc += a.at(w1) * b.at(w2);
      }
      r.at(w) = acc;
    }
  return r;
}

// Σ_k a_k (ad x)^k (y) expanded into left/right multiplications:
// (ad x)^k y = Σ_j C(k,j) (-1)^j x^{k-j} y x^j, products via the splitting oracle.
template <class S>
Tensor<S> ad_series_by_expansion(const std::vector<S>& a, const Tensor<S>& x, const Tensor<S>& y) {
  const auto& sh = x.shape();
  std::vector<Tensor<S>> xp{Tensor<S>::unit(sh)};
  for (int k = 1; k <= sh.depth(); ++k) xp.push_back(product_by_splitting(xp.back(), x));
  Tensor<S> r(sh);
  for (std::size_t k = 0; k < a.size() && static_cast<int>(k) < std::max(sh.depth(), 1); ++k) {
    S binom(1);
    for (std::size_t j = 0; j <= k; ++j) {
      Tensor<S> term = product_by_splitting(product_by_splitting(xp[k - j], y), xp[j]);
      S c = a[k] * binom;
      if (j % 2 == 1) c = -c;
      r.add_scaled(term, c);
      binom = binom * S(static_cast<long>(k - j)) / S(static_cast<long>(j + 1));
    }
  }
  return r;
}

}  // namespace sigcum::testing
