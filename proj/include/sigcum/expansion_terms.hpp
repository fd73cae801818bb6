#pragma once

// Per-jump terms of the level-n cumulant and Magnus recursions.
//
// Notation for a jump at time u: dx = ΔX_u, ku = κ_u (value after the jump),
// km = κ_{u-} (value before). All sums run over compositions ℓ = (l_1..l_k) of n
// with k >= 2 parts. Inputs are split into homogeneous levels.

#include "sigcum/lie.hpp"
#include "sigcum/tensor.hpp"

#include <vector>

namespace sigcum::detail {

using Composition = std::vector<int>;

// Compositions of n into at least `min_parts` positive parts.
inline std::vector<Composition> compositions(int n, int min_parts = 2) {
  std::vector<Composition> out;
  Composition cur;
  auto rec = [&](auto&& self, int left) -> void {
    if (left == 0) {
      if (static_cast<int>(cur.size()) >= min_parts) out.push_back(cur);
      return;
    }
    for (int p = 1; p <= left; ++p) {
      cur.push_back(p);
      self(self, left - p);
      cur.pop_back();
    }
  };
  rec(rec, n);
  return out;
}

template <class S>
std::vector<Tensor<S>> homogeneous_parts(const Tensor<S>& x) {
  std::vector<Tensor<S>> out;
  for (int l = 0; l <= x.depth(); ++l) out.push_back(project_level(x, l));
  return out;
}

template <class S>
using Parts = std::vector<Tensor<S>>;

// ad a^{(l_{from})} ∘ ... ∘ ad a^{(l_{k})} (y); the innermost (last) operator acts first.
// `from` is a 1-based position in ℓ.
template <class S>
Tensor<S> ad_chain(const Parts<S>& a, const Composition& l, std::size_t from, Tensor<S> y) {
  for (std::size_t p = l.size(); p >= from && p >= 1; --p) {
    if (y.is_zero()) break;
    y = lie_bracket(a[static_cast<std::size_t>(l[p - 1])], y);
  }
  return y;
}

// Product of a^{(l_p)} for 1-based positions p in [lo, hi].
template <class S>
Tensor<S> part_product(const Parts<S>& a, const Composition& l, std::size_t lo, std::size_t hi,
                       const AlgebraShape& sh) {
  Tensor<S> r = Tensor<S>::unit(sh);
  for (std::size_t p = lo; p <= hi; ++p) r = concat_mul(r, a[static_cast<std::size_t>(l[p - 1])]);
  return r;
}

struct Weights {
  std::vector<Rational> fact;
  std::vector<Rational> bern;
  explicit Weights(int n) : fact(factorials(n + 1)), bern(bernoulli_numbers(n + 1)) {}
  Rational inv_fact(int k) const { return Rational(1) / fact[static_cast<std::size_t>(k)]; }
};

// Σ_{m<=j<=i} (-1)^{i-j} dx^{(l_1..l_m)} ku^{(l_{m+1}..l_j)} km^{(l_{j+1}..l_i)} / (m!(j-m)!(i-j)!),
// restricted by `skip(m, j)`.
template <class S, class Skip>
Tensor<S> alternating_products(const Parts<S>& dx, const Parts<S>& ku, const Parts<S>& km,
                               const Composition& l, std::size_t i, const Weights& w,
                               const AlgebraShape& sh, Skip skip) {
  Tensor<S> acc(sh);
  // Suffix products km^{(l_{j+1}..l_i)} for j = i down to 0.
  std::vector<Tensor<S>> km_suffix(i + 1, Tensor<S>::unit(sh));
  for (std::size_t j = i; j-- > 0;)
    km_suffix[j] = concat_mul(km[static_cast<std::size_t>(l[j])], km_suffix[j + 1]);
  Tensor<S> dx_prefix = Tensor<S>::unit(sh);
  for (std::size_t m = 0; m <= i; ++m) {
    if (m > 0) dx_prefix = concat_mul(dx_prefix, dx[static_cast<std::size_t>(l[m - 1])]);
    if (dx_prefix.is_zero()) break;
    Tensor<S> mid = dx_prefix;  // dx^{(l_1..l_m)} ku^{(l_{m+1}..l_j)}
    for (std::size_t j = m; j <= i; ++j) {
      if (j > m) mid = concat_mul(mid, ku[static_cast<std::size_t>(l[j - 1])]);
      if (mid.is_zero()) break;
      if (skip(m, j)) continue;
      Rational c = w.inv_fact(static_cast<int>(m)) * w.inv_fact(static_cast<int>(j - m)) *
                   w.inv_fact(static_cast<int>(i - j));
      if ((i - j) % 2 == 1) c = -c;
      acc.add_scaled(concat_mul(mid, km_suffix[j]), ScalarTraits<S>::from_rational(c));
    }
  }
  return acc;
}

// Σ_ℓ Mag(ℓ) at a jump: (1/k!) ad km^{(l_2)} ... ad km^{(l_k)} (Δκ^{(l_1)}), Δκ = ku - km.
template <class S>
Tensor<S> mag_jump(int n, const Parts<S>& dk, const Parts<S>& km, const Weights& w, const AlgebraShape& sh) {
  Tensor<S> acc(sh);
  for (const auto& l : compositions(n)) {
    const auto y = ad_chain(km, l, 2, dk[static_cast<std::size_t>(l[0])]);
    acc.add_scaled(y, ScalarTraits<S>::from_rational(w.inv_fact(static_cast<int>(l.size()))));
  }
  return acc;
}

// Σ_ℓ Jmp(ℓ): Σ_{0<=m<=j<=k} (-1)^{k-j} dx^{..} ku^{..} km^{..}/(m!(j-m)!(k-j)!)
//             - (1/k!) ad km^{(l_2)} ... ad km^{(l_k)} (Δκ^{(l_1)}).
template <class S>
Tensor<S> jmp_jump(int n, const Parts<S>& dx, const Parts<S>& ku, const Parts<S>& km, const Parts<S>& dk,
                   const Weights& w, const AlgebraShape& sh) {
  Tensor<S> acc(sh);
  for (const auto& l : compositions(n)) {
    const std::size_t k = l.size();
    acc += alternating_products(dx, ku, km, l, k, w, sh, [](std::size_t, std::size_t) { return false; });
    const auto y = ad_chain(km, l, 2, dk[static_cast<std::size_t>(l[0])]);
    acc.add_scaled(y, ScalarTraits<S>::from_rational(-w.inv_fact(static_cast<int>(k))));
  }
  return acc;
}

// Σ_ℓ HMag¹(ℓ) at a jump: B_{k-1}/(k-1)! ad km^{(l_2)} ... ad km^{(l_k)} (dx^{(l_1)}).
template <class S>
Tensor<S> hmag1_jump(int n, const Parts<S>& dx, const Parts<S>& km, const Weights& w, const AlgebraShape& sh) {
  Tensor<S> acc(sh);
  for (const auto& l : compositions(n)) {
    const int k = static_cast<int>(l.size());
    const Rational c = w.bern[static_cast<std::size_t>(k - 1)] * w.inv_fact(k - 1);
    if (c == 0) continue;
    acc.add_scaled(ad_chain(km, l, 2, dx[static_cast<std::size_t>(l[0])]), ScalarTraits<S>::from_rational(c));
  }
  return acc;
}

// Σ_ℓ HJmp(ℓ): Σ_{i=1..k} B_{k-i}/(k-i)! ad km^{(l_{i+1})} ... ad km^{(l_k)} (P_i), where P_i is the
// alternating product sum over 0 <= m <= j <= i with the single term (i=1, m=1) left out
// (that term is the dX part already carried by HMag¹).
template <class S>
Tensor<S> hjmp_jump(int n, const Parts<S>& dx, const Parts<S>& ku, const Parts<S>& km, const Weights& w,
                    const AlgebraShape& sh) {
  Tensor<S> acc(sh);
  for (const auto& l : compositions(n)) {
    const std::size_t k = l.size();
    for (std::size_t i = 1; i <= k; ++i) {
      const Rational c = w.bern[k - i] * w.inv_fact(static_cast<int>(k - i));
      if (c == 0) continue;
      auto skip = [i](std::size_t m, std::size_t) { return i == 1 && m == 1; };
      Tensor<S> p = alternating_products(dx, ku, km, l, i, w, sh, skip);
      if (p.is_zero()) continue;
      acc.add_scaled(ad_chain(km, l, i + 1, std::move(p)), ScalarTraits<S>::from_rational(c));
    }
  }
  return acc;
}

}  // namespace sigcum::detail
