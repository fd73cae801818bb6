#pragma once

// Conditional signature cumulants on finite trees: the backward-induction oracle, the
// G- and H-form level recursions, the commutative recursion and the discrete Bartlett identities.

#include "sigcum/expansion_terms.hpp"
#include "sigcum/sym_tensor.hpp"
#include "sigcum/tree.hpp"

#include <vector>

namespace sigcum {

// μ(v) = Σ_c p_c exp(Δx_c) μ(c), μ = 1 on leaves.
template <class S>
AdaptedTensorProcess<S> tree_expected_signature(const FiniteTreeModel<S>& m) {
  const auto& sh = m.shape();
  AdaptedTensorProcess<S> mu(m.size(), Tensor<S>::unit(sh));
  for (int v : m.postorder()) {
    if (m.is_leaf(v)) continue;
    Tensor<S> acc(sh);
    for (int c : m.node(v).children) {
      const auto& n = m.node(c);
      Tensor<S> e = concat_mul(exp_trunc(n.jump), mu[static_cast<std::size_t>(c)]);
      acc.add_scaled(e, n.prob);
    }
    acc.scalar() = S(1);  // Σ p_c, up to rounding in float mode
    mu[static_cast<std::size_t>(v)] = std::move(acc);
  }
  return mu;
}

template <class S>
AdaptedTensorProcess<S> tree_signature_cumulant(const FiniteTreeModel<S>& m) {
  auto mu = tree_expected_signature(m);
  for (auto& x : mu) x = log_trunc(x);
  return mu;
}

template <class S>
Tensor<S> tree_expected_signature(const FiniteTreeModel<S>& m, int node) {
  return tree_expected_signature(m).at(static_cast<std::size_t>(node));
}

template <class S>
Tensor<S> tree_signature_cumulant(const FiniteTreeModel<S>& m, int node) {
  return log_trunc(tree_expected_signature(m, node));
}

enum class RecursionForm { G, H };

namespace detail {

// Level-by-level recursion. With tower aggregation over the edges (v -> c):
//   κ^{(n)}(v) = Σ_c p_c (Δx_c^{(n)} + term_n(Δx_c, κ(c), κ(v)) + κ^{(n)}(c)),
// where κ_{u-} at the jump into c is the value at the parent v.
template <class S>
AdaptedTensorProcess<S> tree_recursion(const FiniteTreeModel<S>& m, RecursionForm form) {
  const auto& sh = m.shape();
  const int depth = sh.depth();
  const Weights w(depth + 1);
  std::vector<Parts<S>> kappa(m.size(), Parts<S>(static_cast<std::size_t>(depth) + 1, Tensor<S>(sh)));
  std::vector<Parts<S>> dx(m.size());
  for (std::size_t v = 1; v < m.size(); ++v) dx[v] = homogeneous_parts(m.node(static_cast<int>(v)).jump);

  for (int v : m.postorder()) {
    if (m.is_leaf(v)) continue;
    auto& kv = kappa[static_cast<std::size_t>(v)];
    for (int n = 1; n <= depth; ++n) {
      Tensor<S> acc(sh);
      for (int c : m.node(v).children) {
        const auto& x = dx[static_cast<std::size_t>(c)];
        const auto& kc = kappa[static_cast<std::size_t>(c)];
        Tensor<S> term = x[static_cast<std::size_t>(n)] + kc[static_cast<std::size_t>(n)];
        if (n >= 2) {
          if (form == RecursionForm::G) {
            Parts<S> dk(kc.size(), Tensor<S>(sh));
            for (int l = 1; l < n; ++l)
              dk[static_cast<std::size_t>(l)] = kc[static_cast<std::size_t>(l)] - kv[static_cast<std::size_t>(l)];
            term += mag_jump(n, dk, kv, w, sh);
            term += jmp_jump(n, x, kc, kv, dk, w, sh);
          } else {
            term += hmag1_jump(n, x, kv, w, sh);
            term += hjmp_jump(n, x, kc, kv, w, sh);
          }
        }
        acc.add_scaled(term, m.node(c).prob);
      }
      kv[static_cast<std::size_t>(n)] = std::move(acc);
    }
  }
  AdaptedTensorProcess<S> out;
  out.reserve(m.size());
  for (const auto& parts : kappa) {
    Tensor<S> r(sh);
    for (int n = 1; n <= depth; ++n) r += parts[static_cast<std::size_t>(n)];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace detail

// κ level by level from Mag and Jmp (pure-jump tree: the continuous terms vanish).
template <class S>
AdaptedTensorProcess<S> recursion_G(const FiniteTreeModel<S>& m) {
  return detail::tree_recursion(m, RecursionForm::G);
}

// κ level by level from HMag¹ and HJmp.
template <class S>
AdaptedTensorProcess<S> recursion_H(const FiniteTreeModel<S>& m) {
  return detail::tree_recursion(m, RecursionForm::H);
}

template <class S>
using SymProcess = std::vector<SymTensor<S>>;

// X̂ at every node: symmetric projection of the jumps summed along the path from the root.
template <class S>
SymProcess<S> tree_sym_state(const FiniteTreeModel<S>& m) {
  const SymShape ss(m.shape().dim(), m.shape().depth());
  SymProcess<S> x(m.size(), SymTensor<S>(ss));
  for (std::size_t v = 1; v < m.size(); ++v) {
    const auto& n = m.node(static_cast<int>(v));
    x[v] = x[static_cast<std::size_t>(n.parent)] + sym_project(n.jump);
  }
  return x;
}

// log E_v exp(Ξ) by backward induction; Ξ is read on the leaves.
template <class S>
SymProcess<S> tree_sym_cumulant_oracle(const FiniteTreeModel<S>& m, const SymProcess<S>& xi) {
  SymProcess<S> e(xi.size(), SymTensor<S>(xi.at(0).shape()));
  for (int v : m.postorder()) {
    const auto i = static_cast<std::size_t>(v);
    if (m.is_leaf(v)) {
      e[i] = sym_exp(xi[i]);
      continue;
    }
    for (int c : m.node(v).children) e[i].add_scaled(e[static_cast<std::size_t>(c)], m.node(c).prob);
    e[i].scalar() = S(1);
  }
  for (auto& x : e) x = sym_log(x);
  return e;
}

// 𝕂^{(n)}(v) = Σ_c p_c (𝕂^{(n)}(c) + Σ_{k>=2} 1/k! Σ_{‖ℓ‖=n,|ℓ|=k} Δ𝕂^{(l_1)} ... Δ𝕂^{(l_k)}), 𝕂 = Ξ on leaves.
template <class S>
SymProcess<S> commutative_recursion(const FiniteTreeModel<S>& m, const SymProcess<S>& xi) {
  const SymShape& ss = xi.at(0).shape();
  const int depth = ss.depth();
  const auto fact = factorials(depth + 1);
  std::vector<std::vector<detail::Composition>> comps(static_cast<std::size_t>(depth) + 1);
  for (int n = 2; n <= depth; ++n) comps[static_cast<std::size_t>(n)] = detail::compositions(n);

  auto split = [&](const SymTensor<S>& x) {
    std::vector<SymTensor<S>> parts;
    for (int l = 0; l <= depth; ++l) parts.push_back(sym_project_level(x, l));
    return parts;
  };
  SymProcess<S> k(m.size(), SymTensor<S>(ss));
  for (int v : m.postorder()) {
    const auto i = static_cast<std::size_t>(v);
    if (m.is_leaf(v)) {
      k[i] = xi[i];
      k[i].scalar() = S(0);
      continue;
    }
    for (int n = 1; n <= depth; ++n) {
      const auto kv = split(k[i]);
      SymTensor<S> acc(ss);
      for (int c : m.node(v).children) {
        SymTensor<S> term = sym_project_level(k[static_cast<std::size_t>(c)], n);
        if (n >= 2) {
          const auto kc = split(k[static_cast<std::size_t>(c)]);
          std::vector<SymTensor<S>> dk;
          for (int l = 0; l <= depth; ++l) dk.push_back(kc[static_cast<std::size_t>(l)] - kv[static_cast<std::size_t>(l)]);
          for (const auto& l : comps[static_cast<std::size_t>(n)]) {
            SymTensor<S> p = SymTensor<S>::unit(ss);
            for (int part : l) p = sym_mul(p, dk[static_cast<std::size_t>(part)]);
            term.add_scaled(p, ScalarTraits<S>::from_rational(Rational(1) / fact[l.size()]));
          }
        }
        acc.add_scaled(term, m.node(c).prob);
      }
      k[i] += acc;
    }
  }
  return k;
}

// Both sides of the level-2 and level-3 discrete Bartlett identities at a node, in classical
// cumulant units (c_2 = 2 𝕂^{(2)}, c_3 = 6 𝕂^{(3)}):
//   c_2(v) = E_v Σ_u (Δℓ_u)^2,   c_3(v) = E_v Σ_u [(Δℓ_u)^3 + 3 Δℓ_u Δc_2(u)],   ℓ_u = E_u Ξ.
template <class S>
struct BartlettRow {
  int node = 0;
  S lhs2, rhs2, lhs3, rhs3;
  S residual2() const { return lhs2 - rhs2; }
  S residual3() const { return lhs3 - rhs3; }
};

// Ξ is a scalar payoff read on the leaves.
template <class S>
std::vector<BartlettRow<S>> discrete_bartlett(const FiniteTreeModel<S>& m, const std::vector<S>& xi) {
  const std::size_t n = m.size();
  // Left: cumulants of Ξ from the symmetric-algebra oracle at d = 1.
  const SymShape ss(1, 3);
  SymProcess<S> payoff(n, SymTensor<S>(ss));
  for (std::size_t v = 0; v < n; ++v) payoff[v].at({1}) = xi.at(v);
  const auto k = tree_sym_cumulant_oracle(m, payoff);

  // Right: martingale ℓ, conditional variance from raw moments, then the two sums.
  std::vector<S> ell(n, S(0)), second(n, S(0)), var(n, S(0)), sum2(n, S(0)), sum3(n, S(0));
  for (int v : m.postorder()) {
    const auto i = static_cast<std::size_t>(v);
    if (m.is_leaf(v)) {
      ell[i] = xi[i];
      second[i] = xi[i] * xi[i];
      continue;
    }
    for (int c : m.node(v).children) {
      const S& p = m.node(c).prob;
      ell[i] += p * ell[static_cast<std::size_t>(c)];
      second[i] += p * second[static_cast<std::size_t>(c)];
    }
    var[i] = second[i] - ell[i] * ell[i];
    for (int c : m.node(v).children) {
      const auto j = static_cast<std::size_t>(c);
      const S& p = m.node(c).prob;
      const S dl = ell[j] - ell[i];
      sum2[i] += p * (dl * dl + sum2[j]);
      sum3[i] += p * (dl * dl * dl + S(3) * dl * (var[j] - var[i]) + sum3[j]);
    }
  }
  std::vector<BartlettRow<S>> rows;
  rows.reserve(n);
  for (std::size_t v = 0; v < n; ++v)
    rows.push_back({static_cast<int>(v), S(2) * k[v].at({1, 1}), sum2[v], S(6) * k[v].at({1, 1, 1}), sum3[v]});
  return rows;
}

}  // namespace sigcum
