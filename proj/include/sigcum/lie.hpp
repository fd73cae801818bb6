#pragma once

#include "sigcum/tensor.hpp"

#include <functional>
#include <initializer_list>
#include <vector>

namespace sigcum {

// [x, y] = xy - yx
template <class S>
Tensor<S> lie_bracket(const Tensor<S>& x, const Tensor<S>& y) {
  Tensor<S> r = concat_mul(x, y);
  r -= concat_mul(y, x);
  return r;
}

// Power series Σ a_k z^k evaluated at z = ad x. Coefficients past N-1 never matter.
template <class S>
struct AdSeries {
  std::vector<S> coeffs;
};

// Σ_{k<N} a_k (ad x)^k (y), Horner on ad.
template <class S>
Tensor<S> ad_series_apply(const AdSeries<S>& s, const Tensor<S>& x, const Tensor<S>& y) {
  require_same_shape(x.shape(), y.shape(), "ad_series_apply");
  const int n = x.depth();
  int terms = std::min<int>(static_cast<int>(s.coeffs.size()), std::max(n, 1));
  if (terms == 0) return Tensor<S>(y.shape());
  if (x.is_zero()) terms = 1;
  Tensor<S> r = y * s.coeffs[static_cast<std::size_t>(terms - 1)];
  for (int k = terms - 2; k >= 0; --k) {
    Tensor<S> next = lie_bracket(x, r);
    next.add_scaled(y, s.coeffs[static_cast<std::size_t>(k)]);
    r = std::move(next);
  }
  return r;
}

// B_0..B_n with B_1 = -1/2.
std::vector<Rational> bernoulli_numbers(int n);
// 0!..n!
std::vector<Rational> factorials(int n);

template <class S>
std::vector<S> to_scalars(const std::vector<Rational>& v) {
  std::vector<S> out;
  out.reserve(v.size());
  for (const auto& r : v) out.push_back(ScalarTraits<S>::from_rational(r));
  return out;
}

// G(z) = (e^z - 1)/z: a_k = 1/(k+1)!
template <class S>
AdSeries<S> series_G(int n) {
  const auto f = factorials(n + 1);
  AdSeries<S> s;
  for (int k = 0; k < n; ++k)
    s.coeffs.push_back(ScalarTraits<S>::from_rational(Rational(1) / f[static_cast<std::size_t>(k + 1)]));
  return s;
}

// H(z) = z/(e^z - 1): a_k = B_k / k!
template <class S>
AdSeries<S> series_H(int n) {
  const auto b = bernoulli_numbers(n);
  const auto f = factorials(n);
  AdSeries<S> s;
  for (int k = 0; k < n; ++k)
    s.coeffs.push_back(ScalarTraits<S>::from_rational(b[static_cast<std::size_t>(k)] / f[static_cast<std::size_t>(k)]));
  return s;
}

// e^z: a_k = 1/k!
template <class S>
AdSeries<S> series_exp(int n) {
  const auto f = factorials(n);
  AdSeries<S> s;
  for (int k = 0; k < n; ++k)
    s.coeffs.push_back(ScalarTraits<S>::from_rational(Rational(1) / f[static_cast<std::size_t>(k)]));
  return s;
}

template <class S>
Tensor<S> op_G(const Tensor<S>& x, const Tensor<S>& v) {
  require_T0(x, "op_G");
  return ad_series_apply(series_G<S>(x.depth()), x, v);
}

template <class S>
Tensor<S> op_H(const Tensor<S>& x, const Tensor<S>& v) {
  require_T0(x, "op_H");
  return ad_series_apply(series_H<S>(x.depth()), x, v);
}

// Element of 𝒯⊗𝒯 with blocks (l1, l2), l1, l2 >= 1, l1 + l2 <= N.
// Block (l1, l2) is a row-major d^{l1} × d^{l2} array.
template <class S>
class OuterTensor {
 public:
  explicit OuterTensor(AlgebraShape shape) : shape_(std::move(shape)) {
    const int n = shape_.depth();
    offsets_.assign(static_cast<std::size_t>((n + 1) * (n + 1)), npos);
    std::size_t total = 0;
    for (int l1 = 1; l1 < n; ++l1)
      for (int l2 = 1; l1 + l2 <= n; ++l2) {
        offsets_[slot(l1, l2)] = total;
        total += shape_.level_size(l1) * shape_.level_size(l2);
      }
    if (total > max_coefficients()) throw ResourceError("outer tensor exceeds the memory guard");
    data_.assign(total, S(0));
  }

  const AlgebraShape& shape() const { return shape_; }
  int depth() const { return shape_.depth(); }
  int dim() const { return shape_.dim(); }

  bool has_block(int l1, int l2) const {
    return l1 >= 1 && l2 >= 1 && l1 + l2 <= depth();
  }
  std::span<S> block(int l1, int l2) {
    check_block(l1, l2);
    return std::span<S>(data_).subspan(offsets_[slot(l1, l2)],
                                       shape_.level_size(l1) * shape_.level_size(l2));
  }
  std::span<const S> block(int l1, int l2) const {
    check_block(l1, l2);
    return std::span<const S>(data_).subspan(offsets_[slot(l1, l2)],
                                             shape_.level_size(l1) * shape_.level_size(l2));
  }
  S& at(const Word& w1, const Word& w2) {
    const int l1 = static_cast<int>(w1.size());
    const int l2 = static_cast<int>(w2.size());
    return block(l1, l2)[word_index(w1, dim()) * shape_.level_size(l2) + word_index(w2, dim())];
  }
  const S& at(const Word& w1, const Word& w2) const {
    return const_cast<OuterTensor*>(this)->at(w1, w2);
  }
  std::span<const S> data() const { return data_; }
  std::span<S> data() { return data_; }

  OuterTensor& operator+=(const OuterTensor& o) {
    require_same_shape(shape_, o.shape_, "outer tensor addition");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  OuterTensor& operator*=(const S& c) {
    for (S& x : data_) x *= c;
    return *this;
  }
  friend OuterTensor operator+(OuterTensor a, const OuterTensor& b) { return a += b; }
  friend OuterTensor operator*(const S& c, OuterTensor a) { return a *= c; }

  // a ⊗ b restricted to the stored blocks.
  static OuterTensor outer(const Tensor<S>& a, const Tensor<S>& b) {
    require_same_shape(a.shape(), b.shape(), "outer product");
    OuterTensor r(a.shape());
    for (int l1 = 1; l1 < a.depth(); ++l1)
      for (int l2 = 1; l1 + l2 <= a.depth(); ++l2)
        accumulate_level_product(r.block(l1, l2), a.level(l1), b.level(l2));
    return r;
  }

  // m(A): concatenate the two legs. Block (l1,l2) flattens onto level l1+l2.
  Tensor<S> multiply() const {
    Tensor<S> r(shape_);
    for (int l1 = 1; l1 < depth(); ++l1)
      for (int l2 = 1; l1 + l2 <= depth(); ++l2) {
        auto src = block(l1, l2);
        auto out = r.level(l1 + l2);
        for (std::size_t i = 0; i < src.size(); ++i) out[i] += src[i];
      }
    return r;
  }

  // A^{w1,w2} = A^{w2,w1} for all word pairs.
  bool is_symmetric() const {
    for (int l1 = 1; l1 < depth(); ++l1)
      for (int l2 = 1; l1 + l2 <= depth(); ++l2) {
        auto a = block(l1, l2);
        auto b = block(l2, l1);
        const std::size_t n1 = shape_.level_size(l1), n2 = shape_.level_size(l2);
        for (std::size_t i = 0; i < n1; ++i)
          for (std::size_t j = 0; j < n2; ++j)
            if (a[i * n2 + j] != b[j * n1 + i]) return false;
      }
    return true;
  }

  // Calls f(left basis tensor e_{w1}, right tensor Σ_{w2} A^{w1,w2} e_{w2}) for every
  // left word with a nonzero row.
  template <class F>
  void for_each_row(F&& f) const {
    for (int l1 = 1; l1 < depth(); ++l1) {
      for (std::size_t i = 0; i < shape_.level_size(l1); ++i) {
        Tensor<S> right(shape_);
        bool any = false;
        for (int l2 = 1; l1 + l2 <= depth(); ++l2) {
          auto src = block(l1, l2);
          const std::size_t n2 = shape_.level_size(l2);
          auto out = right.level(l2);
          for (std::size_t j = 0; j < n2; ++j) {
            out[j] = src[i * n2 + j];
            if (!ScalarTraits<S>::is_zero(out[j])) any = true;
          }
        }
        if (!any) continue;
        Tensor<S> left(shape_);
        left.level(l1)[i] = S(1);
        f(left, right);
      }
    }
  }

  friend bool operator==(const OuterTensor& a, const OuterTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t slot(int l1, int l2) const {
    return static_cast<std::size_t>(l1 * (depth() + 1) + l2);
  }
  void check_block(int l1, int l2) const {
    if (!has_block(l1, l2))
      throw ShapeError("outer tensor block (" + std::to_string(l1) + "," + std::to_string(l2) +
                       ") is not stored");
  }

  AlgebraShape shape_;
  std::vector<std::size_t> offsets_;
  std::vector<S> data_;
};

namespace detail {

// (ad x)^k (y) for k = 0..N-1, stopping once the powers vanish.
template <class S>
std::vector<Tensor<S>> ad_powers(const Tensor<S>& x, const Tensor<S>& y) {
  std::vector<Tensor<S>> out;
  out.push_back(y);
  for (int k = 1; k < x.depth(); ++k) {
    Tensor<S> next = lie_bracket(x, out.back());
    if (next.is_zero()) break;
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace detail

// Q(ad x)(A) = Σ_{n,m} 2/((n+1)! m! (n+m+2)) · (ad x)^n(left) (ad x)^m(right), summed over A.
template <class S>
Tensor<S> op_Q(const Tensor<S>& x, const OuterTensor<S>& a, bool check_symmetry = false) {
  require_T0(x, "op_Q");
  require_same_shape(x.shape(), a.shape(), "op_Q");
  if (check_symmetry && !a.is_symmetric()) throw DomainError("op_Q: outer tensor is not symmetric");
  const int n = x.depth();
  const auto f = factorials(n + 1);
  Tensor<S> r(x.shape());
  a.for_each_row([&](const Tensor<S>& left, const Tensor<S>& right) {
    const auto p = detail::ad_powers(x, left);
    const auto q = detail::ad_powers(x, right);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) {
        const Rational c = Rational(2) / (f[i + 1] * f[j] * Rational(static_cast<long>(i + j + 2)));
        r.add_scaled(concat_mul(p[i], q[j]), ScalarTraits<S>::from_rational(c));
      }
  });
  return r;
}

// Two-term form: Σ (ad x)^n(b)(ad x)^m(a)/((n+1)!(m+1)!)
//              + Σ [(ad x)^n(b), (ad x)^m(a)] / ((n+m+2)(n+1)! m!)   for A = a ⊗ b.
template <class S>
Tensor<S> op_Q_tilde(const Tensor<S>& x, const OuterTensor<S>& a) {
  require_T0(x, "op_Q_tilde");
  require_same_shape(x.shape(), a.shape(), "op_Q_tilde");
  const int n = x.depth();
  const auto f = factorials(n + 1);
  Tensor<S> r(x.shape());
  a.for_each_row([&](const Tensor<S>& left, const Tensor<S>& right) {
    const auto pa = detail::ad_powers(x, left);
    const auto pb = detail::ad_powers(x, right);
    for (std::size_t i = 0; i < pb.size(); ++i)
      for (std::size_t j = 0; j < pa.size(); ++j) {
        const Rational c1 = Rational(1) / (f[i + 1] * f[j + 1]);
        const Rational c2 = Rational(1) / (Rational(static_cast<long>(i + j + 2)) * f[i + 1] * f[j]);
        r.add_scaled(concat_mul(pb[i], pa[j]), ScalarTraits<S>::from_rational(c1));
        r.add_scaled(lie_bracket(pb[i], pa[j]), ScalarTraits<S>::from_rational(c2));
      }
  });
  return r;
}

// (Id ⊙ G(ad x))(A): identity on the left leg, G(ad x) on the right, then multiply.
template <class S>
Tensor<S> op_IdG(const Tensor<S>& x, const OuterTensor<S>& a) {
  require_T0(x, "op_IdG");
  require_same_shape(x.shape(), a.shape(), "op_IdG");
  const auto g = series_G<S>(x.depth());
  Tensor<S> r(x.shape());
  a.for_each_row([&](const Tensor<S>& left, const Tensor<S>& right) {
    r += concat_mul(left, ad_series_apply(g, x, right));
  });
  return r;
}

// log(exp(x_1) ··· exp(x_n))
template <class S>
Tensor<S> bch(const std::vector<Tensor<S>>& xs) {
  if (xs.empty()) throw DomainError("bch: needs at least one argument");
  Tensor<S> prod = Tensor<S>::unit(xs.front().shape());
  for (const auto& x : xs) {
    require_same_shape(prod.shape(), x.shape(), "bch");
    prod = concat_mul(prod, exp_trunc(x));
  }
  return log_trunc(prod);
}

template <class S>
Tensor<S> bch(const Tensor<S>& x, const Tensor<S>& y) {
  return log_trunc(concat_mul(exp_trunc(x), exp_trunc(y)));
}

// x2 + ∫_0^1 Ψ(e^{t ad x1} ∘ e^{ad x2})(x1) dt with Ψ(z) = Σ (-1)^n (z-1)^n / (n+1).
// The integrand is a polynomial in t with tensor coefficients; it is integrated termwise.
template <class S>
Tensor<S> bch_integral(const Tensor<S>& x1, const Tensor<S>& x2) {
  require_same_shape(x1.shape(), x2.shape(), "bch_integral");
  require_T0(x1, "bch_integral");
  require_T0(x2, "bch_integral");
  const auto& sh = x1.shape();
  const int n = sh.depth();
  using Poly = std::vector<Tensor<S>>;  // coefficient of t^j
  const auto expc = series_exp<S>(std::max(n, 1));

  auto exp_ad_x2 = [&](const Poly& p) {
    Poly out;
    for (const auto& c : p) out.push_back(ad_series_apply(expc, x2, c));
    return out;
  };
  // e^{t ad x1}: Σ_k t^k (ad x1)^k / k!
  auto exp_ad_t_x1 = [&](const Poly& p) {
    Poly out(p.size() + static_cast<std::size_t>(n), Tensor<S>(sh));
    for (std::size_t j = 0; j < p.size(); ++j) {
      Tensor<S> cur = p[j];
      for (int k = 0; k < std::max(n, 1); ++k) {
        if (cur.is_zero()) break;
        out[j + static_cast<std::size_t>(k)].add_scaled(cur, expc.coeffs[static_cast<std::size_t>(k)]);
        cur = lie_bracket(x1, cur);
      }
    }
    while (out.size() > 1 && out.back().is_zero()) out.pop_back();
    return out;
  };

  Poly y{x1};
  Poly psi(1, Tensor<S>(sh));
  for (int m = 0; m < std::max(n, 1); ++m) {
    const S c = ScalarTraits<S>::ratio(m % 2 == 0 ? 1 : -1, m + 1);
    if (psi.size() < y.size()) psi.resize(y.size(), Tensor<S>(sh));
    for (std::size_t j = 0; j < y.size(); ++j) psi[j].add_scaled(y[j], c);
    Poly z = exp_ad_t_x1(exp_ad_x2(y));
    for (std::size_t j = 0; j < y.size(); ++j) z[j] -= y[j];
    y = std::move(z);
    bool all_zero = true;
    for (const auto& t : y) all_zero = all_zero && t.is_zero();
    if (all_zero) break;
  }
  Tensor<S> r = x2;
  for (std::size_t j = 0; j < psi.size(); ++j)
    r.add_scaled(psi[j], ScalarTraits<S>::ratio(1, static_cast<std::int64_t>(j + 1)));
  return r;
}

// Left-normed bracketing e_{i1..in} -> [..[e_{i1}, e_{i2}], .., e_{in}], extended linearly.
template <class S>
Tensor<S> dynkin_map(const Tensor<S>& x) {
  const int d = x.dim();
  Tensor<S> r(x.shape());
  // Recursive on the last letter: D(y e_c) = D(y) e_c - e_c D(y).
  std::function<std::vector<S>(std::vector<S>, int)> rec = [&](std::vector<S> v, int level) {
    if (level <= 1) return v;
    const std::size_t inner = v.size() / static_cast<std::size_t>(d);
    std::vector<S> out(v.size(), S(0));
    for (int c = 0; c < d; ++c) {
      std::vector<S> yc(inner);
      bool any = false;
      for (std::size_t u = 0; u < inner; ++u) {
        yc[u] = v[u * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)];
        any = any || !ScalarTraits<S>::is_zero(yc[u]);
      }
      if (!any) continue;
      const auto dy = rec(std::move(yc), level - 1);
      for (std::size_t u = 0; u < inner; ++u) {
        out[u * static_cast<std::size_t>(d) + static_cast<std::size_t>(c)] += dy[u];
        out[static_cast<std::size_t>(c) * inner + u] -= dy[u];
      }
    }
    return out;
  };
  for (int k = 1; k <= x.depth(); ++k) {
    auto src = x.level(k);
    auto res = rec(std::vector<S>(src.begin(), src.end()), k);
    std::copy(res.begin(), res.end(), r.level(k).begin());
  }
  return r;
}

// Dynkin–Specht–Wever: a homogeneous P of degree n is a Lie polynomial iff D(P) = n P.
template <class S>
double lie_defect(const Tensor<S>& x) {
  const Tensor<S> dx = dynkin_map(x);
  double worst = std::fabs(to_double(x.scalar()));
  for (int k = 1; k <= x.depth(); ++k) {
    auto a = dx.level(k);
    auto b = x.level(k);
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::fabs(to_double(S(a[i] - S(k) * b[i]))));
  }
  return worst;
}

}  // namespace sigcum
