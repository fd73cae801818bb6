#pragma once

#include "sigcum/errors.hpp"
#include "sigcum/scalar.hpp"
#include "sigcum/shape.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sigcum {

// Element of the truncated tensor algebra over {1..d} up to level N.
// Levels are stored back to back; level k holds d^k coefficients in word order.
template <class S>
class Tensor {
 public:
  using scalar_type = S;

  explicit Tensor(AlgebraShape shape) : shape_(std::move(shape)), data_(shape_.size(), S(0)) {}

  static Tensor zero(const AlgebraShape& shape) { return Tensor(shape); }
  static Tensor unit(const AlgebraShape& shape) {
    Tensor t(shape);
    t.data_[0] = S(1);
    return t;
  }
  static Tensor letter(const AlgebraShape& shape, int i) { return basis(shape, Word{i}); }
  static Tensor basis(const AlgebraShape& shape, const Word& w) {
    Tensor t(shape);
    t.at(w) = S(1);
    return t;
  }

  const AlgebraShape& shape() const { return shape_; }
  int dim() const { return shape_.dim(); }
  int depth() const { return shape_.depth(); }
  std::size_t size() const { return data_.size(); }

  std::span<S> data() { return data_; }
  std::span<const S> data() const { return data_; }
  S& operator[](std::size_t flat) { return data_[flat]; }
  const S& operator[](std::size_t flat) const { return data_[flat]; }

  std::span<S> level(int k) {
    check_level(k);
    return std::span<S>(data_).subspan(shape_.level_offset(k), shape_.level_size(k));
  }
  std::span<const S> level(int k) const {
    check_level(k);
    return std::span<const S>(data_).subspan(shape_.level_offset(k), shape_.level_size(k));
  }

  S& at(const Word& w) { return data_[flat_index(w)]; }
  const S& at(const Word& w) const { return data_[flat_index(w)]; }

  const S& scalar() const { return data_[0]; }
  S& scalar() { return data_[0]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const S& x) { return ScalarTraits<S>::is_zero(x); });
  }
  // Lowest level carrying a nonzero coefficient, or depth()+1 for the zero tensor.
  int valuation() const {
    for (int k = 0; k <= depth(); ++k)
      for (const S& x : level(k))
        if (!ScalarTraits<S>::is_zero(x)) return k;
    return depth() + 1;
  }

  Tensor& operator+=(const Tensor& o) {
    require_same_shape(shape_, o.shape_, "tensor addition");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    require_same_shape(shape_, o.shape_, "tensor subtraction");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Tensor& operator*=(const S& c) {
    for (S& x : data_) x *= c;
    return *this;
  }
  Tensor& operator/=(const S& c) {
    for (S& x : data_) x /= c;
    return *this;
  }
  // this += c * o
  Tensor& add_scaled(const Tensor& o, const S& c) {
    require_same_shape(shape_, o.shape_, "tensor addition");
    if (ScalarTraits<S>::is_zero(c)) return *this;
    for (std::size_t i = 0; i < data_.size(); ++i)
      if (!ScalarTraits<S>::is_zero(o.data_[i])) data_[i] += c * o.data_[i];
    return *this;
  }

  friend Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
  friend Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
  friend Tensor operator-(Tensor a) {
    for (S& x : a.data_) x = -x;
    return a;
  }
  friend Tensor operator*(const S& c, Tensor a) { return a *= c; }
  friend Tensor operator*(Tensor a, const S& c) { return a *= c; }
  friend Tensor operator/(Tensor a, const S& c) { return a /= c; }
  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

 private:
  void check_level(int k) const {
    if (k < 0 || k > depth())
      throw ShapeError("level " + std::to_string(k) + " outside 0.." + std::to_string(depth()));
  }
  std::size_t flat_index(const Word& w) const {
    const int k = static_cast<int>(w.size());
    check_level(k);
    return shape_.level_offset(k) + word_index(w, dim());
  }

  AlgebraShape shape_;
  std::vector<S> data_;
};

template <class S>
using TruncatedTensor = Tensor<S>;

template <class S>
void require_T0(const Tensor<S>& x, const char* what) {
  if (!ScalarTraits<S>::is_zero(x.scalar()))
    throw DomainError(std::string(what) + ": argument must have zero scalar component");
}

template <class S>
void require_T1(const Tensor<S>& x, const char* what) {
  if (x.scalar() != S(1))
    throw DomainError(std::string(what) + ": argument must have scalar component 1");
}

// out^{(la+lb)} += c * a^{(la)} ⊗ b^{(lb)} for homogeneous blocks.
template <class S>
void accumulate_level_product(std::span<S> out, std::span<const S> a, std::span<const S> b) {
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const S& ai = a[i];
    if (ScalarTraits<S>::is_zero(ai)) continue;
    S* row = out.data() + i * nb;
    for (std::size_t j = 0; j < nb; ++j)
      if (!ScalarTraits<S>::is_zero(b[j])) row[j] += ai * b[j];
  }
}

// Truncated concatenation product.
template <class S>
Tensor<S> concat_mul(const Tensor<S>& a, const Tensor<S>& b) {
  require_same_shape(a.shape(), b.shape(), "concat_mul");
  Tensor<S> r(a.shape());
  const int n = a.depth();
  const int va = a.valuation();
  const int vb = b.valuation();
  for (int k = va + vb; k <= n; ++k) {
    auto out = r.level(k);
    for (int la = va; la <= k - vb; ++la) accumulate_level_product(out, a.level(la), b.level(k - la));
  }
  return r;
}

template <class S>
Tensor<S> operator*(const Tensor<S>& a, const Tensor<S>& b) {
  return concat_mul(a, b);
}

// 1 + Σ x^k / k!, Horner form.
template <class S>
Tensor<S> exp_trunc(const Tensor<S>& x) {
  require_T0(x, "exp_trunc");
  const auto& sh = x.shape();
  Tensor<S> r = Tensor<S>::unit(sh);
  if (x.is_zero()) return r;
  for (int k = sh.depth(); k >= 1; --k) {
    r = concat_mul(x, r);
    r /= S(k);
    r.scalar() += S(1);
  }
  return r;
}

// Σ (-1)^{k+1} (y-1)^k / k, Horner form.
template <class S>
Tensor<S> log_trunc(const Tensor<S>& y) {
  require_T1(y, "log_trunc");
  const auto& sh = y.shape();
  Tensor<S> z = y;
  z.scalar() = S(0);
  Tensor<S> r(sh);
  if (z.is_zero()) return r;
  // r = z (1/1 - z (1/2 - z (1/3 - ...)))
  for (int k = sh.depth(); k >= 1; --k) {
    Tensor<S> next = Tensor<S>::unit(sh) * (S(1) / S(k));
    if (k < sh.depth()) next -= concat_mul(z, r);
    r = std::move(next);
  }
  return concat_mul(z, r);
}

// Group inverse of an element of 𝒯₁.
template <class S>
Tensor<S> inverse_T1(const Tensor<S>& y) {
  require_T1(y, "inverse_T1");
  Tensor<S> z = y;
  z.scalar() = S(0);
  Tensor<S> r = Tensor<S>::unit(y.shape());
  for (int k = 0; k < y.depth(); ++k) r = Tensor<S>::unit(y.shape()) - concat_mul(z, r);
  return r;
}

template <class S>
Tensor<S> project_level(const Tensor<S>& x, int n) {
  Tensor<S> r(x.shape());
  auto src = x.level(n);
  std::copy(src.begin(), src.end(), r.level(n).begin());
  return r;
}

// Keeps levels 0..m, re-shaped to depth m.
template <class S>
Tensor<S> truncate(const Tensor<S>& x, int m) {
  if (m < 0 || m > x.depth())
    throw ShapeError("truncate: level " + std::to_string(m) + " outside 0.." +
                     std::to_string(x.depth()));
  Tensor<S> r(x.shape().with_depth(m));
  std::copy(x.data().begin(), x.data().begin() + static_cast<std::ptrdiff_t>(r.size()),
            r.data().begin());
  return r;
}

// Re-shapes to depth m, padding with zeros or truncating.
template <class S>
Tensor<S> resize_depth(const Tensor<S>& x, int m) {
  if (m <= x.depth()) return truncate(x, m);
  Tensor<S> r(x.shape().with_depth(m));
  std::copy(x.data().begin(), x.data().end(), r.data().begin());
  return r;
}

template <class S>
Tensor<S> dilate(const Tensor<S>& x, const S& lambda) {
  Tensor<S> r = x;
  S p(1);
  for (int k = 1; k <= x.depth(); ++k) {
    p *= lambda;
    for (S& c : r.level(k)) c *= p;
  }
  return r;
}

// max_k ‖x^{(k)}‖₂.
inline double tensor_norm(const Tensor<double>& x) {
  double best = 0.0;
  for (int k = 0; k <= x.depth(); ++k) {
    double s = 0.0;
    for (double c : x.level(k)) s += c * c;
    best = std::max(best, std::sqrt(s));
  }
  return best;
}

template <class S>
double max_abs_coefficient(const Tensor<S>& x) {
  double best = 0.0;
  for (const S& c : x.data()) best = std::max(best, std::fabs(to_double(c)));
  return best;
}

template <class S>
double max_abs_difference(const Tensor<S>& a, const Tensor<S>& b) {
  require_same_shape(a.shape(), b.shape(), "max_abs_difference");
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, std::fabs(to_double(S(a[i] - b[i]))));
  return best;
}

template <class To, class From>
Tensor<To> convert_tensor(const Tensor<From>& x) {
  Tensor<To> r(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if constexpr (std::is_same_v<From, Rational>)
      r[i] = ScalarTraits<To>::from_rational(x[i]);
    else
      r[i] = ScalarTraits<To>::from_double(x[i]);
  }
  return r;
}

// Level-1 embedding of a vector in ℝᵈ.
template <class S>
Tensor<S> level_one(const AlgebraShape& shape, std::span<const S> v) {
  if (static_cast<int>(v.size()) != shape.dim())
    throw ShapeError("level_one: vector length does not match d");
  Tensor<S> r(shape);
  if (shape.depth() >= 1) std::copy(v.begin(), v.end(), r.level(1).begin());
  return r;
}

// s <- s · exp(v) for level-one v, in place. Top levels are updated first so
// lower levels can be read before they change.
template <class S>
void mul_exp_level_one(Tensor<S>& s, std::span<const S> v) {
  const int n = s.depth();
  const int d = s.dim();
  if (static_cast<int>(v.size()) != d) throw ShapeError("mul_exp_level_one: bad vector length");
  std::vector<S> cur, nxt;
  for (int m = n; m >= 1; --m) {
    // t_0 = s^{(0)}, t_j = s^{(j)} + t_{j-1} ⊗ v / (m - j + 1); s^{(m)} <- t_m
    auto l0 = s.level(0);
    cur.assign(l0.begin(), l0.end());
    for (int j = 1; j <= m; ++j) {
      auto lj = s.level(j);
      nxt.assign(lj.begin(), lj.end());
      const S inv = S(1) / S(m - j + 1);
      for (std::size_t i = 0; i < cur.size(); ++i) {
        if (ScalarTraits<S>::is_zero(cur[i])) continue;
        const S c = cur[i] * inv;
        S* row = nxt.data() + i * static_cast<std::size_t>(d);
        for (int a = 0; a < d; ++a) row[a] += c * v[static_cast<std::size_t>(a)];
      }
      cur.swap(nxt);
    }
    std::copy(cur.begin(), cur.end(), s.level(m).begin());
  }
}

}  // namespace sigcum
