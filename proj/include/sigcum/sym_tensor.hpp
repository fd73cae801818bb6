#pragma once

#include "sigcum/tensor.hpp"

#include <memory>
#include <span>
#include <vector>

namespace sigcum {

// Truncated symmetric algebra: polynomials in d commuting letters up to degree N.
// Degree-n coefficients are indexed by non-decreasing words in lexicographic order.
class SymShape {
 public:
  SymShape(int d, int depth);

  int dim() const { return d_; }
  int depth() const { return n_; }
  std::size_t level_size(int k) const { return tables_->counts[static_cast<std::size_t>(k)]; }
  std::size_t level_offset(int k) const { return tables_->offsets[static_cast<std::size_t>(k)]; }
  std::size_t size() const { return tables_->offsets.back(); }

  // Rank of a non-decreasing word within its degree.
  std::size_t rank(const Word& sorted) const;
  const Word& word(int level, std::size_t rank) const {
    return tables_->words[static_cast<std::size_t>(level)][rank];
  }
  // Rank of the merged multiset of two ranked monomials.
  std::size_t product_rank(int la, std::size_t ia, int lb, std::size_t ib) const;

  bool operator==(const SymShape& o) const { return d_ == o.d_ && n_ == o.n_; }
  bool operator!=(const SymShape& o) const { return !(*this == o); }

 private:
  struct Tables {
    std::vector<std::size_t> counts;
    std::vector<std::size_t> offsets;
    std::vector<std::vector<Word>> words;
    // binom[n][k] for the completion counts used by rank().
    std::vector<std::vector<std::size_t>> binom;
  };
  int d_;
  int n_;
  std::shared_ptr<const Tables> tables_;
};

template <class S>
class SymTensor {
 public:
  using scalar_type = S;

  explicit SymTensor(SymShape shape) : shape_(std::move(shape)), data_(shape_.size(), S(0)) {}

  static SymTensor unit(const SymShape& shape) {
    SymTensor t(shape);
    t.data_[0] = S(1);
    return t;
  }
  static SymTensor monomial(const SymShape& shape, Word w) {
    SymTensor t(shape);
    t.at(std::move(w)) = S(1);
    return t;
  }

  const SymShape& shape() const { return shape_; }
  int dim() const { return shape_.dim(); }
  int depth() const { return shape_.depth(); }
  std::size_t size() const { return data_.size(); }
  std::span<S> data() { return data_; }
  std::span<const S> data() const { return data_; }

  std::span<S> level(int k) {
    check_level(k);
    return std::span<S>(data_).subspan(shape_.level_offset(k), shape_.level_size(k));
  }
  std::span<const S> level(int k) const {
    check_level(k);
    return std::span<const S>(data_).subspan(shape_.level_offset(k), shape_.level_size(k));
  }
  // Letters in any order; the multiset is what counts.
  S& at(Word w) {
    std::sort(w.begin(), w.end());
    const int k = static_cast<int>(w.size());
    check_level(k);
    return data_[shape_.level_offset(k) + shape_.rank(w)];
  }
  const S& at(Word w) const { return const_cast<SymTensor*>(this)->at(std::move(w)); }
  const S& scalar() const { return data_[0]; }
  S& scalar() { return data_[0]; }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const S& x) { return ScalarTraits<S>::is_zero(x); });
  }

  SymTensor& operator+=(const SymTensor& o) {
    check_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    check_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  SymTensor& operator*=(const S& c) {
    for (S& x : data_) x *= c;
    return *this;
  }
  SymTensor& add_scaled(const SymTensor& o, const S& c) {
    check_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += c * o.data_[i];
    return *this;
  }
  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator-(SymTensor a) {
    for (S& x : a.data_) x = -x;
    return a;
  }
  friend SymTensor operator*(const S& c, SymTensor a) { return a *= c; }
  friend bool operator==(const SymTensor& a, const SymTensor& b) {
    return a.shape_ == b.shape_ && a.data_ == b.data_;
  }

  void check_shape(const SymTensor& o) const {
    if (shape_ != o.shape_) throw ShapeError("symmetric tensor shape mismatch");
  }

 private:
  void check_level(int k) const {
    if (k < 0 || k > depth()) throw ShapeError("symmetric level out of range");
  }
  SymShape shape_;
  std::vector<S> data_;
};

// Commutative polynomial product, truncated at degree N.
template <class S>
SymTensor<S> sym_mul(const SymTensor<S>& a, const SymTensor<S>& b) {
  a.check_shape(b);
  const SymShape& sh = a.shape();
  SymTensor<S> r(sh);
  auto out = r.data();
  for (int la = 0; la <= sh.depth(); ++la) {
    auto xa = a.level(la);
    for (std::size_t i = 0; i < xa.size(); ++i) {
      if (ScalarTraits<S>::is_zero(xa[i])) continue;
      for (int lb = 0; la + lb <= sh.depth(); ++lb) {
        auto xb = b.level(lb);
        const std::size_t base = sh.level_offset(la + lb);
        for (std::size_t j = 0; j < xb.size(); ++j) {
          if (ScalarTraits<S>::is_zero(xb[j])) continue;
          out[base + sh.product_rank(la, i, lb, j)] += xa[i] * xb[j];
        }
      }
    }
  }
  return r;
}

template <class S>
SymTensor<S> operator*(const SymTensor<S>& a, const SymTensor<S>& b) {
  return sym_mul(a, b);
}

template <class S>
SymTensor<S> sym_exp(const SymTensor<S>& x) {
  if (!ScalarTraits<S>::is_zero(x.scalar()))
    throw DomainError("sym_exp: argument must have zero scalar component");
  const auto& sh = x.shape();
  SymTensor<S> r = SymTensor<S>::unit(sh);
  for (int k = sh.depth(); k >= 1; --k) {
    r = sym_mul(x, r);
    r *= S(1) / S(k);
    r.scalar() += S(1);
  }
  return r;
}

template <class S>
SymTensor<S> sym_log(const SymTensor<S>& y) {
  if (y.scalar() != S(1)) throw DomainError("sym_log: argument must have scalar component 1");
  const auto& sh = y.shape();
  SymTensor<S> z = y;
  z.scalar() = S(0);
  SymTensor<S> r(sh);
  if (z.is_zero() || sh.depth() == 0) return r;
  for (int k = sh.depth(); k >= 1; --k) {
    SymTensor<S> next = SymTensor<S>::unit(sh);
    next *= S(1) / S(k);
    if (k < sh.depth()) next -= sym_mul(z, r);
    r = std::move(next);
  }
  return sym_mul(z, r);
}

template <class S>
SymTensor<S> sym_project_level(const SymTensor<S>& x, int n) {
  SymTensor<S> r(x.shape());
  auto src = x.level(n);
  std::copy(src.begin(), src.end(), r.level(n).begin());
  return r;
}

// Coefficient of a multiset = sum of the coefficients of all words with that letter content.
template <class S>
SymTensor<S> sym_project(const Tensor<S>& x) {
  SymShape sh(x.dim(), x.depth());
  SymTensor<S> r(sh);
  for (int k = 0; k <= x.depth(); ++k) {
    auto lv = x.level(k);
    auto out = r.level(k);
    for (std::size_t i = 0; i < lv.size(); ++i) {
      if (ScalarTraits<S>::is_zero(lv[i])) continue;
      Word w = word_from_index(i, k, x.dim());
      std::sort(w.begin(), w.end());
      out[sh.rank(w)] += lv[i];
    }
  }
  return r;
}

template <class S>
double max_abs_difference(const SymTensor<S>& a, const SymTensor<S>& b) {
  a.check_shape(b);
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    best = std::max(best, std::fabs(to_double(S(a.data()[i] - b.data()[i]))));
  return best;
}

}  // namespace sigcum
