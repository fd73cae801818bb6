#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace sigcum {

// Upper bound on Σ_k d^k for any tensor shape. Default 10'000'000.
std::size_t max_coefficients();
void set_max_coefficients(std::size_t limit);

// Letters are 1-based: a word over {1..d}.
using Word = std::vector<int>;

class AlgebraShape {
 public:
  AlgebraShape(int d, int depth);

  int dim() const { return d_; }
  int depth() const { return n_; }
  std::size_t level_size(int k) const { return (*powers_)[static_cast<std::size_t>(k)]; }
  std::size_t level_offset(int k) const { return (*offsets_)[static_cast<std::size_t>(k)]; }
  std::size_t size() const { return (*offsets_)[static_cast<std::size_t>(n_) + 1]; }

  // Same alphabet, other truncation level.
  AlgebraShape with_depth(int depth) const { return AlgebraShape(d_, depth); }

  bool operator==(const AlgebraShape& o) const { return d_ == o.d_ && n_ == o.n_; }
  bool operator!=(const AlgebraShape& o) const { return !(*this == o); }

 private:
  int d_;
  int n_;
  std::shared_ptr<const std::vector<std::size_t>> powers_;   // d^k, k = 0..N
  std::shared_ptr<const std::vector<std::size_t>> offsets_;  // start of level k, k = 0..N+1
};

// Base-d positional code: i_1..i_k -> Σ (i_j - 1) d^{k-j}.
std::size_t word_index(const Word& w, int d);
Word word_from_index(std::size_t index, int level, int d);

// "12" for d <= 9, "1,12" otherwise; the empty word is "()".
std::string word_label(const Word& w, int d);
Word parse_word(const std::string& text, int d);

void require_same_shape(const AlgebraShape& a, const AlgebraShape& b, const char* what);

}  // namespace sigcum
