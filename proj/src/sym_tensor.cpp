#include "sigcum/sym_tensor.hpp"

namespace sigcum {

namespace {

void enumerate(int d, int n, Word& prefix, int min_letter, std::vector<Word>& out) {
  if (static_cast<int>(prefix.size()) == n) {
    out.push_back(prefix);
    return;
  }
  for (int c = min_letter; c <= d; ++c) {
    prefix.push_back(c);
    enumerate(d, n, prefix, c, out);
    prefix.pop_back();
  }
}

}  // namespace

SymShape::SymShape(int d, int depth) : d_(d), n_(depth) {
  if (d < 1) throw ShapeError("alphabet size d must be >= 1");
  if (depth < 0) throw ShapeError("truncation level N must be >= 0");
  auto t = std::make_shared<Tables>();
  const int top = depth + d;
  t->binom.assign(static_cast<std::size_t>(top) + 1, {});
  for (int a = 0; a <= top; ++a) {
    auto& row = t->binom[static_cast<std::size_t>(a)];
    row.assign(static_cast<std::size_t>(a) + 1, 1);
    for (int b = 1; b < a; ++b)
      row[static_cast<std::size_t>(b)] = t->binom[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] +
                                         t->binom[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b)];
  }
  std::size_t total = 0;
  for (int k = 0; k <= depth; ++k) {
    const std::size_t count = t->binom[static_cast<std::size_t>(k + d - 1)][static_cast<std::size_t>(d - 1)];
    t->counts.push_back(count);
    t->offsets.push_back(total);
    total += count;
    if (total > max_coefficients())
      throw ResourceError("symmetric tensor shape exceeds the memory guard");
  }
  t->offsets.push_back(total);
  t->words.resize(static_cast<std::size_t>(depth) + 1);
  for (int k = 0; k <= depth; ++k) {
    Word prefix;
    enumerate(d, k, prefix, 1, t->words[static_cast<std::size_t>(k)]);
  }
  tables_ = std::move(t);
}

std::size_t SymShape::rank(const Word& w) const {
  // Words before w: at position p with previous letter prev, every c in [prev, w_p)
  // contributes the non-decreasing completions of length n-p-1 over {c..d}.
  const int n = static_cast<int>(w.size());
  std::size_t r = 0;
  int prev = 1;
  for (int p = 0; p < n; ++p) {
    const int wp = w[static_cast<std::size_t>(p)];
    if (wp < prev || wp > d_) throw ShapeError("rank: word is not non-decreasing over 1..d");
    const int rest = n - p - 1;
    for (int c = prev; c < wp; ++c) {
      const int letters = d_ - c + 1;
      r += tables_->binom[static_cast<std::size_t>(rest + letters - 1)][static_cast<std::size_t>(letters - 1)];
    }
    prev = wp;
  }
  return r;
}

std::size_t SymShape::product_rank(int la, std::size_t ia, int lb, std::size_t ib) const {
  const Word& a = word(la, ia);
  const Word& b = word(lb, ib);
  Word m(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), m.begin());
  return rank(m);
}

}  // namespace sigcum
