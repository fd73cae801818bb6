#include "sigcum/lie.hpp"

#include <mutex>

namespace sigcum {

namespace {
std::mutex g_cache_mutex;
std::vector<Rational> g_bernoulli;
}  // namespace

std::vector<Rational> bernoulli_numbers(int n) {
  std::lock_guard<std::mutex> lock(g_cache_mutex);
  if (static_cast<int>(g_bernoulli.size()) <= n) {
    // Akiyama–Tanigawa; yields B_1 = +1/2, flipped below.
    const int top = n;
    std::vector<Rational> a(static_cast<std::size_t>(top) + 1);
    std::vector<Rational> b(static_cast<std::size_t>(top) + 1);
    for (int m = 0; m <= top; ++m) {
      a[static_cast<std::size_t>(m)] = Rational(1) / Rational(m + 1);
      for (int j = m; j >= 1; --j)
        a[static_cast<std::size_t>(j - 1)] =
            Rational(j) * (a[static_cast<std::size_t>(j - 1)] - a[static_cast<std::size_t>(j)]);
      b[static_cast<std::size_t>(m)] = a[0];
    }
    if (top >= 1) b[1] = -b[1];
    g_bernoulli = std::move(b);
  }
  return std::vector<Rational>(g_bernoulli.begin(), g_bernoulli.begin() + n + 1);
}

std::vector<Rational> factorials(int n) {
  std::vector<Rational> f(static_cast<std::size_t>(std::max(n, 0)) + 1, Rational(1));
  for (int k = 1; k <= n; ++k) f[static_cast<std::size_t>(k)] = f[static_cast<std::size_t>(k - 1)] * Rational(k);
  return f;
}

}  // namespace sigcum
