#include "sigcum/quadrature.hpp"

#include "sigcum/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace sigcum {

GaussLegendreRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("Gauss-Legendre order must be >= 1");
  GaussLegendreRule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return r;
}

std::vector<double> integration_matrix_to_right(const GaussLegendreRule& rule) {
  const std::size_t n = rule.nodes.size();
  const auto& x = rule.nodes;
  auto lagrange = [&](std::size_t j, double s) {
    double v = 1.0;
    for (std::size_t m = 0; m < n; ++m)
      if (m != j) v *= (s - x[m]) / (x[j] - x[m]);
    return v;
  };
  std::vector<double> mat(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double lo = x[i], half = 0.5 * (1.0 - lo), mid = 0.5 * (1.0 + lo);
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t q = 0; q < n; ++q) acc += rule.weights[q] * lagrange(j, mid + half * x[q]);
      mat[i * n + j] = half * acc;
    }
  }
  return mat;
}

std::vector<double> panel_edges(double a, double b, int per_piece, std::span<const double> breakpoints) {
  std::vector<double> cuts{a};
  for (double t : breakpoints)
    if (t > a && t < b) cuts.push_back(t);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<double> edges{a};
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double lo = cuts[p], hi = cuts[p + 1];
    for (int k = 1; k <= per_piece; ++k)
      edges.push_back(k == per_piece ? hi : lo + (hi - lo) * k / per_piece);
  }
  return edges;
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b, int panels,
                       const GaussLegendreRule& rule, std::span<const double> breakpoints) {
  if (b <= a) return 0.0;
  const auto edges = panel_edges(a, b, panels, breakpoints);
  double total = 0.0;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double lo = edges[p], hi = edges[p + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) acc += rule.weights[q] * f(mid + half * rule.nodes[q]);
    total += half * acc;
  }
  return total;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts, std::span<const double> breakpoints) {
  const auto rule = gauss_legendre(opts.order);
  int panels = std::max(1, opts.initial_panels);
  double prev = integrate_fixed(f, a, b, panels, rule, breakpoints);
  while (panels * 2 <= opts.max_panels) {
    panels *= 2;
    const double cur = integrate_fixed(f, a, b, panels, rule, breakpoints);
    const double err = std::fabs(cur - prev);
    if (err < opts.tol) return {cur, panels, err};
    prev = cur;
  }
  throw ConvergenceError("quadrature did not reach tolerance " + std::to_string(opts.tol) +
                         " with " + std::to_string(panels) + " panels");
}

}  // namespace sigcum
