#pragma once

#include <functional>
#include <span>
#include <vector>

namespace sigcum {

// Gauss–Legendre rule on [-1, 1], nodes ascending.
struct GaussLegendreRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendreRule gauss_legendre(int n);

// Row-major n×n matrix S with S(i,j) = ∫_{x_i}^{1} ℓ_j(s) ds, ℓ_j the Lagrange basis on the nodes.
std::vector<double> integration_matrix_to_right(const GaussLegendreRule& rule);

struct QuadratureOptions {
  double tol = 1e-10;
  int order = 8;
  int initial_panels = 1;
  int max_panels = 1 << 14;
};

struct QuadratureResult {
  double value = 0.0;
  int panels = 0;
  double estimated_error = 0.0;
};

// Edges of `per_piece` equal panels on each piece between consecutive breakpoints in [a, b].
std::vector<double> panel_edges(double a, double b, int per_piece, std::span<const double> breakpoints = {});

double integrate_fixed(const std::function<double(double)>& f, double a, double b, int panels,
                       const GaussLegendreRule& rule, std::span<const double> breakpoints = {});

// Composite rule; panels are doubled until two successive values differ by less than tol.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& opts = {}, std::span<const double> breakpoints = {});

}  // namespace sigcum
