#pragma once

#include "sigcum/lie.hpp"
#include "sigcum/quadrature.hpp"
#include "sigcum/sym_tensor.hpp"
#include "sigcum/tensor.hpp"

#include <functional>
#include <span>
#include <vector>

namespace sigcum {

// Row-major d×d matrix.
using Matrix = std::vector<double>;
using MatrixFunction = std::function<Matrix(double)>;
using TensorFunction = std::function<Tensor<double>(double)>;

// X_t = ∫_0^t σ(u) dB_u with deterministic a(t) = σ(t)σ(t)^T.
class GaussianMartingaleModel {
 public:
  GaussianMartingaleModel(int d, MatrixFunction a, std::vector<double> breakpoints = {});

  static GaussianMartingaleModel constant(int d, Matrix a);
  // a(t) = values[i] on [knots[i], knots[i+1]).
  static GaussianMartingaleModel piecewise_constant(int d, std::vector<double> knots, std::vector<Matrix> values);

  int dim() const { return d_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  // Checked: symmetric and positive semidefinite.
  Matrix covariance(double t) const;
  // Σ a_ij(t) e_ij on level 2.
  Tensor<double> covariance_tensor(double t, const AlgebraShape& sh) const;

 private:
  int d_;
  MatrixFunction a_;
  std::vector<double> breakpoints_;
};

void check_covariance(const Matrix& a, int d);
Tensor<double> matrix_to_level_two(const Matrix& a, const AlgebraShape& sh);

struct CumulantReport {
  Tensor<double> kappa;
  int panels = 0;
  double estimated_error = 0.0;
};

// Backward solve of κ_t = ∫_t^T H(ad κ_u)(η(u)) du, level by level, by collocation on composite
// Gauss–Legendre panels; panels are doubled until two solves differ by less than opts.tol.
CumulantReport generator_cumulant(const AlgebraShape& sh, const TensorFunction& eta, double t, double T,
                                  const QuadratureOptions& opts = {}, std::span<const double> breakpoints = {});

// κ_t(T) with η(u) = a(u)/2.
CumulantReport gaussian_cumulant_report(const GaussianMartingaleModel& m, double t, double T, int depth,
                                        const QuadratureOptions& opts = {});
Tensor<double> gaussian_cumulant(const GaussianMartingaleModel& m, double t, double T, int depth,
                                 const QuadratureOptions& opts = {});

// Continuous martingale part of a tensor process written against the driver: dY^c = Σ_i y_i(u) dX^i_u.
using Sensitivity = std::function<std::vector<Tensor<double>>(double)>;

// (X ◇ Y)_t(T) = ∫_t^T Σ_ij a_ij(u) x_i(u) y_j(u) du.
Tensor<double> diamond(const GaussianMartingaleModel& m, const Sensitivity& x, const Sensitivity& y, double t,
                       double T, const QuadratureOptions& opts = {});
// Outer version: Σ_ij a_ij x_i ⊗ y_j.
OuterTensor<double> outer_diamond(const GaussianMartingaleModel& m, const Sensitivity& x, const Sensitivity& y,
                                  double t, double T, const QuadratureOptions& opts = {});

// Symmetric cumulants of Ξ = Σ_i c_i X^i_T + Σ_{i<=j} q_ij ⟨X^i, X^j⟩_T given X_t = x. Each level of
// 𝕂 is carried as (value, sensitivity); the diamond of the recursion uses the sensitivities.
SymTensor<double> gaussian_commutative_recursion(const GaussianMartingaleModel& m, const std::vector<double>& c,
                                                 const Matrix& q, const std::vector<double>& x, double t,
                                                 double T, int depth, const QuadratureOptions& opts = {});

// Composite Gauss–Legendre for tensor-valued integrands, doubling until the max coefficient change < tol.
template <class V>
V integrate_values(const std::function<V(double)>& f, double a, double b, const QuadratureOptions& opts = {},
                   std::span<const double> breakpoints = {}) {
  const auto rule = gauss_legendre(opts.order);
  auto fixed = [&](int panels) {
    const auto edges = panel_edges(a, b, panels, breakpoints);
    V total = f(a);
    total *= 0.0;
    for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
      const double half = 0.5 * (edges[p + 1] - edges[p]), mid = 0.5 * (edges[p + 1] + edges[p]);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        V v = f(mid + half * rule.nodes[q]);
        v *= half * rule.weights[q];
        total += v;
      }
    }
    return total;
  };
  int panels = std::max(1, opts.initial_panels);
  V prev = fixed(panels);
  if (!(b > a)) return prev;
  while (panels * 2 <= opts.max_panels) {
    panels *= 2;
    V cur = fixed(panels);
    double err = 0.0;
    auto pc = prev.data();
    auto cc = cur.data();
    for (std::size_t i = 0; i < cc.size(); ++i) err = std::max(err, std::abs(cc[i] - pc[i]));
    if (err < opts.tol) return cur;
    prev = std::move(cur);
  }
  throw ConvergenceError("tensor quadrature did not reach tolerance " + std::to_string(opts.tol));
}

}  // namespace sigcum
