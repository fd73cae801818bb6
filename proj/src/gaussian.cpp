#include "sigcum/gaussian.hpp"

#include "sigcum/expansion_terms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sigcum {

void check_covariance(const Matrix& a, int d) {
  if (a.size() != static_cast<std::size_t>(d) * static_cast<std::size_t>(d))
    throw DomainError("covariance must be a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
  double scale = 0.0;
  for (double x : a) {
    if (!std::isfinite(x)) throw DomainError("covariance has a non-finite entry");
    scale = std::max(scale, std::abs(x));
  }
  const double tol = 1e-12 * std::max(1.0, scale);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < i; ++j)
      if (std::abs(a[static_cast<std::size_t>(i * d + j)] - a[static_cast<std::size_t>(j * d + i)]) > tol)
        throw DomainError("covariance is not symmetric");
  // LDL^T without pivoting; a pivot below -tol means an indefinite matrix.
  std::vector<double> l(a);
  for (int k = 0; k < d; ++k) {
    const double p = l[static_cast<std::size_t>(k * d + k)];
    if (p < -tol) throw DomainError("covariance is not positive semidefinite");
    if (std::abs(p) <= tol) {
      for (int i = k + 1; i < d; ++i)
        if (std::abs(l[static_cast<std::size_t>(i * d + k)]) > std::sqrt(tol))
          throw DomainError("covariance is not positive semidefinite");
      continue;
    }
    for (int i = k + 1; i < d; ++i) {
      const double f = l[static_cast<std::size_t>(i * d + k)] / p;
      for (int j = k + 1; j < d; ++j)
        l[static_cast<std::size_t>(i * d + j)] -= f * l[static_cast<std::size_t>(k * d + j)];
    }
  }
}

Tensor<double> matrix_to_level_two(const Matrix& a, const AlgebraShape& sh) {
  Tensor<double> r(sh);
  if (sh.depth() < 2) return r;
  auto lv = r.level(2);
  if (lv.size() != a.size()) throw ShapeError("matrix does not match the alphabet");
  std::copy(a.begin(), a.end(), lv.begin());
  return r;
}

GaussianMartingaleModel::GaussianMartingaleModel(int d, MatrixFunction a, std::vector<double> breakpoints)
    : d_(d), a_(std::move(a)), breakpoints_(std::move(breakpoints)) {
  if (d < 1) throw DomainError("dimension must be positive");
}

GaussianMartingaleModel GaussianMartingaleModel::constant(int d, Matrix a) {
  check_covariance(a, d);
  return GaussianMartingaleModel(d, [a](double) { return a; });
}

GaussianMartingaleModel GaussianMartingaleModel::piecewise_constant(int d, std::vector<double> knots,
                                                                    std::vector<Matrix> values) {
  if (knots.size() != values.size() + 1 || values.empty())
    throw DomainError("piecewise-constant covariance needs one more knot than values");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1])) throw DomainError("covariance knots must increase");
  for (const auto& v : values) check_covariance(v, d);
  auto f = [knots, values](double t) {
    auto it = std::upper_bound(knots.begin(), knots.end(), t);
    std::size_t i = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
    return values[std::min(i, values.size() - 1)];
  };
  return GaussianMartingaleModel(d, f, std::vector<double>(knots.begin() + 1, knots.end() - 1));
}

Matrix GaussianMartingaleModel::covariance(double t) const {
  Matrix a = a_(t);
  check_covariance(a, d_);
  return a;
}

Tensor<double> GaussianMartingaleModel::covariance_tensor(double t, const AlgebraShape& sh) const {
  return matrix_to_level_two(covariance(t), sh);
}

namespace {

using detail::Parts;

// One backward collocation solve with the given panel layout.
Tensor<double> collocation_solve(const AlgebraShape& sh, const TensorFunction& eta, const std::vector<double>& edges,
                                 const GaussLegendreRule& rule, const std::vector<double>& smat,
                                 const detail::Weights& w) {
  const int depth = sh.depth();
  const std::size_t q = rule.nodes.size();
  Parts<double> right(static_cast<std::size_t>(depth) + 1, Tensor<double>(sh));
  for (std::size_t p = edges.size() - 1; p-- > 0;) {
    const double lo = edges[p], hi = edges[p + 1];
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    std::vector<Parts<double>> e(q), k(q, Parts<double>(static_cast<std::size_t>(depth) + 1, Tensor<double>(sh)));
    for (std::size_t i = 0; i < q; ++i) {
      Tensor<double> v = eta(mid + half * rule.nodes[i]);
      require_same_shape(sh, v.shape(), "generator value");
      e[i] = detail::homogeneous_parts(v);
    }
    Parts<double> left(static_cast<std::size_t>(depth) + 1, Tensor<double>(sh));
    for (int n = 1; n <= depth; ++n) {
      const auto ln = static_cast<std::size_t>(n);
      std::vector<Tensor<double>> f;
      f.reserve(q);
      for (std::size_t i = 0; i < q; ++i) {
        Tensor<double> fi = e[i][ln];
        if (n >= 2) fi += detail::hmag1_jump(n, e[i], k[i], w, sh);
        f.push_back(std::move(fi));
      }
      for (std::size_t i = 0; i < q; ++i) {
        Tensor<double> v = right[ln];
        for (std::size_t j = 0; j < q; ++j) v.add_scaled(f[j], half * smat[i * q + j]);
        k[i][ln] = std::move(v);
      }
      Tensor<double> v = right[ln];
      for (std::size_t j = 0; j < q; ++j) v.add_scaled(f[j], half * rule.weights[j]);
      left[ln] = std::move(v);
    }
    right = std::move(left);
  }
  Tensor<double> r(sh);
  for (int n = 1; n <= depth; ++n) r += right[static_cast<std::size_t>(n)];
  return r;
}

}  // namespace

CumulantReport generator_cumulant(const AlgebraShape& sh, const TensorFunction& eta, double t, double T,
                                  const QuadratureOptions& opts, std::span<const double> breakpoints) {
  if (t > T) throw DomainError("generator_cumulant needs t <= T");
  if (t == T) return {Tensor<double>(sh), 0, 0.0};
  const auto rule = gauss_legendre(opts.order);
  const auto smat = integration_matrix_to_right(rule);
  const detail::Weights w(sh.depth() + 1);
  int panels = std::max(1, opts.initial_panels);
  Tensor<double> prev = collocation_solve(sh, eta, panel_edges(t, T, panels, breakpoints), rule, smat, w);
  double err = 0.0;
  while (panels * 2 <= opts.max_panels) {
    panels *= 2;
    Tensor<double> cur = collocation_solve(sh, eta, panel_edges(t, T, panels, breakpoints), rule, smat, w);
    err = max_abs_difference(cur, prev);
    if (err < opts.tol) return {std::move(cur), panels, err};
    prev = std::move(cur);
  }
  throw ConvergenceError("generator solve: change " + std::to_string(err) + " above tolerance " +
                         std::to_string(opts.tol) + " at " + std::to_string(panels) + " panels per piece");
}

CumulantReport gaussian_cumulant_report(const GaussianMartingaleModel& m, double t, double T, int depth,
                                        const QuadratureOptions& opts) {
  const AlgebraShape sh(m.dim(), depth);
  auto eta = [&](double u) {
    Tensor<double> a = m.covariance_tensor(u, sh);
    a *= 0.5;
    return a;
  };
  return generator_cumulant(sh, eta, t, T, opts, m.breakpoints());
}

Tensor<double> gaussian_cumulant(const GaussianMartingaleModel& m, double t, double T, int depth,
                                 const QuadratureOptions& opts) {
  return gaussian_cumulant_report(m, t, T, depth, opts).kappa;
}

namespace {

void check_sensitivity(const std::vector<Tensor<double>>& v, int d) {
  if (static_cast<int>(v.size()) != d) throw ShapeError("sensitivity needs one tensor per driver component");
}

}  // namespace

Tensor<double> diamond(const GaussianMartingaleModel& m, const Sensitivity& x, const Sensitivity& y, double t,
                       double T, const QuadratureOptions& opts) {
  if (t > T) throw DomainError("diamond needs t <= T");
  const int d = m.dim();
  std::function<Tensor<double>(double)> f = [&](double u) {
    const auto xs = x(u), ys = y(u);
    check_sensitivity(xs, d);
    check_sensitivity(ys, d);
    const Matrix a = m.covariance(u);
    Tensor<double> r(xs[0].shape());
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double aij = a[static_cast<std::size_t>(i * d + j)];
        if (aij != 0.0) r.add_scaled(concat_mul(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]), aij);
      }
    return r;
  };
  return integrate_values(f, t, T, opts, m.breakpoints());
}

OuterTensor<double> outer_diamond(const GaussianMartingaleModel& m, const Sensitivity& x, const Sensitivity& y,
                                  double t, double T, const QuadratureOptions& opts) {
  if (t > T) throw DomainError("outer_diamond needs t <= T");
  const int d = m.dim();
  std::function<OuterTensor<double>(double)> f = [&](double u) {
    const auto xs = x(u), ys = y(u);
    check_sensitivity(xs, d);
    check_sensitivity(ys, d);
    const Matrix a = m.covariance(u);
    OuterTensor<double> r(xs[0].shape());
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        const double aij = a[static_cast<std::size_t>(i * d + j)];
        if (aij == 0.0) continue;
        auto o = OuterTensor<double>::outer(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]);
        o *= aij;
        r += o;
      }
    return r;
  };
  return integrate_values(f, t, T, opts, m.breakpoints());
}

SymTensor<double> gaussian_commutative_recursion(const GaussianMartingaleModel& m, const std::vector<double>& c,
                                                 const Matrix& q, const std::vector<double>& x, double t,
                                                 double T, int depth, const QuadratureOptions& opts) {
  const int d = m.dim();
  if (static_cast<int>(c.size()) != d || static_cast<int>(x.size()) != d ||
      q.size() != static_cast<std::size_t>(d * d))
    throw ShapeError("payoff coefficients do not match the dimension");
  if (t > T) throw DomainError("recursion needs t <= T");
  const SymShape ss(d, depth);
  const auto bps = m.breakpoints();
  // ∫ a over [lo, hi], entrywise.
  auto integral = [&](double lo, double hi) {
    Matrix r(static_cast<std::size_t>(d * d), 0.0);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        auto f = [&](double u) { return m.covariance(u)[static_cast<std::size_t>(i * d + j)]; };
        r[static_cast<std::size_t>(i * d + j)] = integrate(f, lo, hi, opts, bps).value;
      }
    return r;
  };

  // Level n of 𝕂 and its (constant) sensitivity to dX^i.
  std::vector<SymTensor<double>> value(static_cast<std::size_t>(depth) + 1, SymTensor<double>(ss));
  std::vector<std::vector<SymTensor<double>>> sens(static_cast<std::size_t>(depth) + 1,
                                                   std::vector<SymTensor<double>>(static_cast<std::size_t>(d), SymTensor<double>(ss)));
  if (depth >= 1)
    for (int i = 0; i < d; ++i) {
      value[1].at({i + 1}) = c[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
      sens[1][static_cast<std::size_t>(i)].at({i + 1}) = c[static_cast<std::size_t>(i)];
    }
  const Matrix a_tT = integral(t, T);
  if (depth >= 2) {
    const Matrix a_0T = integral(0.0, T);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) value[2].at({i + 1, j + 1}) += q[static_cast<std::size_t>(i * d + j)] * a_0T[static_cast<std::size_t>(i * d + j)];
  }
  for (int n = 2; n <= depth; ++n) {
    // ½ Σ_k (𝕂^{(k)} ◇ 𝕂^{(n-k)}) with constant sensitivities.
    for (int k = 1; k < n; ++k)
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
          const double aij = a_tT[static_cast<std::size_t>(i * d + j)];
          if (aij == 0.0) continue;
          value[static_cast<std::size_t>(n)].add_scaled(
              sym_mul(sens[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)],
                      sens[static_cast<std::size_t>(n - k)][static_cast<std::size_t>(j)]),
              0.5 * aij);
        }
    // 𝕂^{(n)} for n >= 2 is deterministic here, so its sensitivity stays zero.
  }
  SymTensor<double> r(ss);
  for (int n = 1; n <= depth; ++n) r += value[static_cast<std::size_t>(n)];
  return r;
}

}  // namespace sigcum
