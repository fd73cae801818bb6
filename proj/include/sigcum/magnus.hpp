#pragma once

#include "sigcum/expansion_terms.hpp"
#include "sigcum/lie.hpp"
#include "sigcum/path.hpp"
#include "sigcum/signature.hpp"

#include <string>

namespace sigcum {

struct MagnusOptions {
  double tol = 1e-10;      // bound on the Richardson estimate, per coefficient
  int initial_steps = 8;   // RK4 steps per linear stretch on the first pass
  int max_refinements = 16;
};

template <class S>
struct MagnusSolveReport {
  Tensor<S> omega;
  long steps = 0;
  double estimated_error = 0.0;
};

namespace detail {

// dΩ/dσ = H(ad Ω)(x) for σ in [0, 1], classical RK4 with n steps.
template <class S>
Tensor<S> rk4_stretch(Tensor<S> omega, const Tensor<S>& x, long n, const AdSeries<S>& h) {
  const S step = S(1) / S(n);
  const S half = step / S(2);
  const S sixth = step / S(6);
  auto f = [&](const Tensor<S>& o) { return ad_series_apply(h, o, x); };
  for (long s = 0; s < n; ++s) {
    const Tensor<S> k1 = f(omega);
    Tensor<S> tmp = omega;
    tmp.add_scaled(k1, half);
    const Tensor<S> k2 = f(tmp);
    tmp = omega;
    tmp.add_scaled(k2, half);
    const Tensor<S> k3 = f(tmp);
    tmp = omega;
    tmp.add_scaled(k3, step);
    const Tensor<S> k4 = f(tmp);
    omega.add_scaled(k1, sixth);
    omega.add_scaled(k2, S(2) * sixth);
    omega.add_scaled(k3, S(2) * sixth);
    omega.add_scaled(k4, sixth);
  }
  return omega;
}

// Backward sweep from T to t: exact BCH across jumps, n RK4 steps per linear stretch.
template <class S>
Tensor<S> magnus_sweep(const std::vector<PathAtom<S>>& atoms, const AlgebraShape& sh, long n, long& steps) {
  const auto h = series_H<S>(sh.depth());
  Tensor<S> omega(sh);
  steps = 0;
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
    if (it->kind == EventKind::Jump) {
      omega = bch(it->value, omega);
    } else {
      omega = rk4_stretch(std::move(omega), it->value, n, h);
      steps += n;
    }
  }
  return omega;
}

template <class S>
MagnusSolveReport<S> refine_sweep(const std::vector<PathAtom<S>>& atoms, const AlgebraShape& sh,
                                  const MagnusOptions& opts) {
  bool any_linear = false;
  for (const auto& a : atoms) any_linear = any_linear || a.kind == EventKind::Linear;
  long steps = 0;
  long n = std::max(1, opts.initial_steps);
  Tensor<S> prev = magnus_sweep(atoms, sh, n, steps);
  if (!any_linear) return {std::move(prev), 0, 0.0};
  double err = 0.0;
  for (int r = 0; r < opts.max_refinements; ++r) {
    n *= 2;
    Tensor<S> cur = magnus_sweep(atoms, sh, n, steps);
    err = max_abs_difference(cur, prev) / 15.0;
    if (err <= opts.tol) return {std::move(cur), steps, err};
    prev = std::move(cur);
  }
  throw ConvergenceError("Hausdorff solve: Richardson estimate " + std::to_string(err) +
                         " above tolerance " + std::to_string(opts.tol) + " after " +
                         std::to_string(opts.max_refinements) + " refinements");
}

// Polynomials in σ with homogeneous tensor coefficients.
template <class S>
using TensorPoly = std::vector<Tensor<S>>;

template <class S>
TensorPoly<S> poly_bracket(const TensorPoly<S>& a, const TensorPoly<S>& b, const AlgebraShape& sh) {
  if (a.empty() || b.empty()) return {};
  TensorPoly<S> r(a.size() + b.size() - 1, Tensor<S>(sh));
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (!b[j].is_zero()) r[i + j] += lie_bracket(a[i], b[j]);
  }
  return r;
}

template <class S>
void poly_add_scaled(TensorPoly<S>& acc, const TensorPoly<S>& p, const S& c, const AlgebraShape& sh) {
  if (acc.size() < p.size()) acc.resize(p.size(), Tensor<S>(sh));
  for (std::size_t i = 0; i < p.size(); ++i) acc[i].add_scaled(p[i], c);
}

}  // namespace detail

// Backward Hausdorff ODE on a path made of linear stretches only.
template <class S>
MagnusSolveReport<S> hausdorff_solve(const CadlagPath<S>& path, double t, double T, const MagnusOptions& opts = {}) {
  if (path.has_jumps_in(t, T)) throw DomainError("hausdorff_solve: path has jumps; use jump_magnus");
  return detail::refine_sweep(path.atoms(t, T), path.shape(), opts);
}

template <class S>
MagnusSolveReport<S> jump_magnus_report(const CadlagPath<S>& path, double t, double T,
                                        const MagnusOptions& opts = {}) {
  return detail::refine_sweep(path.atoms(t, T), path.shape(), opts);
}

// Ω_t(T): backward sweep, exact BCH steps across jumps.
template <class S>
Tensor<S> jump_magnus(const CadlagPath<S>& path, double t, double T, const MagnusOptions& opts = {}) {
  return jump_magnus_report(path, t, T, opts).omega;
}

// Levels 1..n_max of Ω_t(T) by the graded expansion
//   Ω^{(n)} = X^{(n)} + Σ_{|ℓ|>=2, ‖ℓ‖=n} (HMag¹ + HJmp).
// On a linear stretch each Ω^{(j)} is a polynomial in the local time; the Stieltjes integrals
// are integrated termwise, so the result is exact in rational mode.
template <class S>
Tensor<S> magnus_expansion(const CadlagPath<S>& path, double t, double T, int n_max) {
  const AlgebraShape& sh = path.shape();
  if (n_max < 0 || n_max > sh.depth()) throw ShapeError("magnus_expansion: level out of range");
  const detail::Weights w(sh.depth() + 1);
  const auto atoms = path.atoms(t, T);
  std::vector<std::vector<detail::Composition>> comps(static_cast<std::size_t>(n_max) + 1);
  for (int n = 2; n <= n_max; ++n) comps[static_cast<std::size_t>(n)] = detail::compositions(n);

  // Homogeneous parts of Ω at the current sweep position.
  detail::Parts<S> omega(static_cast<std::size_t>(sh.depth()) + 1, Tensor<S>(sh));
  for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
    const auto x = detail::homogeneous_parts(it->value);
    if (it->kind == EventKind::Jump) {
      detail::Parts<S> before(omega.size(), Tensor<S>(sh));
      for (int n = 1; n <= n_max; ++n) {
        Tensor<S> v = omega[static_cast<std::size_t>(n)] + x[static_cast<std::size_t>(n)];
        v += detail::hmag1_jump(n, x, before, w, sh);
        v += detail::hjmp_jump(n, x, omega, before, w, sh);
        before[static_cast<std::size_t>(n)] = std::move(v);
      }
      omega = std::move(before);
      continue;
    }
    // Linear stretch, local time σ in [0, 1] running backwards from the stretch end.
    std::vector<detail::TensorPoly<S>> poly(static_cast<std::size_t>(n_max) + 1);
    for (int n = 1; n <= n_max; ++n) {
      detail::TensorPoly<S> p{omega[static_cast<std::size_t>(n)], x[static_cast<std::size_t>(n)]};
      detail::TensorPoly<S> integrand;
      for (const auto& l : comps[static_cast<std::size_t>(n)]) {
        const int k = static_cast<int>(l.size());
        const Rational c = w.bern[static_cast<std::size_t>(k - 1)] * w.inv_fact(k - 1);
        if (c == 0) continue;
        detail::TensorPoly<S> y{x[static_cast<std::size_t>(l[0])]};
        for (std::size_t q = l.size(); q >= 2; --q) y = detail::poly_bracket(poly[static_cast<std::size_t>(l[q - 1])], y, sh);
        detail::poly_add_scaled(integrand, y, ScalarTraits<S>::from_rational(c), sh);
      }
      // Antiderivative from 0.
      for (std::size_t m = 0; m < integrand.size(); ++m) {
        if (p.size() < m + 2) p.resize(m + 2, Tensor<S>(sh));
        p[m + 1].add_scaled(integrand[m], ScalarTraits<S>::ratio(1, static_cast<std::int64_t>(m + 1)));
      }
      poly[static_cast<std::size_t>(n)] = std::move(p);
    }
    for (int n = 1; n <= n_max; ++n) {
      Tensor<S> v(sh);
      for (const auto& c : poly[static_cast<std::size_t>(n)]) v += c;
      omega[static_cast<std::size_t>(n)] = std::move(v);
    }
  }
  Tensor<S> r(sh);
  for (int n = 1; n <= n_max; ++n) r += omega[static_cast<std::size_t>(n)];
  return r;
}

// Level-n part of the graded expansion.
template <class S>
Tensor<S> magnus_expansion_term(const CadlagPath<S>& path, int n, double t, double T) {
  return project_level(magnus_expansion(path, t, T, n), n);
}

}  // namespace sigcum
