#pragma once

#include "sigcum/gaussian.hpp"
#include "sigcum/json_io.hpp"

#include <vector>

namespace sigcum {

// ((T - t)/2) Σ_i e_ii.
Tensor<double> fawcett(int d, double t, double T, int depth = 2);

struct JumpAtom {
  double weight = 0.0;            // intensity λ > 0
  std::vector<double> point;      // jump x in R^d
};

// Lévy triplet (b, a, K) with a finite atomic jump measure K = Σ λ_i δ_{x_i}.
struct LevyTriplet {
  int d = 1;
  std::vector<double> b;
  Matrix a;
  std::vector<JumpAtom> jumps;

  void validate() const;
  double total_intensity() const;
};

LevyTriplet levy_from_json(const json& j);

// η = b + a/2 + Σ λ_i (exp(x_i) - 1 - x_i 1_{|x_i| <= 1}).
Tensor<double> levy_eta(const LevyTriplet& k, const AlgebraShape& sh);
// (T - t) η.
Tensor<double> levy_cumulant(const LevyTriplet& k, double t, double T, int depth);

// κ_t = ∫_t^T H(ad κ_u)(η(u)) du for a time-dependent generator.
CumulantReport inhom_levy_cumulant_report(const AlgebraShape& sh, const TensorFunction& eta, double t, double T,
                                          const QuadratureOptions& opts = {},
                                          std::span<const double> breakpoints = {});
Tensor<double> inhom_levy_cumulant(const AlgebraShape& sh, const TensorFunction& eta, double t, double T,
                                   const QuadratureOptions& opts = {}, std::span<const double> breakpoints = {});

// Brownian motion started at x inside Γ = D^n × R^{d-n}: E^x τ = (1 - Σ_{i<=n} x_i^2)/n.
double unit_ball_exit_time(int n, const std::vector<double>& x);
// Level-2 cumulant coefficient on e_ii (i <= n) at x: E^x τ / 2.
double stopped_bm_level_two(int n, const std::vector<double>& x);
// The displayed closed form ½(1 - Σ x_i^2), kept for comparison.
double stopped_bm_level_two_display(const std::vector<double>& x, int n);

}  // namespace sigcum
