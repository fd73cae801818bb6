#pragma once

#include "sigcum/gaussian.hpp"
#include "sigcum/json_io.hpp"

#include <array>
#include <functional>
#include <optional>

namespace sigcum {

class VolterraKernel {
 public:
  enum class Kind { Constant, Exponential, Power, Custom };

  // K(t, s) = c.
  static VolterraKernel constant(double c);
  // K(t, s) = c exp(-λ (t - s)).
  static VolterraKernel exponential(double c, double lambda);
  // K(t, s) = c (t - s)^{H - 1/2}, H in (0, 1).
  static VolterraKernel power(double c, double hurst);
  static VolterraKernel custom(std::function<double(double, double)> k, bool singular = false);

  double operator()(double t, double s) const;
  // K(t, s) given the lag t - s computed by the caller; custom kernels ignore the lag.
  double at(double t, double s, double lag) const;
  Kind kind() const { return kind_; }
  double scale() const { return c_; }
  double rate() const { return lambda_; }
  double hurst() const { return hurst_; }
  // Blows up on the diagonal; quadrature switches to tanh-sinh.
  bool singular() const { return singular_; }

 private:
  Kind kind_ = Kind::Constant;
  double c_ = 0.0, lambda_ = 0.0, hurst_ = 0.5;
  bool singular_ = false;
  std::function<double(double, double)> custom_;
};

VolterraKernel kernel_from_json(const json& j);

struct VolterraSpec {
  std::array<VolterraKernel, 2> kernel{VolterraKernel::constant(1.0), VolterraKernel::constant(1.0)};
  std::array<double, 2> v0{1.0, 1.0};
  // Driver correlation; used only by the Gaussian variant.
  double rho = 0.0;

  void validate() const;
};

VolterraSpec volterra_from_json(const json& j);

// Forward variance curves u ↦ ξ^i_t(u) on [t, T].
using ForwardCurves = std::array<std::function<double(double)>, 2>;

// Cumulants of X = (ξ^1(T), ξ^2(T)) through level 4 (d = 2, depth 4). Without curves t must be 0 and
// ξ_0(u) = V_0.
Tensor<double> volterra_cumulants(const VolterraSpec& spec, double t, double T,
                                  const std::optional<ForwardCurves>& xi = std::nullopt,
                                  const QuadratureOptions& opts = {});

// X^i_t = ∫_0^t K^i(T, s) dB^i_s with d⟨B^1, B^2⟩ = ρ dt.
GaussianMartingaleModel volterra_gaussian_model(const VolterraSpec& spec, double T);

// ∫_a^b f(x, x - a, b - x), Gauss–Legendre with doubling, or a double-exponential rule when `singular`. The
// distances to the end points are passed separately so kernels singular there keep full precision; `length`
// overrides b - a when the caller knows it more accurately.
using EdgeIntegrand = std::function<double(double, double, double)>;
double integrate_kernel(const EdgeIntegrand& f, double a, double b, bool singular, const QuadratureOptions& opts = {},
                        double length = -1.0);

}  // namespace sigcum
