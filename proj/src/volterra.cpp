#include "sigcum/volterra.hpp"

#include <cmath>
#include <string>

namespace sigcum {

VolterraKernel VolterraKernel::constant(double c) {
  VolterraKernel k;
  k.kind_ = Kind::Constant;
  k.c_ = c;
  return k;
}

VolterraKernel VolterraKernel::exponential(double c, double lambda) {
  VolterraKernel k;
  k.kind_ = Kind::Exponential;
  k.c_ = c;
  k.lambda_ = lambda;
  return k;
}

VolterraKernel VolterraKernel::power(double c, double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0)) throw DomainError("power kernel needs H in (0, 1)");
  VolterraKernel k;
  k.kind_ = Kind::Power;
  k.c_ = c;
  k.hurst_ = hurst;
  k.singular_ = hurst < 0.5;
  return k;
}

VolterraKernel VolterraKernel::custom(std::function<double(double, double)> f, bool singular) {
  if (!f) throw DomainError("custom kernel must be callable");
  VolterraKernel k;
  k.kind_ = Kind::Custom;
  k.custom_ = std::move(f);
  k.singular_ = singular;
  return k;
}

double VolterraKernel::operator()(double t, double s) const { return at(t, s, t - s); }

double VolterraKernel::at(double t, double s, double lag) const {
  switch (kind_) {
    case Kind::Constant:
      return c_;
    case Kind::Exponential:
      return c_ * std::exp(-lambda_ * lag);
    case Kind::Power:
      return lag > 0.0 ? c_ * std::pow(lag, hurst_ - 0.5) : 0.0;
    case Kind::Custom:
      return custom_(t, s);
  }
  return 0.0;
}

VolterraKernel kernel_from_json(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  const double c = j.value("c", 1.0);
  if (type == "constant") return VolterraKernel::constant(c);
  if (type == "exponential") return VolterraKernel::exponential(c, j.at("lambda").get<double>());
  if (type == "power") return VolterraKernel::power(c, j.at("H").get<double>());
  throw InputError("unknown kernel type '" + type + "'");
}

void VolterraSpec::validate() const {
  for (double v : v0)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("Volterra spec: V0 must be positive");
  if (!(rho >= -1.0 && rho <= 1.0)) throw DomainError("Volterra spec: rho must lie in [-1, 1]");
}

VolterraSpec volterra_from_json(const json& j) {
  try {
    VolterraSpec s;
    const auto& ks = j.at("kernels");
    if (!ks.is_array() || ks.size() != 2) throw InputError("Volterra spec: 'kernels' needs two entries");
    s.kernel = {kernel_from_json(ks[0]), kernel_from_json(ks[1])};
    const auto v = j.at("V0").get<std::vector<double>>();
    if (v.size() != 2) throw InputError("Volterra spec: 'V0' needs two entries");
    s.v0 = {v[0], v[1]};
    s.rho = j.value("rho", 0.0);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw InputError(std::string("Volterra spec JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

double integrate_kernel(const EdgeIntegrand& f, double a, double b, bool singular, const QuadratureOptions& opts,
                        double length) {
  if (length < 0.0) length = b - a;
  if (!(length > 0.0)) return 0.0;
  if (!singular) return integrate([&](double x) { return f(x, x - a, b - x); }, a, b, opts).value;
  // Double-exponential rule x = tanh(π/2 sinh t) on [-1, 1]; the distance to the nearer end is
  // 2/(1 + e^{2σ}) with σ = π/2 sinh|t|, so points a few ulps from a or b keep exact lags.
  const double half = 0.5 * length;
  constexpr double pi2 = 1.5707963267948966;
  // Nodes stop where the distance to an end point would drop below 1e-100, keeping products of singular
  // factors finite.
  const double sigma_max = 0.5 * std::log(length / 1e-100);
  if (!(sigma_max > 0.0)) return 0.0;
  auto node = [&](double t) {
    const double sg = pi2 * std::sinh(std::abs(t));
    if (sg > sigma_max) return 0.0;
    const double e = std::exp(-2.0 * sg);
    const double near = half * 2.0 * e / (1.0 + e);
    const double far = length - near;
    const double ch = std::cosh(sg);
    const double w = pi2 * std::cosh(t) / (ch * ch);
    const double x = t < 0.0 ? a + near : b - near;
    const double v = t < 0.0 ? f(x, near, far) : f(x, far, near);
    return w * v;
  };
  auto sum_from = [&](double start, double step) {
    double acc = 0.0;
    for (double t = start; pi2 * std::sinh(t) <= sigma_max; t += step) acc += node(t) + node(-t);
    return acc;
  };
  double h = 0.5;
  double sum = node(0.0) + sum_from(h, h);
  double prev = half * h * sum;
  for (int level = 1; level <= 12; ++level) {
    h *= 0.5;
    sum += sum_from(h, 2.0 * h);
    const double cur = half * h * sum;
    if (!std::isfinite(cur)) throw ConvergenceError("double-exponential quadrature produced a non-finite value");
    if (level >= 3 && std::abs(cur - prev) <= opts.tol * std::max(1.0, std::abs(cur))) return cur;
    // Windows this short only feed outer nodes within 1e-40 of an end point; the node floor truncates
    // their tails, so a coarse value is returned.
    if (level >= 3 && length < 1e-40) return cur;
    prev = cur;
  }
  throw ConvergenceError("double-exponential quadrature did not reach tolerance " + std::to_string(opts.tol));
}

namespace {

// Integrals for one coordinate; `dT` arguments are T - u computed without cancellation.
struct Leg {
  const VolterraKernel& k;
  const std::function<double(double)>& xi;
  double T;
  const QuadratureOptions& opts;

  // ∫ over [u, T] with T - u = dT.
  double quad(const EdgeIntegrand& f, double u, double dT) const {
    return integrate_kernel(f, u, T, k.singular(), opts, dT);
  }
  double kt(double u, double dT) const { return k.at(T, u, dT); }
  double kt2(double u, double dT) const {
    const double v = kt(u, dT);
    return v * v;
  }
  // g(u) = ∫_u^T K(T,s)^2 K(s,u) ds
  double g(double u, double dT) const {
    return quad([&](double s, double dl, double dr) { return kt2(s, dr) * k.at(s, u, dl); }, u, dT);
  }
  double f(double u, double dT) const { return kt(u, dT) * g(u, dT); }
  // h(u) = g(u)^2/8 + K(T,u)/2 ∫_u^T f(s) K(s,u) ds
  double h(double u, double dT) const {
    const double gu = g(u, dT);
    const double inner = quad([&](double s, double dl, double dr) { return f(s, dr) * k.at(s, u, dl); }, u, dT);
    return 0.125 * gu * gu + 0.5 * kt(u, dT) * inner;
  }
  // A(u) = ∫_u^T K(T,s)^2 ξ(s) ds
  double tail(double u, double dT) const {
    return quad([&](double s, double, double dr) { return kt2(s, dr) * xi(s); }, u, dT);
  }
};

}  // namespace

Tensor<double> volterra_cumulants(const VolterraSpec& spec, double t, double T,
                                  const std::optional<ForwardCurves>& xi, const QuadratureOptions& opts) {
  spec.validate();
  if (t > T) throw DomainError("volterra_cumulants needs t <= T");
  if (!xi && t != 0.0) throw DomainError("forward variance curves are required for t > 0");
  ForwardCurves curves;
  if (xi) {
    curves = *xi;
  } else {
    for (int i = 0; i < 2; ++i) {
      const double v = spec.v0[static_cast<std::size_t>(i)];
      curves[static_cast<std::size_t>(i)] = [v](double) { return v; };
    }
  }

  const AlgebraShape sh(2, 4);
  Tensor<double> kappa(sh);
  std::array<double, 2> cross{};
  for (int i = 0; i < 2; ++i) {
    const auto ii = static_cast<std::size_t>(i);
    const Leg leg{spec.kernel[ii], curves[ii], T, opts};
    const Leg other{spec.kernel[1 - ii], curves[1 - ii], T, opts};
    const auto& x = curves[ii];
    const int e = i + 1;
    kappa.at({e, e}) = 0.5 * leg.quad([&](double u, double, double dT) { return leg.kt2(u, dT) * x(u); }, t, T - t);
    kappa.at({e, e, e}) = 0.5 * leg.quad([&](double u, double, double dT) { return leg.f(u, dT) * x(u); }, t, T - t);
    kappa.at({e, e, e, e}) = leg.quad([&](double u, double, double dT) { return leg.h(u, dT) * x(u); }, t, T - t);
    cross[ii] = integrate_kernel(
        [&](double u, double, double dT) { return other.tail(u, dT) * leg.kt2(u, dT) * x(u); }, t, T,
        leg.k.singular() || other.k.singular(), opts);
  }
  // -1/8 Σ_i [e_īī, e_ii] C_i
  kappa.at({1, 1, 2, 2}) = 0.125 * (cross[0] - cross[1]);
  kappa.at({2, 2, 1, 1}) = 0.125 * (cross[1] - cross[0]);
  return kappa;
}

GaussianMartingaleModel volterra_gaussian_model(const VolterraSpec& spec, double T) {
  spec.validate();
  const auto k1 = spec.kernel[0], k2 = spec.kernel[1];
  const double rho = spec.rho;
  return GaussianMartingaleModel(2, [k1, k2, rho, T](double u) {
    const double a = k1(T, u), b = k2(T, u);
    return Matrix{a * a, rho * a * b, rho * a * b, b * b};
  });
}

}  // namespace sigcum
