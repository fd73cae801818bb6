#include "sigcum/models.hpp"

#include <cmath>
#include <string>

namespace sigcum {

Tensor<double> fawcett(int d, double t, double T, int depth) {
  if (t > T) throw DomainError("fawcett needs t <= T");
  Tensor<double> k{AlgebraShape(d, depth)};
  if (depth < 2) return k;
  for (int i = 1; i <= d; ++i) k.at({i, i}) = 0.5 * (T - t);
  return k;
}

void LevyTriplet::validate() const {
  if (d < 1) throw DomainError("Levy triplet: dimension must be positive");
  if (static_cast<int>(b.size()) != d) throw DomainError("Levy triplet: drift has the wrong length");
  check_covariance(a, d);
  for (const auto& j : jumps) {
    if (!(j.weight > 0.0) || !std::isfinite(j.weight)) throw DomainError("Levy triplet: jump weights must be positive");
    if (static_cast<int>(j.point.size()) != d) throw DomainError("Levy triplet: jump point has the wrong length");
  }
}

double LevyTriplet::total_intensity() const {
  double s = 0.0;
  for (const auto& j : jumps) s += j.weight;
  return s;
}

LevyTriplet levy_from_json(const json& j) {
  try {
    LevyTriplet k;
    k.d = json_int_field(j, "d");
    const auto n = static_cast<std::size_t>(k.d);
    k.b = j.contains("b") ? j["b"].get<std::vector<double>>() : std::vector<double>(n, 0.0);
    if (j.contains("a")) {
      for (const auto& row : j["a"]) {
        const auto r = row.get<std::vector<double>>();
        k.a.insert(k.a.end(), r.begin(), r.end());
      }
    } else {
      k.a.assign(n * n, 0.0);
    }
    if (j.contains("jumps"))
      for (const auto& a : j["jumps"])
        k.jumps.push_back({a.at("weight").get<double>(), a.at("point").get<std::vector<double>>()});
    k.validate();
    return k;
  } catch (const json::exception& e) {
    throw InputError(std::string("Levy triplet JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw InputError(e.what());
  }
}

Tensor<double> levy_eta(const LevyTriplet& k, const AlgebraShape& sh) {
  k.validate();
  if (sh.dim() != k.d) throw ShapeError("Levy triplet dimension does not match the algebra");
  Tensor<double> eta(sh);
  if (sh.depth() == 0) return eta;
  for (int i = 0; i < k.d; ++i) eta.level(1)[static_cast<std::size_t>(i)] = k.b[static_cast<std::size_t>(i)];
  Tensor<double> a = matrix_to_level_two(k.a, sh);
  eta.add_scaled(a, 0.5);
  for (const auto& j : k.jumps) {
    Tensor<double> x(sh);
    double norm2 = 0.0;
    for (int i = 0; i < k.d; ++i) {
      x.level(1)[static_cast<std::size_t>(i)] = j.point[static_cast<std::size_t>(i)];
      norm2 += j.point[static_cast<std::size_t>(i)] * j.point[static_cast<std::size_t>(i)];
    }
    Tensor<double> e = exp_trunc(x);
    e.scalar() = 0.0;
    if (norm2 <= 1.0) e -= x;
    eta.add_scaled(e, j.weight);
  }
  return eta;
}

Tensor<double> levy_cumulant(const LevyTriplet& k, double t, double T, int depth) {
  if (t > T) throw DomainError("levy_cumulant needs t <= T");
  Tensor<double> eta = levy_eta(k, AlgebraShape(k.d, depth));
  eta *= (T - t);
  return eta;
}

CumulantReport inhom_levy_cumulant_report(const AlgebraShape& sh, const TensorFunction& eta, double t, double T,
                                          const QuadratureOptions& opts, std::span<const double> breakpoints) {
  return generator_cumulant(sh, eta, t, T, opts, breakpoints);
}

Tensor<double> inhom_levy_cumulant(const AlgebraShape& sh, const TensorFunction& eta, double t, double T,
                                   const QuadratureOptions& opts, std::span<const double> breakpoints) {
  return generator_cumulant(sh, eta, t, T, opts, breakpoints).kappa;
}

namespace {

double inner_norm2(int n, const std::vector<double>& x) {
  if (n < 1 || static_cast<std::size_t>(n) > x.size()) throw DomainError("ball dimension must be in 1..d");
  double r2 = 0.0;
  for (int i = 0; i < n; ++i) r2 += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
  if (!(r2 < 1.0)) throw DomainError("start point must lie inside the unit ball");
  return r2;
}

}  // namespace

double unit_ball_exit_time(int n, const std::vector<double>& x) { return (1.0 - inner_norm2(n, x)) / n; }

double stopped_bm_level_two(int n, const std::vector<double>& x) { return 0.5 * unit_ball_exit_time(n, x); }

double stopped_bm_level_two_display(const std::vector<double>& x, int n) { return 0.5 * (1.0 - inner_norm2(n, x)); }

}  // namespace sigcum
