#include <doctest.h>

#include "sigcum/models.hpp"
#include "sigcum/monte_carlo.hpp"
#include "sigcum/samplers.hpp"
#include "sigcum/signature.hpp"
#include "sigcum/volterra.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace sigcum;
using namespace sigcum::testing;

namespace {

// exp of a level-one vector, coefficient by coefficient: x_{w_1} ⋯ x_{w_n} / n!.
Tensor<double> exp_of_vector(const std::vector<double>& x, const AlgebraShape& sh) {
  Tensor<double> r(sh);
  double fact = 1.0;
  for (int n = 0; n <= sh.depth(); ++n) {
    if (n > 0) fact *= n;
    for (std::size_t i = 0; i < sh.level_size(n); ++i) {
      const Word w = word_from_index(i, n, sh.dim());
      double c = 1.0;
      for (int l : w) c *= x[static_cast<std::size_t>(l - 1)];
      r.at(w) = c / fact;
    }
  }
  return r;
}

// Classical cumulants c_n / n! of V_T - V_0 for dV = -λ(V - V_0) dt + c √V dW, from the affine Riccati
// system expanded in powers of θ, integrated with RK4.
std::vector<double> mean_reverting_cumulants(double c, double lambda, double v0, double T, int steps = 4000) {
  using State = std::array<double, 10>;  // psi_1..4 at 1..4, phi_1..4 at 6..9
  auto rhs = [&](const State& s) {
    State r{};
    for (int n = 1; n <= 4; ++n) {
      double q = 0.0;
      for (int k = 1; k < n; ++k) q += s[static_cast<std::size_t>(k)] * s[static_cast<std::size_t>(n - k)];
      r[static_cast<std::size_t>(n)] = -lambda * s[static_cast<std::size_t>(n)] + 0.5 * c * c * q;
      r[static_cast<std::size_t>(n + 5)] = lambda * v0 * s[static_cast<std::size_t>(n)];
    }
    return r;
  };
  State s{};
  s[1] = 1.0;
  const double h = T / steps;
  for (int k = 0; k < steps; ++k) {
    auto add = [&](const State& a, const State& b, double f) {
      State r;
      for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[i] + f * b[i];
      return r;
    };
    const State k1 = rhs(s), k2 = rhs(add(s, k1, h / 2)), k3 = rhs(add(s, k2, h / 2)), k4 = rhs(add(s, k3, h));
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += h / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
  }
  std::vector<double> out(5, 0.0);
  for (int n = 2; n <= 4; ++n) out[static_cast<std::size_t>(n)] = s[static_cast<std::size_t>(n + 5)] + v0 * s[static_cast<std::size_t>(n)];
  return out;
}

LevyTriplet sample_triplet() {
  LevyTriplet k;
  k.d = 2;
  k.b = {0.1, -0.2};
  k.a = {0.5, 0.1, 0.1, 0.3};
  k.jumps = {{0.7, {0.4, -0.3}}, {0.3, {1.2, 0.5}}};
  return k;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("Fawcett closed form") {
  CHECK(fawcett(3, 1.0, 1.0, 4).is_zero());
  auto k = fawcett(2, 0.0, 1.0, 4);
  CHECK(k.at({1, 1}) == 0.5);
  CHECK(k.at({2, 2}) == 0.5);
  k.at({1, 1}) = k.at({2, 2}) = 0.0;
  CHECK(k.is_zero());
  auto g = gaussian_cumulant(GaussianMartingaleModel::constant(2, {1, 0, 0, 1}), 0.0, 1.0, 4);
  CHECK(max_abs_difference(g, fawcett(2, 0.0, 1.0, 4)) <= 1e-14);
  CHECK_THROWS_AS(fawcett(2, 1.0, 0.5), DomainError);
}

TEST_CASE("Levy cumulant reductions") {
  LevyTriplet bm{2, {0.0, 0.0}, {1, 0, 0, 1}, {}};
  CHECK(max_abs_difference(levy_cumulant(bm, 0.2, 1.2, 4), fawcett(2, 0.2, 1.2, 4)) <= 1e-15);

  // One big jump, no compensator: (T - t)(exp(x) - 1).
  LevyTriplet big{2, {0.0, 0.0}, {0, 0, 0, 0}, {{1.0, {1.5, -0.4}}}};
  const AlgebraShape sh(2, 4);
  auto expect = exp_of_vector({1.5, -0.4}, sh);
  expect.scalar() = 0.0;
  expect *= 2.0;
  CHECK(max_abs_difference(levy_cumulant(big, 1.0, 3.0, 4), expect) <= 1e-14);

  // A small jump is compensated at level one.
  LevyTriplet small{2, {0.3, 0.0}, {0, 0, 0, 0}, {{2.0, {0.5, 0.5}}}};
  auto ks = levy_cumulant(small, 0.0, 1.0, 3);
  CHECK(ks.at({1}) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(ks.at({2}) == doctest::Approx(0.0));
  CHECK(ks.at({1, 2}) == doctest::Approx(2.0 * 0.25 / 2));
}

TEST_CASE("Levy cumulant is linear in (b, a) and additive in atoms") {
  auto k = sample_triplet();
  LevyTriplet drift{2, k.b, {0, 0, 0, 0}, {}}, diff{2, {0, 0}, k.a, {}};
  LevyTriplet j1{2, {0, 0}, {0, 0, 0, 0}, {k.jumps[0]}}, j2{2, {0, 0}, {0, 0, 0, 0}, {k.jumps[1]}};
  auto sum = levy_cumulant(drift, 0, 1, 4) + levy_cumulant(diff, 0, 1, 4) + levy_cumulant(j1, 0, 1, 4) +
             levy_cumulant(j2, 0, 1, 4);
  CHECK(max_abs_difference(levy_cumulant(k, 0, 1, 4), sum) <= 1e-15);

  LevyTriplet twice = k;
  for (auto& b : twice.b) b *= 2;
  for (auto& a : twice.a) a *= 2;
  LevyTriplet base = k;
  base.jumps.clear();
  auto lhs = levy_cumulant(twice, 0, 1, 4) - levy_cumulant(k, 0, 1, 4);
  CHECK(max_abs_difference(lhs, levy_cumulant(base, 0, 1, 4)) <= 1e-15);
}

TEST_CASE("Levy triplet validation and JSON") {
  auto bad = sample_triplet();
  bad.jumps[0].weight = -1.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad = sample_triplet();
  bad.a = {1, 2, 2, 1};
  CHECK_THROWS_AS(bad.validate(), DomainError);
  const json j = json::parse(R"({"d":2,"b":[0.1,-0.2],"a":[[0.5,0.1],[0.1,0.3]],
      "jumps":[{"weight":0.7,"point":[0.4,-0.3]},{"weight":0.3,"point":[1.2,0.5]}]})");
  auto k = levy_from_json(j);
  CHECK(max_abs_difference(levy_cumulant(k, 0, 1, 3), levy_cumulant(sample_triplet(), 0, 1, 3)) == 0.0);
  CHECK_THROWS_AS(levy_from_json(json::parse(R"({"d":2,"b":[1]})")), InputError);
}

TEST_CASE("inhomogeneous generator") {
  const AlgebraShape sh(2, 4);
  auto k = sample_triplet();
  const auto eta = levy_eta(k, sh);
  auto c = inhom_levy_cumulant(sh, [&](double) { return eta; }, 0.5, 2.0);
  CHECK(max_abs_difference(c, levy_cumulant(k, 0.5, 2.0, 4)) <= 1e-13);

  GaussianMartingaleModel m(2, [](double t) { return Matrix{1 + t, 0.2 * t, 0.2 * t, 2 - t}; });
  auto g = gaussian_cumulant(m, 0.0, 1.0, 4);
  auto h = inhom_levy_cumulant(sh, [&](double u) { return 0.5 * m.covariance_tensor(u, sh); }, 0.0, 1.0);
  CHECK(max_abs_difference(g, h) <= 1e-12);

  // Two constant pieces compose by BCH of the earlier piece with the later one.
  std::mt19937_64 rng(5);
  const auto e1 = random_T0<double>(sh, rng), e2 = random_T0<double>(sh, rng);
  const std::vector<double> bps{0.0, 0.4, 1.0};
  auto p = inhom_levy_cumulant(sh, [&](double u) { return u < 0.4 ? e1 : e2; }, 0.0, 1.0, {}, bps);
  CHECK(max_abs_difference(p, bch(0.4 * e1, 0.6 * e2)) <= 1e-12);
}

TEST_CASE("Volterra cumulants: degenerate and constant kernels") {
  VolterraSpec zero;
  zero.kernel = {VolterraKernel::constant(0.0), VolterraKernel::constant(0.0)};
  CHECK(volterra_cumulants(zero, 0.0, 1.0).is_zero());

  VolterraSpec one;
  one.v0 = {0.04, 0.09};
  const double T = 1.5;
  auto k = volterra_cumulants(one, 0.0, T);
  CHECK(project_level(k, 1).is_zero());
  CHECK(k.at({1, 2}) == 0.0);
  CHECK(k.at({2, 1}) == 0.0);
  for (int i = 1; i <= 2; ++i) {
    const double v = one.v0[static_cast<std::size_t>(i - 1)];
    // log E exp(θ(V_T - V_0)) = V_0 Σ θ^n (T/2)^{n-1}
    CHECK(k.at({i, i}) == doctest::Approx(0.5 * T * v).epsilon(1e-15));
    CHECK(k.at({i, i, i}) == doctest::Approx(v * T * T / 4).epsilon(1e-13));
    CHECK(k.at({i, i, i, i}) == doctest::Approx(v * T * T * T / 8).epsilon(1e-12));
  }
  CHECK(std::abs(k.at({1, 1, 2, 2})) <= 1e-15);
  CHECK_THROWS_AS(volterra_cumulants(one, 0.5, 1.0), DomainError);
}

TEST_CASE("Volterra cumulants: exponential kernel against the Riccati expansion") {
  VolterraSpec s;
  s.kernel = {VolterraKernel::exponential(0.8, 1.3), VolterraKernel::exponential(0.5, 0.2)};
  s.v0 = {0.3, 0.7};
  const double T = 1.2;
  auto k = volterra_cumulants(s, 0.0, T);
  for (int i = 1; i <= 2; ++i) {
    const auto& K = s.kernel[static_cast<std::size_t>(i - 1)];
    auto c = mean_reverting_cumulants(K.scale(), K.rate(), s.v0[static_cast<std::size_t>(i - 1)], T);
    CHECK(k.at({i, i}) == doctest::Approx(c[2]).epsilon(1e-10));
    CHECK(k.at({i, i, i}) == doctest::Approx(c[3]).epsilon(1e-10));
    CHECK(k.at({i, i, i, i}) == doctest::Approx(c[4]).epsilon(1e-9));
  }
}

TEST_CASE("Volterra commutator term") {
  VolterraSpec s;
  const double c = 0.9, lam = 0.7, T = 2.0;
  s.kernel = {VolterraKernel::constant(1.0), VolterraKernel::exponential(c, lam)};
  s.v0 = {0.5, 2.0};
  auto k = volterra_cumulants(s, 0.0, T);
  const double v = s.v0[0] * s.v0[1];
  const double c1 = v * c * c / (2 * lam) * (T - (1 - std::exp(-2 * lam * T)) / (2 * lam));
  const double c2 = v * c * c * (1 - std::exp(-2 * lam * T) * (1 + 2 * lam * T)) / (4 * lam * lam);
  CHECK(k.at({1, 1, 2, 2}) == doctest::Approx((c1 - c2) / 8).epsilon(1e-10));
  CHECK(k.at({2, 2, 1, 1}) == doctest::Approx((c2 - c1) / 8).epsilon(1e-10));
  CHECK(k.at({1, 2, 1, 2}) == 0.0);
}

TEST_CASE("Volterra power kernel uses the singular rule") {
  VolterraSpec s;
  const double H = 0.1, c = 0.6, T = 1.0;
  s.kernel = {VolterraKernel::power(c, H), VolterraKernel::constant(1.0)};
  CHECK(s.kernel[0].singular());
  auto k = volterra_cumulants(s, 0.0, T);
  CHECK(k.at({1, 1}) == doctest::Approx(0.5 * c * c * std::pow(T, 2 * H) / (2 * H)).epsilon(1e-8));
  // g(u) = c^3 (T-u)^{3H-1/2} B(2H, H+1/2)
  const double k3 = 0.5 * std::pow(c, 4) * std::beta(2 * H, H + 0.5) * std::pow(T, 4 * H) / (4 * H);
  CHECK(k.at({1, 1, 1}) == doctest::Approx(k3).epsilon(1e-9));
  // h(u) = c^6 (B1^2/8 + B1 B2/2) (T-u)^{6H-1}, B2 = B(4H, H+1/2)
  const double b1 = std::beta(2 * H, H + 0.5), b2 = std::beta(4 * H, H + 0.5);
  const double k4 = std::pow(c, 6) * (b1 * b1 / 8 + b1 * b2 / 2) * std::pow(T, 6 * H) / (6 * H);
  CHECK(k.at({1, 1, 1, 1}) == doctest::Approx(k4).epsilon(1e-9));
}

TEST_CASE("Volterra spec JSON") {
  auto s = volterra_from_json(json::parse(
      R"({"kernels":[{"type":"constant","c":1},{"type":"exponential","c":0.5,"lambda":2}],"V0":[0.1,0.2]})"));
  CHECK(s.kernel[1](1.0, 0.5) == doctest::Approx(0.5 * std::exp(-1.0)));
  CHECK_THROWS_AS(volterra_from_json(json::parse(R"({"kernels":[],"V0":[1,1]})")), InputError);
  CHECK_THROWS_AS(volterra_from_json(json::parse(
                      R"({"kernels":[{"type":"constant"},{"type":"constant"}],"V0":[-1,1]})")),
                  InputError);
}

TEST_CASE("correlated Gaussian Volterra model with equal kernels") {
  VolterraSpec s;
  s.kernel = {VolterraKernel::exponential(1.1, 0.6), VolterraKernel::exponential(1.1, 0.6)};
  s.rho = 0.4;
  auto k = gaussian_cumulant(volterra_gaussian_model(s, 1.0), 0.0, 1.0, 6);
  for (int n = 3; n <= 6; ++n) CHECK(max_abs_coefficient(project_level(k, n)) <= 1e-12);
  CHECK(k.at({1, 2}) != 0.0);
}

TEST_CASE("PSD Cholesky") {
  const Matrix a{4, 2, 0, 2, 1, 0, 0, 0, 9};
  auto l = cholesky_psd(a, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += l[static_cast<std::size_t>(i * 3 + k)] * l[static_cast<std::size_t>(j * 3 + k)];
      CHECK(s == doctest::Approx(a[static_cast<std::size_t>(i * 3 + j)]));
    }
}

TEST_CASE("samplers: zero volatility and reproducibility") {
  BrownianSampler still(2, [](double) { return Matrix(4, 0.0); }, 1.0, 50);
  auto rng = path_rng(1, 0);
  SampledPath p;
  still.sample(rng, p);
  CHECK(p.steps() == 50);
  CHECK(std::all_of(p.increments.begin(), p.increments.end(), [](double x) { return x == 0.0; }));

  LevyTriplet drift{2, {0.3, -0.2}, {0, 0, 0, 0}, {}};
  LevySampler ds(drift, 2.0, 10);
  const AlgebraShape sh(2, 3);
  auto r = mc_expected_signature(ds, sh, {.paths = 50, .seed = 3});
  CHECK(max_abs_difference(r.mean, exp_of_vector({0.6, -0.4}, sh)) <= 1e-14);
  CHECK(max_abs_coefficient(r.stderr_) <= 1e-14);

  LevySampler ls(sample_triplet(), 1.0, 20);
  SampledPath a, b;
  auto r1 = path_rng(99, 12345), r2 = path_rng(99, 12345);
  ls.sample(r1, a);
  ls.sample(r2, b);
  CHECK(a.increments == b.increments);
  CHECK(a.times == b.times);

  auto one = mc_expected_signature(ls, sh, {.paths = 3000, .seed = 8, .threads = 1, .block = 256});
  auto three = mc_expected_signature(ls, sh, {.paths = 3000, .seed = 8, .threads = 3, .block = 256});
  CHECK(max_abs_difference(one.mean, three.mean) == 0.0);
  CHECK(max_abs_difference(one.log_stderr, three.log_stderr) == 0.0);
}

TEST_CASE("sampled path replays through the JSONL format") {
  LevySampler ls(sample_triplet(), 1.0, 8);
  auto rng = path_rng(4, 0);
  SampledPath p;
  ls.sample(rng, p);
  auto path = p.to_path(3);
  std::stringstream io;
  write_path_jsonl(io, path);
  auto back = read_path_jsonl<double>(io, 2, 3);
  Tensor<double> direct = Tensor<double>::unit(AlgebraShape(2, 3));
  for (std::size_t k = 0; k < p.steps(); ++k) mul_exp_level_one<double>(direct, p.increment(k));
  CHECK(max_abs_difference(sig_path(back), direct) <= 1e-13);
}

TEST_CASE("Levy sampler: inter-jump gaps are exponential") {
  const double lambda = 2.0;
  LevyTriplet k{1, {0.0}, {0.0}, {{lambda, {1.0}}}};
  LevySampler s(k, 400.0, 4);
  auto rng = path_rng(11, 0);
  SampledPath p;
  s.sample(rng, p);
  std::vector<double> gaps;
  double last = 0.0;
  for (std::size_t i = 0; i < p.steps(); ++i)
    if (p.jump[i]) {
      gaps.push_back(p.times[i] - last);
      last = p.times[i];
    }
  REQUIRE(gaps.size() > 500);
  std::sort(gaps.begin(), gaps.end());
  double dmax = 0.0;
  const double n = static_cast<double>(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    const double f = 1.0 - std::exp(-lambda * gaps[i]);
    dmax = std::max({dmax, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  CHECK(dmax * std::sqrt(n) < 1.63);
}

TEST_CASE("stopped Brownian motion: exit time") {
  CHECK(unit_ball_exit_time(2, {0.0, 0.0}) == 0.5);
  CHECK(unit_ball_exit_time(3, {0.5, 0.0, 0.0, 7.0}) == doctest::Approx(0.25));
  CHECK_THROWS_AS(unit_ball_exit_time(2, {1.0, 0.0}), DomainError);

  StoppedBrownianSampler s(2, 2, {0.0, 0.0}, 1e-3);
  auto r = mc_expected_signature(s, AlgebraShape(2, 2), {.paths = 4000, .seed = 21});
  CHECK(std::abs(r.stop_time - 0.5) < 3 * r.stop_time_stderr + 5e-4);
  CHECK(r.censored == 0);
  // The exit point is on the circle, so Σ_i Sig_ii = 1/2 path by path.
  CHECK(r.mean.at({1, 1}) + r.mean.at({2, 2}) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("Volterra sampler") {
  VolterraSpec zero;
  zero.kernel = {VolterraKernel::constant(0.0), VolterraKernel::constant(0.0)};
  VolterraEulerSampler z(zero, 1.0, 20);
  auto rng = path_rng(2, 0);
  SampledPath p;
  z.sample(rng, p);
  CHECK(std::all_of(p.increments.begin(), p.increments.end(), [](double x) { return x == 0.0; }));

  VolterraSpec wild;
  wild.kernel = {VolterraKernel::constant(3.0), VolterraKernel::power(2.0, 0.2)};
  wild.v0 = {0.01, 0.01};
  auto r = mc_expected_signature(VolterraEulerSampler(wild, 1.0, 20), AlgebraShape(2, 2), {.paths = 200, .seed = 1});
  CHECK(r.clamps > 0);
}

TEST_CASE("log Jacobian matches finite differences") {
  std::mt19937_64 rng(17);
  const AlgebraShape sh(2, 3);
  auto m = random_T0<double>(sh, rng);
  m *= 0.3;
  m.scalar() = 1.0;
  const auto jac = log_jacobian(m);
  const std::size_t p = sh.size() - 1;
  const double h = 1e-6;
  for (std::size_t u = 0; u < p; ++u) {
    auto up = m, dn = m;
    up[u + 1] += h;
    dn[u + 1] -= h;
    auto fd = log_trunc(up) - log_trunc(dn);
    for (std::size_t w = 0; w < p; ++w) CHECK(jac[w * p + u] == doctest::Approx(fd[w + 1] / (2 * h)).epsilon(1e-6));
  }
}

}  // TEST_SUITE
