#include <doctest.h>

#include "sigcum/lie.hpp"
#include "sigcum/signature.hpp"
#include "test_support.hpp"

#include <sstream>

using namespace sigcum;
using namespace sigcum::testing;

namespace {

// Random path on dyadic times so that every sub-stretch fraction is exact.
CadlagPath<Q> random_dyadic_path(const AlgebraShape& sh, std::mt19937_64& rng, int events) {
  CadlagPath<Q> p(sh);
  double t = 0.0;
  std::uniform_int_distribution<int> coin(0, 2);
  for (int e = 0; e < events; ++e) {
    if (coin(rng) == 0 && t > 0.0) {
      p.add_jump(t, random_T0<Q>(sh, rng, 0.5));
    } else {
      p.add_linear(t, 0.5, random_T0<Q>(sh, rng, 0.5));
      t += 0.5;
    }
  }
  return p;
}

}  // namespace

TEST_SUITE("signature") {

TEST_CASE("sig_segment") {
  AlgebraShape sh(2, 4);
  CHECK(sig_segment(Tensor<Q>(sh)) == Tensor<Q>::unit(sh));
  auto s = sig_segment(Tensor<Q>::letter(sh, 1));
  CHECK(s.at({1, 1, 1}) == Q(1, 6));
  // RK4 on dS = S x dt over [0, 1].
  std::mt19937_64 rng(20);
  auto x = random_T0<double>(sh, rng);
  Tensor<double> y = Tensor<double>::unit(sh);
  const int n = 200;
  const double h = 1.0 / n;
  for (int i = 0; i < n; ++i) {
    auto k1 = y * x;
    auto k2 = (y + (h / 2) * k1) * x;
    auto k3 = (y + (h / 2) * k2) * x;
    auto k4 = (y + h * k3) * x;
    y += (h / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  CHECK(max_abs_difference(y, sig_segment(x)) <= 1e-10);
}

TEST_CASE("sig_path examples") {
  AlgebraShape sh(2, 4);
  std::mt19937_64 rng(21);
  auto x1 = random_T0<Q>(sh, rng), x2 = random_T0<Q>(sh, rng);
  CadlagPath<Q> jumps(sh);
  jumps.add_jump(1.0, x1);
  jumps.add_jump(2.0, x2);
  CHECK(sig_path(jumps, 0.0, 2.0) == exp_trunc(x1) * exp_trunc(x2));
  CHECK(log_signature(jumps, 0.0, 2.0) == bch(x1, x2));
  CHECK(sig_path(jumps, 1.5, 1.5) == Tensor<Q>::unit(sh));
  CHECK(sig_path(jumps, 1.0, 2.0) == exp_trunc(x2));
  CHECK_THROWS_AS(sig_path(jumps, 0.0, 3.0), DomainError);

  CadlagPath<Q> lin(sh);
  lin.add_linear(0.0, 1.0, x1);
  CHECK(log_signature(lin, 0.0, 1.0) == x1);
  lin.add_linear(1.0, 1.0, x2);
  CHECK(log_signature(lin, 0.0, 2.0) == bch(x1, x2));
}

TEST_CASE("jump inside a linear stretch splits it") {
  AlgebraShape sh(2, 3);
  auto e1 = Tensor<Q>::letter(sh, 1), e2 = Tensor<Q>::letter(sh, 2);
  CadlagPath<Q> p(sh);
  p.add_linear(0.0, 1.0, e1);
  p.add_jump(0.5, e2);
  const Q h(1, 2);
  CHECK(sig_path(p) == exp_trunc(Tensor<Q>(h * e1)) * exp_trunc(e2) * exp_trunc(Tensor<Q>(h * e1)));
}

TEST_CASE("Chen relation and invariants on random paths") {
  AlgebraShape sh(2, 4);
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 5; ++trial) {
    auto p = random_dyadic_path(sh, rng, 6);
    const double T = p.horizon();
    std::uniform_int_distribution<int> grid(0, static_cast<int>(T * 8));
    double a = grid(rng) / 8.0, b = grid(rng) / 8.0;
    if (a > b) std::swap(a, b);
    CHECK(sig_path(p, 0.0, a) * sig_path(p, a, b) * sig_path(p, b, T) == sig_path(p, 0.0, T));
    const auto total = p.total_increment(0.0, T);
    CHECK(sym_project(sig_path(p)) == sym_exp(sym_project(total)));
    auto level1 = project_level(sig_path(p), 1);
    CHECK(level1 == project_level(total, 1));
    // Reversed, negated path: atoms in reverse order with negated increments.
    CadlagPath<Q> rev(sh);
    std::vector<PathAtom<Q>> atoms = p.atoms(0.0, T);
    double cursor = 0.0;
    for (auto it = atoms.rbegin(); it != atoms.rend(); ++it) {
      if (it->kind == EventKind::Jump) {
        if (cursor == 0.0) continue;  // a jump exactly at T would sit at the reversed origin
        rev.add_jump(cursor, -it->value);
      } else {
        rev.add_linear(cursor, it->end - it->start, -it->value);
        cursor += it->end - it->start;
      }
    }
    bool last_is_jump = !atoms.empty() && atoms.back().kind == EventKind::Jump;
    if (!last_is_jump) CHECK(sig_path(p) * sig_path(rev) == Tensor<Q>::unit(sh));
  }
}

TEST_CASE("fine piecewise-linear approximation converges at second order") {
  // X_t = (t, t^2) on [0, 1]; reference from the Magnus ODE -dΩ = H(ad Ω) dX, solved with
  // many RK4 steps on the smooth rate.
  AlgebraShape sh(2, 3);
  const auto h = series_H<double>(3);
  auto rate = [&](double t) {
    Tensor<double> v(sh);
    v.at({1}) = 1.0;
    v.at({2}) = 2.0 * t;
    return v;
  };
  Tensor<double> omega(sh);
  const int steps = 4000;
  const double dt = 1.0 / steps;
  for (int i = 0; i < steps; ++i) {
    const double t = 1.0 - i * dt;  // integrate from T backwards
    auto f = [&](const Tensor<double>& o, double s) { return ad_series_apply(h, o, rate(s)); };
    auto k1 = f(omega, t);
    auto k2 = f(omega + (dt / 2) * k1, t - dt / 2);
    auto k3 = f(omega + (dt / 2) * k2, t - dt / 2);
    auto k4 = f(omega + dt * k3, t - dt);
    omega += (dt / 6) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  auto approx = [&](int m) {
    CadlagPath<double> p(sh);
    for (int i = 0; i < m; ++i) {
      const double a = static_cast<double>(i) / m, b = static_cast<double>(i + 1) / m;
      Tensor<double> inc(sh);
      inc.at({1}) = b - a;
      inc.at({2}) = b * b - a * a;
      p.add_linear(a, b - a, inc);
    }
    return log_signature(p);
  };
  const double e1 = max_abs_difference(approx(8), omega);
  const double e2 = max_abs_difference(approx(16), omega);
  const double e3 = max_abs_difference(approx(32), omega);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.1));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("sampled_brownian_signature") {
  AlgebraShape sh(2, 3);
  CHECK(sampled_brownian_signature({{0.0, 0.0}, {0.0, 0.0}}, sh) == Tensor<double>::unit(sh));
  std::vector<double> v{0.3, -1.2};
  auto expect = exp_trunc(level_one<double>(sh, v));
  CHECK(max_abs_difference(sampled_brownian_signature({v}, sh), expect) <= 1e-15);
}

TEST_CASE("JSONL path input") {
  std::istringstream good(
      R"({"t":0,"kind":"linear","dt":1,"value":{"d":2,"N":1,"levels":[[0],[1,0]]}})"
      "\n\n"
      R"({"t":1,"kind":"jump","value":{"d":2,"N":2,"levels":[[0],[0,1],["1/2",0,0,0]]}})"
      "\n");
  auto p = read_path_jsonl<Q>(good, 2, 3);
  CHECK(p.events().size() == 2);
  CHECK(p.horizon() == 1.0);
  CHECK(p.events()[1].value.at({1, 1}) == Q(1, 2));
  std::ostringstream out;
  write_path_jsonl(out, p);
  std::istringstream again(out.str());
  CHECK(sig_path(read_path_jsonl<Q>(again, 2, 3)) == sig_path(p));

  std::istringstream backwards(
      R"({"t":1,"kind":"jump","value":{"d":1,"N":1,"levels":[[0],[1]]}})"
      "\n"
      R"({"t":0.5,"kind":"jump","value":{"d":1,"N":1,"levels":[[0],[1]]}})");
  CHECK_THROWS_AS(read_path_jsonl<double>(backwards, 1, 2), InputError);
  std::istringstream overlap(
      R"({"t":0,"kind":"linear","dt":1,"value":{"d":1,"N":1,"levels":[[0],[1]]}})"
      "\n"
      R"({"t":0.5,"kind":"linear","dt":1,"value":{"d":1,"N":1,"levels":[[0],[1]]}})");
  CHECK_THROWS_AS(read_path_jsonl<double>(overlap, 1, 2), InputError);
  std::istringstream bad("{\"t\":0,\"kind\":\"linear\"}");
  CHECK_THROWS_AS(read_path_jsonl<double>(bad, 1, 2), InputError);
  std::istringstream scalar(R"({"t":1,"kind":"jump","value":{"d":1,"N":1,"levels":[[1],[1]]}})");
  CHECK_THROWS_AS(read_path_jsonl<double>(scalar, 1, 2), InputError);
  std::istringstream empty("");
  auto e = read_path_jsonl<double>(empty, 2, 2);
  CHECK(sig_path(e) == Tensor<double>::unit(AlgebraShape(2, 2)));
}

}
