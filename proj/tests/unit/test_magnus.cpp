#include <doctest.h>

#include "sigcum/magnus.hpp"
#include "test_support.hpp"

using namespace sigcum;
using namespace sigcum::testing;

namespace {

template <class S>
CadlagPath<S> random_linear_path(const AlgebraShape& sh, std::mt19937_64& rng, int segments) {
  CadlagPath<S> p(sh);
  double t = 0.0;
  for (int i = 0; i < segments; ++i) {
    p.add_linear(t, 0.25 * (1 + i % 3), random_level_one<S>(sh, rng));
    t += 0.25 * (1 + i % 3);
  }
  return p;
}

template <class S>
CadlagPath<S> random_mixed_path(const AlgebraShape& sh, std::mt19937_64& rng, int events, bool level_one) {
  CadlagPath<S> p(sh);
  double t = 0.0;
  for (int i = 0; i < events; ++i) {
    auto v = level_one ? random_level_one<S>(sh, rng) : random_T0<S>(sh, rng, 0.5);
    if (i % 3 == 1) {
      p.add_jump(t, v);
    } else {
      p.add_linear(t, 0.5, v);
      t += 0.5;
    }
  }
  return p;
}

}  // namespace

TEST_SUITE("magnus") {

TEST_CASE("one direction: brackets vanish") {
  AlgebraShape sh(2, 4);
  Tensor<double> v(sh);
  v.at({1}) = 0.7;
  v.at({2}) = -0.2;
  CadlagPath<double> p(sh);
  p.add_linear(0.0, 2.0, 2.0 * v);
  auto rep = hausdorff_solve(p, 0.5, 2.0);
  CHECK(max_abs_difference(rep.omega, 1.5 * v) <= 1e-14);
  CHECK(rep.estimated_error >= 0.0);
  for (int n = 2; n <= 4; ++n) CHECK(magnus_expansion_term(p, n, 0.0, 2.0).is_zero());
}

TEST_CASE("two segments give BCH") {
  AlgebraShape sh(2, 5);
  std::mt19937_64 rng(30);
  auto x1 = random_level_one<double>(sh, rng), x2 = random_level_one<double>(sh, rng);
  CadlagPath<double> p(sh);
  p.add_linear(0.0, 1.0, x1);
  p.add_linear(1.0, 1.0, x2);
  auto rep = hausdorff_solve(p, 0.0, 2.0);
  CHECK(max_abs_difference(rep.omega, bch(x1, x2)) <= 1e-8);
}

TEST_CASE("random five-segment paths") {
  AlgebraShape sh(2, 4);
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 5; ++trial) {
    auto p = random_linear_path<double>(sh, rng, 5);
    auto rep = hausdorff_solve(p, 0.0, p.horizon());
    CHECK(max_abs_difference(rep.omega, log_signature(p)) <= 1e-8);
    CHECK(rep.estimated_error <= 1e-10);
    CHECK(rep.steps > 0);
  }
}

TEST_CASE("hausdorff_solve rejects jumps and reports non-convergence") {
  AlgebraShape sh(2, 3);
  CadlagPath<double> p(sh);
  p.add_jump(1.0, Tensor<double>::letter(sh, 1));
  CHECK_THROWS_AS(hausdorff_solve(p, 0.0, 1.0), DomainError);
  std::mt19937_64 rng(32);
  auto q = random_linear_path<double>(sh, rng, 2);
  MagnusOptions tight;
  tight.tol = 0.0;
  tight.max_refinements = 2;
  CHECK_THROWS_AS(hausdorff_solve(q, 0.0, q.horizon(), tight), ConvergenceError);
}

TEST_CASE("jump_magnus") {
  AlgebraShape sh(2, 4);
  std::mt19937_64 rng(33);
  std::vector<Tensor<Q>> xs;
  CadlagPath<Q> jumps(sh);
  for (int i = 1; i <= 4; ++i) {
    xs.push_back(random_T0<Q>(sh, rng, 0.5));
    jumps.add_jump(i, xs.back());
  }
  CHECK(jump_magnus(jumps, 0.0, 4.0) == bch(xs));
  CadlagPath<Q> none(sh);
  CHECK(jump_magnus(none, 0.0, 0.0).is_zero());
  for (int trial = 0; trial < 3; ++trial) {
    auto p = random_mixed_path<double>(sh, rng, 7, false);
    CHECK(max_abs_difference(jump_magnus(p, 0.0, p.horizon()), log_signature(p)) <= 1e-9);
  }
}

TEST_CASE("graded expansion") {
  AlgebraShape sh(2, 4);
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 3; ++trial) {
    auto p = random_mixed_path<double>(sh, rng, 7, false);
    const double T = p.horizon();
    CHECK(max_abs_difference(magnus_expansion_term(p, 1, 0.0, T), project_level(p.total_increment(0.0, T), 1)) <= 1e-14);
    const auto jm = jump_magnus(p, 0.0, T);
    for (int n = 1; n <= 4; ++n)
      CHECK(max_abs_difference(magnus_expansion_term(p, n, 0.0, T), project_level(jm, n)) <= 1e-9);
    auto pq = random_mixed_path<Q>(sh, rng, 7, false);
    CHECK(magnus_expansion(pq, 0.0, pq.horizon(), 4) == log_signature(pq));
  }
}

TEST_CASE("Lie-in-V for level-one drivers") {
  AlgebraShape sh(3, 4);
  std::mt19937_64 rng(35);
  auto p = random_mixed_path<Q>(sh, rng, 6, true);
  CHECK(lie_defect(magnus_expansion(p, 0.0, p.horizon(), 4)) == 0.0);
  auto pd = random_linear_path<double>(sh, rng, 4);
  CHECK(lie_defect(hausdorff_solve(pd, 0.0, pd.horizon()).omega) <= 1e-9);
}

TEST_CASE("backward consistency") {
  AlgebraShape sh(2, 4);
  std::mt19937_64 rng(36);
  auto p = random_mixed_path<Q>(sh, rng, 8, false);
  const double T = p.horizon(), s = 1.5;
  CHECK(magnus_expansion(p, 0.0, T, 4) ==
        bch(magnus_expansion(p, 0.0, s, 4), magnus_expansion(p, s, T, 4)));
}

}
