#include "sigcum/samplers.hpp"

#include <algorithm>
#include <cmath>

namespace sigcum {

void SampledPath::clear(int d) {
  dim = d;
  times.clear();
  durations.clear();
  increments.clear();
  jump.clear();
  stop_time = 0.0;
  clamps = 0;
  censored = false;
}

void SampledPath::push(double t, double dt, std::span<const double> dx, bool is_jump) {
  times.push_back(t);
  durations.push_back(dt);
  increments.insert(increments.end(), dx.begin(), dx.end());
  jump.push_back(is_jump ? 1 : 0);
}

CadlagPath<double> SampledPath::to_path(int depth, double origin) const {
  const AlgebraShape sh(dim, depth);
  CadlagPath<double> p(sh, origin);
  for (std::size_t k = 0; k < steps(); ++k) {
    Tensor<double> v(sh);
    if (depth >= 1) std::ranges::copy(increment(k), v.level(1).begin());
    if (jump[k])
      p.add_jump(times[k], std::move(v));
    else
      p.add_linear(times[k], durations[k], std::move(v));
  }
  return p;
}

std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

Matrix cholesky_psd(const Matrix& a, int d) {
  check_covariance(a, d);
  const auto n = static_cast<std::size_t>(d);
  Matrix l(n * n, 0.0);
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  const double eps = 1e-14 * std::max(1.0, scale);
  for (std::size_t j = 0; j < n; ++j) {
    double s = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) s -= l[j * n + k] * l[j * n + k];
    if (s <= eps) continue;  // zero pivot: column stays 0
    const double p = std::sqrt(s);
    l[j * n + j] = p;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = v / p;
    }
  }
  return l;
}

namespace {

void check_grid(double T, int steps) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("sampler horizon must be positive");
  if (steps < 1) throw DomainError("sampler needs at least one step");
}

}  // namespace

BrownianSampler::BrownianSampler(int d, MatrixFunction sigma, double T, int steps)
    : d_(d), sigma_(std::move(sigma)), T_(T), steps_(steps) {
  if (d < 1) throw DomainError("sampler dimension must be positive");
  if (!sigma_) throw DomainError("volatility must be callable");
  check_grid(T, steps);
}

BrownianSampler BrownianSampler::standard(int d, double T, int steps) {
  Matrix id(static_cast<std::size_t>(d * d), 0.0);
  for (int i = 0; i < d; ++i) id[static_cast<std::size_t>(i * d + i)] = 1.0;
  return BrownianSampler(d, [id](double) { return id; }, T, steps);
}

void BrownianSampler::sample(std::mt19937_64& rng, SampledPath& out) const {
  out.clear(d_);
  std::normal_distribution<double> normal;
  const auto n = static_cast<std::size_t>(d_);
  const double dt = T_ / steps_, sq = std::sqrt(dt);
  std::vector<double> z(n), dx(n);
  for (int k = 0; k < steps_; ++k) {
    const double t = k * dt;
    const Matrix s = sigma_(t);
    if (s.size() != n * n) throw ShapeError("volatility must be a d x d matrix");
    for (auto& v : z) v = normal(rng) * sq;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += s[i * n + j] * z[j];
      dx[i] = acc;
    }
    out.push(t, dt, dx, false);
  }
  out.stop_time = T_;
}

LevySampler::LevySampler(LevyTriplet k, double T, int steps) : k_(std::move(k)), T_(T), steps_(steps) {
  k_.validate();
  check_grid(T, steps);
  chol_ = cholesky_psd(k_.a, k_.d);
  drift_ = k_.b;
  for (const auto& j : k_.jumps) {
    double r2 = 0.0;
    for (double x : j.point) r2 += x * x;
    if (r2 <= 1.0)
      for (std::size_t i = 0; i < drift_.size(); ++i) drift_[i] -= j.weight * j.point[i];
  }
  intensity_ = k_.total_intensity();
}

void LevySampler::sample(std::mt19937_64& rng, SampledPath& out) const {
  const int d = k_.d;
  const auto n = static_cast<std::size_t>(d);
  out.clear(d);
  std::vector<double> jt;
  std::vector<std::size_t> marks;
  if (intensity_ > 0.0) {
    std::poisson_distribution<long> count(intensity_ * T_);
    std::uniform_real_distribution<double> when(0.0, T_);
    std::vector<double> w;
    for (const auto& j : k_.jumps) w.push_back(j.weight);
    std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
    const long m = count(rng);
    for (long i = 0; i < m; ++i) jt.push_back(when(rng));
    std::sort(jt.begin(), jt.end());
    for (long i = 0; i < m; ++i) marks.push_back(pick(rng));
  }

  std::normal_distribution<double> normal;
  std::vector<double> z(n), dx(n);
  auto diffuse = [&](double t0, double t1) {
    const double h = t1 - t0;
    if (!(h > 0.0)) return;
    const double sq = std::sqrt(h);
    for (auto& v : z) v = normal(rng) * sq;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = drift_[i] * h;
      for (std::size_t j = 0; j <= i; ++j) acc += chol_[i * n + j] * z[j];
      dx[i] = acc;
    }
    out.push(t0, h, dx, false);
  };

  const double dt = T_ / steps_;
  std::size_t next = 0;
  double t = 0.0;
  for (int k = 1; k <= steps_; ++k) {
    const double grid = k == steps_ ? T_ : k * dt;
    while (next < jt.size() && jt[next] <= grid) {
      diffuse(t, jt[next]);
      t = jt[next];
      out.push(t, 0.0, k_.jumps[marks[next]].point, true);
      ++next;
    }
    diffuse(t, grid);
    t = grid;
  }
  out.stop_time = T_;
}

StoppedBrownianSampler::StoppedBrownianSampler(int d, int n, std::vector<double> x, double dt, ExitDetection mode,
                                               double max_time)
    : d_(d), n_(n), x0_(std::move(x)), dt_(dt), mode_(mode), max_time_(max_time) {
  if (d < 1 || n < 1 || n > d) throw DomainError("stopped Brownian motion needs 1 <= n <= d");
  if (static_cast<int>(x0_.size()) != d) throw DomainError("start point must have d coordinates");
  unit_ball_exit_time(n, x0_);  // validates the start point
  if (!(dt > 0.0) || !(max_time > dt)) throw DomainError("stopped Brownian motion needs 0 < dt < max_time");
}

void StoppedBrownianSampler::sample(std::mt19937_64& rng, SampledPath& out) const {
  out.clear(d_);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif;
  const auto d = static_cast<std::size_t>(d_), n = static_cast<std::size_t>(n_);
  const double sq = std::sqrt(dt_);
  std::vector<double> y = x0_, y1(d), dx(d);
  auto radius = [&](const std::vector<double>& p) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) r2 += p[i] * p[i];
    return std::sqrt(r2);
  };
  double r0 = radius(y), t = 0.0;
  while (true) {
    for (std::size_t i = 0; i < d; ++i) y1[i] = y[i] + normal(rng) * sq;
    const double r1 = radius(y1);
    bool exited = r1 >= 1.0;
    if (!exited && mode_ == ExitDetection::Bridge)
      exited = unif(rng) < std::exp(-2.0 * (1.0 - r0) * (1.0 - r1) / dt_);
    if (exited && r1 > 0.0)
      for (std::size_t i = 0; i < n; ++i) y1[i] /= r1;
    for (std::size_t i = 0; i < d; ++i) dx[i] = y1[i] - y[i];
    out.push(t, dt_, dx, false);
    t += dt_;
    y.swap(y1);
    r0 = exited ? 1.0 : r1;
    if (exited) break;
    if (t >= max_time_) {
      out.censored = true;
      break;
    }
  }
  out.stop_time = t;
}

VolterraEulerSampler::VolterraEulerSampler(VolterraSpec spec, double T, int steps)
    : spec_(std::move(spec)), T_(T), steps_(steps) {
  spec_.validate();
  check_grid(T, steps);
}

void VolterraEulerSampler::sample(std::mt19937_64& rng, SampledPath& out) const {
  out.clear(2);
  std::normal_distribution<double> normal;
  const double dt = T_ / steps_, sq = std::sqrt(dt);
  using Kind = VolterraKernel::Kind;
  struct State {
    double v = 0.0, s = 0.0;
    std::vector<double> z;  // √V^+ ΔW history for general kernels
  };
  std::array<State, 2> st;
  for (std::size_t i = 0; i < 2; ++i) {
    st[i].v = spec_.v0[i];
    if (spec_.kernel[i].kind() != Kind::Constant && spec_.kernel[i].kind() != Kind::Exponential)
      st[i].z.reserve(static_cast<std::size_t>(steps_));
  }
  std::array<double, 2> dx{};
  for (int k = 0; k < steps_; ++k) {
    const double t = k * dt, t1 = (k + 1) * dt;
    for (std::size_t i = 0; i < 2; ++i) {
      const auto& K = spec_.kernel[i];
      auto& s = st[i];
      if (s.v < 0.0) ++out.clamps;
      const double zi = std::sqrt(std::max(s.v, 0.0)) * normal(rng) * sq;
      dx[i] = K(T_, t) * zi;
      switch (K.kind()) {
        case Kind::Constant:
          s.s += zi;
          s.v = spec_.v0[i] + K.scale() * s.s;
          break;
        case Kind::Exponential:
          s.s = std::exp(-K.rate() * dt) * (s.s + K.scale() * zi);
          s.v = spec_.v0[i] + s.s;
          break;
        default: {
          s.z.push_back(zi);
          double acc = 0.0;
          for (std::size_t j = 0; j < s.z.size(); ++j) acc += K(t1, static_cast<double>(j) * dt) * s.z[j];
          s.v = spec_.v0[i] + acc;
        }
      }
    }
    out.push(t, dt, dx, false);
  }
  out.stop_time = T_;
}

}  // namespace sigcum
