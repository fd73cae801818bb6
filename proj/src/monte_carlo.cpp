#include "sigcum/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <thread>

namespace sigcum {

namespace {

// Running mean and co-moment matrix (Welford within a block, Chan across blocks).
struct Moments {
  std::size_t n = 0;
  std::vector<double> mean, m2;
  double tau = 0.0, tau_m2 = 0.0;
  long clamps = 0, censored = 0;

  explicit Moments(std::size_t p) : mean(p, 0.0), m2(p * p, 0.0) {}

  void add(std::span<const double> x, double t) {
    const std::size_t p = mean.size();
    ++n;
    const double inv = 1.0 / static_cast<double>(n);
    std::vector<double> before(p);
    for (std::size_t i = 0; i < p; ++i) {
      before[i] = x[i] - mean[i];
      mean[i] += before[i] * inv;
    }
    for (std::size_t i = 0; i < p; ++i) {
      const double a = before[i];
      if (a == 0.0) continue;
      double* row = m2.data() + i * p;
      for (std::size_t j = 0; j < p; ++j) row[j] += a * (x[j] - mean[j]);
    }
    const double dt = t - tau;
    tau += dt * inv;
    tau_m2 += dt * (t - tau);
  }

  void merge(const Moments& o) {
    if (o.n == 0) return;
    const std::size_t p = mean.size();
    const double na = static_cast<double>(n), nb = static_cast<double>(o.n), nt = na + nb;
    std::vector<double> delta(p);
    for (std::size_t i = 0; i < p; ++i) delta[i] = o.mean[i] - mean[i];
    const double f = na * nb / nt;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < p; ++j) m2[i * p + j] += o.m2[i * p + j] + delta[i] * delta[j] * f;
    for (std::size_t i = 0; i < p; ++i) mean[i] += delta[i] * nb / nt;
    const double dtau = o.tau - tau;
    tau_m2 += o.tau_m2 + dtau * dtau * f;
    tau += dtau * nb / nt;
    n += o.n;
    clamps += o.clamps;
    censored += o.censored;
  }
};

}  // namespace

std::vector<double> log_jacobian(const Tensor<double>& m) {
  const AlgebraShape& sh = m.shape();
  const std::size_t p = sh.size() - 1;
  const int depth = sh.depth();
  Tensor<double> x = m;
  x.scalar() = 0.0;
  std::vector<Tensor<double>> pw{Tensor<double>::unit(sh), x};
  for (int k = 2; k < depth; ++k) pw.push_back(concat_mul(pw.back(), x));
  std::vector<double> jac(p * p, 0.0);
  for (std::size_t u = 0; u < p; ++u) {
    Tensor<double> delta(sh);
    delta[u + 1] = 1.0;
    Tensor<double> dk = delta, total = delta;
    for (int k = 2; k <= depth; ++k) {
      dk = concat_mul(dk, x) + concat_mul(pw[static_cast<std::size_t>(k - 1)], delta);
      total.add_scaled(dk, (k % 2 == 0 ? -1.0 : 1.0) / k);
    }
    for (std::size_t w = 0; w < p; ++w) jac[w * p + u] = total[w + 1];
  }
  return jac;
}

McResult mc_expected_signature(const PathSampler& sampler, const AlgebraShape& shape, const McOptions& opts) {
  if (opts.paths == 0) throw DomainError("Monte Carlo needs at least one path");
  if (shape.dim() != sampler.dim()) throw ShapeError("sampler dimension does not match the algebra");
  const std::size_t p = shape.size() - 1;
  const std::size_t block = std::max<std::size_t>(1, opts.block);
  const std::size_t blocks = (opts.paths + block - 1) / block;
  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));

  Moments total(p);
  std::map<std::size_t, Moments> pending;
  std::size_t next_merge = 0;
  std::mutex mu;
  std::atomic<std::size_t> next_block{0};
  std::exception_ptr failure;

  auto worker = [&] {
    SampledPath path;
    Tensor<double> sig(shape);
    try {
      for (std::size_t b = next_block++; b < blocks; b = next_block++) {
        Moments acc(p);
        const std::size_t lo = b * block, hi = std::min(opts.paths, lo + block);
        for (std::size_t i = lo; i < hi; ++i) {
          auto rng = path_rng(opts.seed, i);
          sampler.sample(rng, path);
          std::fill(sig.data().begin(), sig.data().end(), 0.0);
          sig.scalar() = 1.0;
          for (std::size_t k = 0; k < path.steps(); ++k) mul_exp_level_one<double>(sig, path.increment(k));
          acc.add(sig.data().subspan(1), path.stop_time);
          acc.clamps += path.clamps;
          acc.censored += path.censored ? 1 : 0;
        }
        std::lock_guard lock(mu);
        pending.emplace(b, std::move(acc));
        for (auto it = pending.find(next_merge); it != pending.end(); it = pending.find(next_merge)) {
          total.merge(it->second);
          pending.erase(it);
          ++next_merge;
        }
      }
    } catch (...) {
      std::lock_guard lock(mu);
      if (!failure) failure = std::current_exception();
      next_block = blocks;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  const double n = static_cast<double>(total.n);
  const double var_scale = total.n > 1 ? 1.0 / ((n - 1.0) * n) : 0.0;
  McResult r{Tensor<double>::unit(shape), Tensor<double>(shape), Tensor<double>(shape), Tensor<double>(shape)};
  for (std::size_t u = 0; u < p; ++u) {
    r.mean[u + 1] = total.mean[u];
    r.stderr_[u + 1] = std::sqrt(std::max(0.0, total.m2[u * p + u] * var_scale));
  }
  r.log_mean = log_trunc(r.mean);
  const auto jac = log_jacobian(r.mean);
  for (std::size_t w = 0; w < p; ++w) {
    double v = 0.0;
    for (std::size_t a = 0; a < p; ++a) {
      const double ja = jac[w * p + a];
      if (ja == 0.0) continue;
      for (std::size_t b = 0; b < p; ++b) v += ja * total.m2[a * p + b] * jac[w * p + b];
    }
    r.log_stderr[w + 1] = std::sqrt(std::max(0.0, v * var_scale));
  }
  r.stop_time = total.tau;
  r.stop_time_stderr = total.n > 1 ? std::sqrt(total.tau_m2 / ((n - 1.0) * n)) : 0.0;
  r.clamps = total.clamps;
  r.censored = total.censored;
  r.paths = total.n;
  r.seed = opts.seed;
  return r;
}

}  // namespace sigcum
