#pragma once

#include "sigcum/gaussian.hpp"
#include "sigcum/models.hpp"
#include "sigcum/path.hpp"
#include "sigcum/volterra.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace sigcum {

// Level-one increments of one sampled path; event k starts at times[k] and lasts durations[k]
// (0 for a jump).
struct SampledPath {
  int dim = 1;
  std::vector<double> times;
  std::vector<double> durations;
  std::vector<double> increments;  // row-major, steps × dim
  std::vector<std::uint8_t> jump;
  double stop_time = 0.0;
  long clamps = 0;
  bool censored = false;

  std::size_t steps() const { return times.size(); }
  std::span<const double> increment(std::size_t k) const {
    return std::span<const double>(increments).subspan(k * static_cast<std::size_t>(dim),
                                                       static_cast<std::size_t>(dim));
  }
  void clear(int d);
  void push(double t, double dt, std::span<const double> dx, bool is_jump);
  // Replayable path with increments embedded at the given depth.
  CadlagPath<double> to_path(int depth, double origin = 0.0) const;
};

// Generator for path `index` of a run with master `seed`; streams do not depend on scheduling.
std::mt19937_64 path_rng(std::uint64_t seed, std::uint64_t index);

class PathSampler {
 public:
  virtual ~PathSampler() = default;
  virtual int dim() const = 0;
  virtual void sample(std::mt19937_64& rng, SampledPath& out) const = 0;
};

// Lower-triangular L with a = L L^T; zero pivots are allowed.
Matrix cholesky_psd(const Matrix& a, int d);

// dX = σ(t) dB on a uniform grid, σ evaluated at the left end of each step.
class BrownianSampler : public PathSampler {
 public:
  BrownianSampler(int d, MatrixFunction sigma, double T, int steps);
  static BrownianSampler standard(int d, double T, int steps);
  int dim() const override { return d_; }
  void sample(std::mt19937_64& rng, SampledPath& out) const override;

 private:
  int d_;
  MatrixFunction sigma_;
  double T_;
  int steps_;
};

// Drift, correlated diffusion and compound-Poisson jumps from a Lévy triplet with finite atomic jump
// measure; grid steps are split at jump times.
class LevySampler : public PathSampler {
 public:
  LevySampler(LevyTriplet k, double T, int steps);
  int dim() const override { return k_.d; }
  void sample(std::mt19937_64& rng, SampledPath& out) const override;

 private:
  LevyTriplet k_;
  double T_;
  int steps_;
  Matrix chol_;
  std::vector<double> drift_;
  double intensity_;
};

enum class ExitDetection { Grid, Bridge };

// Brownian motion from x stopped at the exit of D^n × R^{d-n}. Grid detection stops at the first grid
// point outside; Bridge also stops when the inter-step bridge crosses (probability exp(-2 δ_0 δ_1 / dt)
// with δ the distances to the sphere). The final point is projected radially onto the sphere.
class StoppedBrownianSampler : public PathSampler {
 public:
  StoppedBrownianSampler(int d, int n, std::vector<double> x, double dt, ExitDetection mode = ExitDetection::Bridge,
                         double max_time = 1e3);
  int dim() const override { return d_; }
  void sample(std::mt19937_64& rng, SampledPath& out) const override;

 private:
  int d_, n_;
  std::vector<double> x0_;
  double dt_;
  ExitDetection mode_;
  double max_time_;
};

// Euler scheme with full truncation for V^i_t = V^i_0 + ∫ K^i(t,s) √V^i_s dW^i_s; the emitted increments are
// those of X^i = ξ^i(T), i.e. K^i(T, t_j) √(V^i_j)^+ ΔW^i_j. Negative V values are counted as clamps.
class VolterraEulerSampler : public PathSampler {
 public:
  VolterraEulerSampler(VolterraSpec spec, double T, int steps);
  int dim() const override { return 2; }
  void sample(std::mt19937_64& rng, SampledPath& out) const override;

 private:
  VolterraSpec spec_;
  double T_;
  int steps_;
};

}  // namespace sigcum
