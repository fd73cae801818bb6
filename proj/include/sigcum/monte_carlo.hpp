#pragma once

#include "sigcum/samplers.hpp"
#include "sigcum/tensor.hpp"

#include <cstdint>

namespace sigcum {

struct McOptions {
  std::size_t paths = 10000;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
  std::size_t block = 1024;
};

struct McResult {
  Tensor<double> mean;
  Tensor<double> stderr_;
  // log(mean) with delta-method standard errors.
  Tensor<double> log_mean;
  Tensor<double> log_stderr;
  double stop_time = 0.0;
  double stop_time_stderr = 0.0;
  long clamps = 0;
  long censored = 0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
};

// Mean of per-path signatures. Paths are grouped in fixed blocks merged in index order, so the result is
// independent of the thread count.
McResult mc_expected_signature(const PathSampler& sampler, const AlgebraShape& shape, const McOptions& opts);

// Row-major J with J(w, u) = ∂ log(m)_w / ∂ m_u over the non-scalar coefficients of m.
std::vector<double> log_jacobian(const Tensor<double>& m);

}  // namespace sigcum
