#pragma once

#include "sigcum/path.hpp"
#include "sigcum/tensor.hpp"

#include <span>
#include <vector>

namespace sigcum {

// Signature of a constant-rate segment with increment x.
template <class S>
Tensor<S> sig_segment(const Tensor<S>& x) {
  return exp_trunc(x);
}

// Ordered product of exp(increment) over the atoms of (s, t].
template <class S>
Tensor<S> sig_path(const CadlagPath<S>& path, double s, double t) {
  Tensor<S> r = Tensor<S>::unit(path.shape());
  for (const auto& atom : path.atoms(s, t)) r = concat_mul(r, exp_trunc(atom.value));
  return r;
}

template <class S>
Tensor<S> sig_path(const CadlagPath<S>& path) {
  return sig_path(path, path.origin(), path.horizon());
}

template <class S>
Tensor<S> log_signature(const CadlagPath<S>& path, double s, double t) {
  return log_trunc(sig_path(path, s, t));
}

template <class S>
Tensor<S> log_signature(const CadlagPath<S>& path) {
  return log_signature(path, path.origin(), path.horizon());
}

// Signature of the piecewise-linear interpolation of sampled level-one increments.
inline Tensor<double> sampled_brownian_signature(const std::vector<std::vector<double>>& increments,
                                                 const AlgebraShape& shape) {
  Tensor<double> s = Tensor<double>::unit(shape);
  for (const auto& v : increments) mul_exp_level_one<double>(s, v);
  return s;
}

}  // namespace sigcum
