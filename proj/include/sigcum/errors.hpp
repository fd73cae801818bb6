#pragma once

#include <stdexcept>
#include <string>

namespace sigcum {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible algebra shapes, bad levels or words.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A value outside the domain of an operation (scalar slot, probabilities, times).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed external input (JSON, JSONL, model files).
class InputError : public Error {
 public:
  using Error::Error;
};

// Memory guard exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// Step or panel refinement failed to reach the tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace sigcum
