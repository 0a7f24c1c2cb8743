#pragma once

#include <stdexcept>
#include <string>

namespace sifrian {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// A layer's backpropagated adjoint vanished, so the rank-one Newton
/// weight is undefined there.
class DegenerateAdjoint : public Error {
 public:
  DegenerateAdjoint(std::size_t layer, double norm)
      : Error("degenerate adjoint at layer " + std::to_string(layer) +
              " (|F'(a) * b| = " + std::to_string(norm) + ")"),
        layer_(layer) {}
  std::size_t layer() const noexcept { return layer_; }

 private:
  std::size_t layer_;
};

/// Undamped MK direction requested where a layer's bias gradient is ~0.
class NearZeroGradient : public Error {
 public:
  NearZeroGradient(std::size_t layer, double norm)
      : Error("near-zero gradient at layer " + std::to_string(layer) +
              " (|g| = " + std::to_string(norm) + "); use damping"),
        layer_(layer) {}
  std::size_t layer() const noexcept { return layer_; }

 private:
  std::size_t layer_;
};

/// A regularization weight is zero, so the KKT middle matrix is singular.
class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

class UnsupportedActivation : public Error {
 public:
  using Error::Error;
};

/// Dense oracle requested on a network larger than the configured cap.
class CapExceeded : public Error {
 public:
  CapExceeded(std::size_t count, std::size_t cap)
      : Error("parameter count " + std::to_string(count) +
              " exceeds dense cap " + std::to_string(cap)),
        count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace sifrian
