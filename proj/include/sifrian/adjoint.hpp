#pragma once

#include <vector>

#include "sifrian/network.hpp"
#include "sifrian/regularization.hpp"
#include "sifrian/tensor.hpp"

namespace sifrian {

/// Backpropagated adjoints b(k), one per layer, plus the output residual
/// d - x(n) they were seeded from.
struct AdjointState {
  std::vector<Vector> adjoints;
  Vector residual;
  bool regularized = false;
};

/// A per-layer (weight, bias) pair shaped like NetworkParams.  Holds
/// gradients (G, g) as well as update directions (N, eta).
struct Direction {
  std::vector<Matrix> weights;
  std::vector<Vector> biases;

  static Direction zeros_like(const NetworkParams& params);

  std::size_t layers() const noexcept { return weights.size(); }
  std::size_t size() const;

  /// Coordinates in (vec W(1), ..., vec W(n), beta(1), ..., beta(n)) order,
  /// where vec stacks columns.
  std::vector<double> flatten() const;
  /// Inverse of flatten for the shapes of `like`.
  static Direction unflatten(const NetworkParams& like,
                             std::span<const double> coords);

  bool operator==(const Direction&) const = default;
};

double dot(const Direction& a, const Direction& b);
double max_abs(const Direction& d);
Direction scaled(const Direction& d, double s);
Direction subtract(const Direction& a, const Direction& b);
Direction combine(double alpha, const Direction& a, double beta,
                  const Direction& b);

/// b(n) = lambda_out (d - x(n));
/// b(k-1) = W(k)^T F'(a(k)) b(k) - lambda_{k-1} x(k-1) for k-1 >= 1.
AdjointState backprop(const NetworkParams& params, const ForwardState& state,
                      const Vector& label, const RegSchedule& sched);

/// backprop with every lambda zero and lambda_out = 1.
AdjointState unregularized_adjoint(const NetworkParams& params,
                                   const ForwardState& state,
                                   const Vector& label);

/// G(k) = -F'(a(k)) b(k) x(k-1)^T, g(k) = -F'(a(k)) b(k).  Each G(k) is
/// computed as outer(g(k), x(k-1)).
Direction gradient(const ForwardState& state, const AdjointState& adj);

/// F'(a(k)) * b(k) for one layer.
Vector scaled_adjoint(const ForwardState& state, const AdjointState& adj,
                      std::size_t layer);

}  // namespace sifrian
