#pragma once

#include <cstddef>
#include <vector>

namespace sifrian {

enum class LambdaMode { fixed, spectral_adaptive };

/// Per-layer state regularization for an n-layer network.
///
/// lambdas[i] weights the hidden activation x(i+1) for i = 0..n-2, i.e. the
/// output of layer i+1 in one-based numbering.  lambda_out scales the output
/// mismatch term.  The regularized single-pattern cost is
///
///   J = lambda_out/2 |d - x(n)|^2 + sum_{k<n} lambdas[k-1]/2 |x(k)|^2.
struct RegSchedule {
  std::vector<double> lambdas;
  double lambda_out = 1.0;
  double mu = 0.0;
  LambdaMode mode = LambdaMode::fixed;

  /// lambda = 0 everywhere, lambda_out = 1: plain least squares.
  static RegSchedule plain(std::size_t layers);
  static RegSchedule uniform(std::size_t layers, double lambda,
                             double lambda_out = 1.0);

  std::size_t layers() const noexcept { return lambdas.size() + 1; }

  /// Regularization of the activation feeding (zero-based) layer i, which is
  /// the lambda that enters that layer's Newton/MK weight.  Zero for the
  /// first layer, whose input is the fixed pattern.
  double input_lambda(std::size_t layer) const {
    return layer == 0 ? 0.0 : lambdas.at(layer - 1);
  }

  /// Diagonal entry of the regularization block for (zero-based) layer i.
  double state_lambda(std::size_t layer) const {
    return layer + 1 == layers() ? lambda_out : lambdas.at(layer);
  }
};

}  // namespace sifrian
