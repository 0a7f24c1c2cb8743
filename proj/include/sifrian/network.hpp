#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sifrian/regularization.hpp"
#include "sifrian/tensor.hpp"

namespace sifrian {

enum class ActivationKind { leaky_relu, relu, sigmoid, tanh, identity };

struct Activation {
  ActivationKind kind = ActivationKind::leaky_relu;
  double slope = 0.01;  // leaky-relu negative-branch slope

  static Activation leaky_relu(double slope = 0.01);
  static Activation relu() { return {ActivationKind::relu, 0.0}; }
  static Activation sigmoid() { return {ActivationKind::sigmoid, 0.0}; }
  static Activation tanh() { return {ActivationKind::tanh, 0.0}; }
  static Activation identity() { return {ActivationKind::identity, 0.0}; }

  double value(double a) const;
  /// Derivative; at a == 0 the piecewise-linear kinds return the
  /// positive-branch value.
  double derivative(double a) const;

  /// Second derivative vanishes almost everywhere.
  bool piecewise_linear() const;
  /// Derivative is strictly positive everywhere, so F'(a) is invertible.
  bool strictly_monotone() const;

  std::string name() const;
  static Activation parse(const std::string& name, double slope);

  bool operator==(const Activation&) const = default;
};

/// Weights and biases of a feed-forward network.  Layers are zero-based in
/// code: weights[i] maps x(i) (size sizes[i]) to a(i+1) (size sizes[i+1]).
struct NetworkParams {
  std::vector<std::size_t> sizes;
  std::vector<Matrix> weights;
  std::vector<Vector> biases;
  Activation activation;
  /// Number of leading white layers: identity-initialized, trainable, with
  /// a linear activation.
  std::size_t white_layers = 0;

  std::size_t layers() const noexcept { return weights.size(); }
  std::size_t parameter_count() const;
  const Activation& layer_activation(std::size_t layer) const;
  /// Throws DimensionError if shapes do not chain.
  void validate() const;

  bool operator==(const NetworkParams&) const = default;
};

/// Pre-activations and activations of one pattern.  acts[i] is x(i+1).
struct ForwardState {
  Vector input;
  std::vector<Vector> preacts;
  std::vector<Vector> acts;
  /// F'(preacts[i]) per layer, stored so later passes share one tie-break.
  std::vector<Vector> derivs;

  std::size_t layers() const noexcept { return preacts.size(); }
  const Vector& layer_input(std::size_t layer) const {
    return layer == 0 ? input : acts[layer - 1];
  }
  const Vector& output() const { return acts.back(); }

  bool operator==(const ForwardState&) const = default;
};

enum class InitScheme { glorot_uniform };

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases uniform in
/// +-0.01.  Deterministic for a given seed.
NetworkParams init(const std::vector<std::size_t>& sizes,
                   const Activation& activation, std::uint64_t seed,
                   InitScheme scheme = InitScheme::glorot_uniform);

/// Prepends an identity layer (I, 0) of width sizes[0] with a linear
/// activation, so the network function is unchanged.
NetworkParams add_white_layer(const NetworkParams& params);

ForwardState forward(const NetworkParams& params, const Vector& input);

/// Output vector only, without storing intermediate state.
Vector predict(const NetworkParams& params, const Vector& input);

/// lambda_out/2 |d - x(n)|^2 + sum_k lambda_k/2 |x(k)|^2.
double cost(const ForwardState& state, const Vector& label,
            const RegSchedule& sched);

/// Plain least-squares cost 1/2 |d - x(n)|^2.
double plain_cost(const ForwardState& state, const Vector& label);

}  // namespace sifrian
