#pragma once

// Finite-difference references for the analytic derivatives, and a sampler
// for random instances that stay clear of activation kinks.

#include <cstdint>
#include <vector>

#include "sifrian/adjoint.hpp"
#include "sifrian/network.hpp"
#include "sifrian/regularization.hpp"
#include "sifrian/sifrian.hpp"

namespace sifrian {

inline constexpr double kFdGradientStep = 1e-5;
inline constexpr double kFdHessianStep = 1e-4;

/// Regularized cost of one pattern at `params`.
double pattern_cost(const NetworkParams& params, const Vector& input,
                    const Vector& label, const RegSchedule& sched);

/// Analytic gradient of the regularized cost of one pattern.
Direction pattern_gradient(const NetworkParams& params, const Vector& input,
                           const Vector& label, const RegSchedule& sched);

/// Parameters as a flat (vec W, beta) vector, and back.
std::vector<double> flatten_params(const NetworkParams& params);
NetworkParams with_coords(const NetworkParams& like,
                          const std::vector<double>& coords);

/// Central differences of the cost, one coordinate at a time.
Direction fd_gradient(const NetworkParams& params, const Vector& input,
                      const Vector& label, const RegSchedule& sched,
                      double step = kFdGradientStep);

/// (grad(theta + eps d) - grad(theta - eps d)) / 2 eps with analytic gradients.
Direction fd_hessian_vector(const NetworkParams& params, const Vector& input,
                            const Vector& label, const RegSchedule& sched,
                            const Direction& dir, double step = kFdHessianStep);

/// Second central differences of the cost, entrywise.
Matrix fd_hessian(const NetworkParams& params, const Vector& input,
                  const Vector& label, const RegSchedule& sched,
                  double step = kFdHessianStep,
                  std::size_t cap = kDefaultDenseCap);

struct Sample {
  NetworkParams params;
  Vector input;
  Vector label;
  std::size_t attempts = 0;
};

struct SampleOptions {
  Activation activation = Activation::leaky_relu(0.1);
  std::size_t white_layers = 0;
  /// Hidden-layer lambda used for the adjoint margin check.  Zero checks the
  /// plain adjoint.
  double lambda = 0.0;
  std::size_t max_attempts = 1000;
};

/// Draws init(sizes) weights, an input in [-1, 1] and a label in [0, 1]
/// until every kinked pre-activation has |a| > margin and every layer has
/// |F'(a) * b| > margin * 1e-3.  Deterministic in `seed`; throws
/// SamplingError when the attempt budget runs out.
Sample kink_safe_sample(const std::vector<std::size_t>& sizes,
                        std::uint64_t seed, double margin,
                        const SampleOptions& opt = {});

/// Layer sizes with 2..max_layers+1 entries, each in 1..max_width, drawn
/// from `seed`.
std::vector<std::size_t> random_tiny_sizes(std::uint64_t seed,
                                           std::size_t max_layers = 3,
                                           std::size_t max_width = 4);

/// Per-layer lambdas drawn uniformly from [lo, hi].
RegSchedule random_schedule(std::size_t layers, std::uint64_t seed,
                            double lo = 0.25, double hi = 2.0);

/// The margin test kink_safe_sample applies.
bool satisfies_margin(const Sample& s, double margin, double lambda);

}  // namespace sifrian
