#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sifrian/adjoint.hpp"
#include "sifrian/network.hpp"
#include "sifrian/regularization.hpp"

namespace sifrian {

enum class DirectionKind { sgd, newton_exact, mk, mk_damped };

std::string to_string(DirectionKind kind);
DirectionKind parse_direction_kind(const std::string& name);

/// A layer counts as degenerate when |F'(a) * b| < kDegeneracyTol (1 + |b|).
inline constexpr double kDegeneracyTol = 1e-12;
/// Damping used for a step on which MK hits a degenerate layer.
inline constexpr double kFallbackMu = 1e-3;
/// Lower clamp of spectral lambdas.
inline constexpr double kLambdaFloor = 1e-8;

bool degenerate_layer(const ForwardState& state, const AdjointState& adj,
                      std::size_t layer);

/// Rank-one exact solution of H [N; eta] = [G; g] for the regularized cost
/// whose adjoint is `adj`:
///   N(k)   = -lambda_{k-1} F'(a(k)) b(k) x(k-1)^T / |F'(a(k)) b(k)|^2
///   eta(k) = -N(k) x(k-1) - 1_{k=n} F'(a(n))^{-1} (d - x(n))
/// The first layer has no regularized input, so N(1) = 0 and eta(1) = 0.
/// Throws DegenerateAdjoint naming the one-based layer, and
/// UnsupportedActivation if F'(a(n)) has a zero entry.
Direction newton_exact(const ForwardState& state, const AdjointState& adj,
                       const RegSchedule& sched);

/// Sign-corrected rank-one direction:
///   N(k)   = lambda_{k-1} G(k) / |g(k)|^2
///   eta(k) = (lambda_{k-1} |x(k-1)|^2 + 1_{k=n} lambda_n |d - x(n)|^2) g(k) / |g(k)|^2
/// Layers whose numerators both vanish get a zero update.  Throws
/// NearZeroGradient on a degenerate layer.
Direction mk_direction(const ForwardState& state, const AdjointState& adj,
                       const Direction& grad, const RegSchedule& sched);

/// mk_direction with each denominator |g|^2 replaced by mu * numerator + |g|^2,
/// using sched.mu.  Throws NearZeroGradient if mu == 0 and a layer with a
/// nonzero numerator is degenerate.
Direction mk_damped(const ForwardState& state, const AdjointState& adj,
                    const Direction& grad, const RegSchedule& sched);

/// lambda_k = |F'(a(k+1)) b(k+1)| / |F'(a(k))|_inf for hidden layers and
/// lambda_n = |b(n)| / |F'(a(n))|_inf, from the unregularized adjoint, each
/// clamped below at kLambdaFloor.
RegSchedule spectral_schedule(const ForwardState& state,
                              const AdjointState& unreg_adj);

/// theta - step * dir.  Throws NonFiniteError naming the layer if any updated
/// entry is not finite.
NetworkParams apply_step(const NetworkParams& params, const Direction& dir,
                         double step);

/// In-place apply_step.  Every updated entry is checked before any is
/// written, so `params` is untouched when NonFiniteError is thrown.
void apply_step_in_place(NetworkParams& params, const Direction& dir, double step);

/// One plain least-squares SGD update on a single pattern.
NetworkParams sgd_step(const NetworkParams& params, const ForwardState& state,
                       const Vector& label, double lr);

struct StepReport {
  DirectionKind kind = DirectionKind::sgd;
  /// <dir, grad> with grad the gradient of the cost the direction solves for.
  double inner_product = 0.0;
  /// Spectral radius bound of the middle matrix, spectral mode only.
  std::optional<double> hessian_radius;
  /// Plain least-squares cost of the pattern before and after the update.
  double cost_before = 0.0;
  /// Only filled when StepOptions::measure_after is set.
  std::optional<double> cost_after;
  /// Whether argmax of the output matched argmax of the label before the update.
  bool correct_before = false;
};

struct StepOptions {
  DirectionKind kind = DirectionKind::sgd;
  LambdaMode mode = LambdaMode::spectral_adaptive;
  /// Used in fixed mode (lambdas, lambda_out) and for mu in every mode.
  RegSchedule fixed;
  double lr = 0.01;
  /// Global multiplier on Newton/MK steps.
  double step_scale = 1.0;
  /// Run an extra forward pass to report the cost after the update.
  bool measure_after = true;
};

/// Computes the direction for one pattern and updates `params` in place.
/// On NonFiniteError from the update `params` is left unchanged.
/// MK falls back to mk_damped with mu = max(mu, kFallbackMu) on steps with a
/// degenerate layer; the report then carries kind mk_damped.
StepReport train_step(NetworkParams& params, const Vector& input,
                      const Vector& label, const StepOptions& opt);

}  // namespace sifrian
