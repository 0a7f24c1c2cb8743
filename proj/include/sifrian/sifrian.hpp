#pragma once

// Second-order machinery for a single pattern with piecewise-linear
// activations: the tetrad Hessian-vector product, dense Hessian assembly,
// the block (KKT) form of the Hessian and its LDL factorization, and the
// closed-form eigenvalue families of the LDL middle matrix.

#include <cstddef>
#include <vector>

#include "sifrian/adjoint.hpp"
#include "sifrian/network.hpp"
#include "sifrian/regularization.hpp"
#include "sifrian/tensor.hpp"

namespace sifrian {

inline constexpr std::size_t kDefaultDenseCap = 200;

/// Second-order adjoints of the tetrad system.  zeta is the negated forward
/// perturbation of the states, gamma the negated perturbation of the
/// first-order adjoints.
struct TetradState {
  std::vector<Vector> gamma;
  std::vector<Vector> zeta;
};

/// Runs the tetrad passes for a preselected direction {N, eta}:
/// forward for zeta, then backward for gamma.
TetradState tetrad(const NetworkParams& params, const ForwardState& state,
                   const AdjointState& adj, const Direction& dir,
                   const RegSchedule& sched);

/// H [N; eta] of the regularized cost, assembled from the tetrad:
///   (H N)(k)   = F'(a(k)) gamma(k) x(k-1)^T + F'(a(k)) b(k) zeta(k-1)^T
///   (H eta)(k) = F'(a(k)) gamma(k)
/// Throws UnsupportedActivation for activations with a non-zero second
/// derivative.
Direction hvp(const NetworkParams& params, const ForwardState& state,
              const AdjointState& adj, const Direction& dir,
              const RegSchedule& sched);

/// Hessian over (vec W, beta) coordinates, one hvp per basis direction.
Matrix dense_hessian(const NetworkParams& params, const ForwardState& state,
                     const AdjointState& adj, const RegSchedule& sched,
                     std::size_t cap = kDefaultDenseCap);

/// Dense blocks of the KKT form, in the ordering used by the block algebra:
/// states concatenate x(1)..x(n); weights concatenate vec W(1)..vec W(n).
struct HessianBlocks {
  std::size_t states = 0;   // sum_k d_k
  std::size_t weights = 0;  // sum_k d_k d_{k-1}
  Matrix deriv;             // states x states, diag F'(a)
  Matrix backward;          // states x states, I - Np
  Matrix lambda;            // states x states, diag lambda_k
  Matrix forward_sens;      // states x weights, blockdiag x(k-1)^T (x) F'(a(k))
  Matrix adjoint_coupling;  // weights x states, sub-diagonal I (x) F'(a(k)) b(k)
};

HessianBlocks hessian_blocks(const NetworkParams& params,
                             const ForwardState& state, const AdjointState& adj,
                             const RegSchedule& sched,
                             std::size_t cap = kDefaultDenseCap);

/// (I - Np)^{-1} = sum_{i<n} Np^i.
Matrix backward_operator_inverse(const HessianBlocks& blocks,
                                 std::size_t layers);

/// Np itself (strictly lower block-triangular part of the backward operator).
Matrix nilpotent_part(const HessianBlocks& blocks);

/// H = -P M^{-1} P^T, returned in the same (vec W, beta) order as
/// dense_hessian.
Matrix block_hessian(const NetworkParams& params, const ForwardState& state,
                     const AdjointState& adj, const RegSchedule& sched,
                     std::size_t cap = kDefaultDenseCap);

/// H = Q * middle * Q^T in the block ordering (beta first, then vec W).
struct LdlFactors {
  Matrix lower;   // Q, unit lower block-triangular
  Matrix middle;  // blockdiag(F' L^-T Lambda L^-1 F', -B Lambda^-1 B^T)
};

LdlFactors ldl_factors(const NetworkParams& params, const ForwardState& state,
                       const AdjointState& adj, const RegSchedule& sched,
                       std::size_t cap = kDefaultDenseCap);

/// The middle matrix of the block LDL factorization, built from the block
/// definitions with the nilpotent series for (I - Np)^{-1}.
Matrix assemble_middle_matrix(const NetworkParams& params,
                              const ForwardState& state,
                              const AdjointState& adj,
                              const RegSchedule& sched,
                              std::size_t cap = kDefaultDenseCap);

/// Reorders a matrix from block ordering (beta, vec W) to parameter
/// ordering (vec W, beta).
Matrix block_to_parameter_order(const Matrix& m, const NetworkParams& params);

struct SpectrumEntry {
  std::size_t layer = 0;  // one-based layer k
  double eigenvalue = 0.0;
  std::size_t multiplicity = 0;
};

struct SpectrumReport {
  /// lambda_k F'(a(k))_i^2, grouped by equal value within a layer.
  std::vector<SpectrumEntry> family_a;
  /// -|F'(a(k)) b(k)|^2 / lambda_{k-1}, multiplicity d_{k-1}, k = 2..n.
  std::vector<SpectrumEntry> family_b;
  double radius = 0.0;

  /// Both families expanded by multiplicity and padded with zeros to `total`
  /// entries, sorted ascending.
  std::vector<double> multiset(std::size_t total) const;
};

/// Throws AdmissibilityError if any lambda (hidden or output) is zero.
SpectrumReport closed_form_spectrum(const ForwardState& state,
                                    const AdjointState& adj,
                                    const RegSchedule& sched);

}  // namespace sifrian
