#include "sifrian/sifrian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "sifrian/errors.hpp"

namespace sifrian {

namespace {

void require_piecewise_linear(const NetworkParams& params) {
  for (std::size_t i = 0; i < params.layers(); ++i)
    if (!params.layer_activation(i).piecewise_linear())
      throw UnsupportedActivation(
          "the tetrad Hessian product needs a piecewise-linear activation, "
          "layer " + std::to_string(i + 1) + " uses " +
          params.layer_activation(i).name());
}

void require_shapes(const NetworkParams& params, const ForwardState& state,
                    const AdjointState& adj, const RegSchedule& sched) {
  const std::size_t n = params.layers();
  if (state.layers() != n || adj.adjoints.size() != n || sched.layers() != n)
    throw DimensionError("network, state, adjoint and schedule depths differ");
}

void require_cap(const NetworkParams& params, std::size_t cap) {
  if (params.parameter_count() > cap)
    throw CapExceeded(params.parameter_count(), cap);
}

// Offsets of each layer's block inside the stacked state and weight vectors.
struct Layout {
  std::vector<std::size_t> state_at;
  std::vector<std::size_t> weight_at;
  std::size_t states = 0;
  std::size_t weights = 0;
};

Layout layout_of(const NetworkParams& params) {
  Layout l;
  for (std::size_t i = 0; i < params.layers(); ++i) {
    l.state_at.push_back(l.states);
    l.weight_at.push_back(l.weights);
    l.states += params.sizes[i + 1];
    l.weights += params.sizes[i + 1] * params.sizes[i];
  }
  return l;
}

Matrix diagonal_inverse(const Matrix& diag) {
  Matrix out(diag.rows(), diag.cols());
  for (std::size_t i = 0; i < diag.rows(); ++i) out(i, i) = 1.0 / diag(i, i);
  return out;
}

// Places `block` into `m` with its top-left corner at (r0, c0).
void put(Matrix& m, std::size_t r0, std::size_t c0, const Matrix& block) {
  for (std::size_t i = 0; i < block.rows(); ++i)
    for (std::size_t j = 0; j < block.cols(); ++j) m(r0 + i, c0 + j) = block(i, j);
}

}  // namespace

TetradState tetrad(const NetworkParams& params, const ForwardState& state,
                   const AdjointState& adj, const Direction& dir,
                   const RegSchedule& sched) {
  require_piecewise_linear(params);
  require_shapes(params, state, adj, sched);
  const std::size_t n = params.layers();
  if (dir.layers() != n) throw DimensionError("direction depth differs");

  TetradState t;
  t.zeta.resize(n);
  t.gamma.resize(n);

  // zeta(k) = F'(a(k)) W(k) zeta(k-1) - F'(a(k)) (N(k) x(k-1) + eta(k))
  for (std::size_t i = 0; i < n; ++i) {
    Vector drive = matvec(dir.weights[i], state.layer_input(i));
    for (std::size_t r = 0; r < drive.size(); ++r) drive[r] += dir.biases[i][r];
    Vector z(drive.size());
    if (i > 0) z = matvec(params.weights[i], t.zeta[i - 1]);
    const Vector& d = state.derivs[i];
    for (std::size_t r = 0; r < z.size(); ++r) z[r] = d[r] * (z[r] - drive[r]);
    t.zeta[i] = std::move(z);
  }

  // gamma(n) = -lambda_n zeta(n);
  // gamma(k) = W(k+1)^T F'(a(k+1)) gamma(k+1) - lambda_k zeta(k)
  //            - N(k+1)^T F'(a(k+1)) b(k+1)
  t.gamma[n - 1] = scaled(t.zeta[n - 1], -sched.lambda_out);
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t k = i - 1;
    Vector g = matvec_transposed(params.weights[i],
                                 hadamard(state.derivs[i], t.gamma[i]));
    const Vector nb =
        matvec_transposed(dir.weights[i], scaled_adjoint(state, adj, i));
    const double lambda = sched.lambdas[k];
    for (std::size_t r = 0; r < g.size(); ++r)
      g[r] -= lambda * t.zeta[k][r] + nb[r];
    t.gamma[k] = std::move(g);
  }
  return t;
}

Direction hvp(const NetworkParams& params, const ForwardState& state,
              const AdjointState& adj, const Direction& dir,
              const RegSchedule& sched) {
  const TetradState t = tetrad(params, state, adj, dir, sched);
  Direction out;
  for (std::size_t i = 0; i < params.layers(); ++i) {
    Vector dg = hadamard(state.derivs[i], t.gamma[i]);
    Matrix w = outer(dg, state.layer_input(i));
    if (i > 0) {
      const Matrix coupling = outer(scaled_adjoint(state, adj, i), t.zeta[i - 1]);
      axpy(1.0, coupling.span(), w.span());
    }
    out.weights.push_back(std::move(w));
    out.biases.push_back(std::move(dg));
  }
  return out;
}

Matrix dense_hessian(const NetworkParams& params, const ForwardState& state,
                     const AdjointState& adj, const RegSchedule& sched,
                     std::size_t cap) {
  require_cap(params, cap);
  const std::size_t m = params.parameter_count();
  Matrix h(m, m);
  std::vector<double> basis(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    basis[j] = 1.0;
    const Direction col =
        hvp(params, state, adj, Direction::unflatten(params, basis), sched);
    basis[j] = 0.0;
    const std::vector<double> flat = col.flatten();
    for (std::size_t i = 0; i < m; ++i) h(i, j) = flat[i];
  }
  return h;
}

HessianBlocks hessian_blocks(const NetworkParams& params,
                             const ForwardState& state, const AdjointState& adj,
                             const RegSchedule& sched, std::size_t cap) {
  require_piecewise_linear(params);
  require_shapes(params, state, adj, sched);
  require_cap(params, cap);
  const Layout l = layout_of(params);
  HessianBlocks b;
  b.states = l.states;
  b.weights = l.weights;
  b.deriv = Matrix(l.states, l.states);
  b.backward = Matrix::identity(l.states);
  b.lambda = Matrix(l.states, l.states);
  b.forward_sens = Matrix(l.states, l.weights);
  b.adjoint_coupling = Matrix(l.weights, l.states);

  for (std::size_t i = 0; i < params.layers(); ++i) {
    const std::size_t rows = params.sizes[i + 1];
    const std::size_t cols = params.sizes[i];
    const std::size_t s0 = l.state_at[i];
    const std::size_t w0 = l.weight_at[i];
    const Vector& d = state.derivs[i];
    const Vector& xin = state.layer_input(i);
    for (std::size_t r = 0; r < rows; ++r) {
      b.deriv(s0 + r, s0 + r) = d[r];
      b.lambda(s0 + r, s0 + r) = sched.state_lambda(i);
      for (std::size_t c = 0; c < cols; ++c)
        b.forward_sens(s0 + r, w0 + r + c * rows) = d[r] * xin[c];
    }
    if (i == 0) continue;
    const std::size_t sp = l.state_at[i - 1];
    const Vector v = scaled_adjoint(state, adj, i);
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) {
        b.backward(s0 + r, sp + c) = -d[r] * params.weights[i](r, c);
        b.adjoint_coupling(w0 + r + c * rows, sp + c) = v[r];
      }
  }
  return b;
}

Matrix nilpotent_part(const HessianBlocks& blocks) {
  Matrix np = scaled(blocks.backward, -1.0);
  for (std::size_t i = 0; i < np.rows(); ++i) np(i, i) = 0.0;
  return np;
}

Matrix backward_operator_inverse(const HessianBlocks& blocks,
                                 std::size_t layers) {
  const Matrix np = nilpotent_part(blocks);
  Matrix sum = Matrix::identity(np.rows());
  Matrix power = Matrix::identity(np.rows());
  for (std::size_t i = 1; i < layers; ++i) {
    power = matmul(power, np);
    axpy(1.0, power.span(), sum.span());
  }
  return sum;
}

namespace {

void require_admissible(const RegSchedule& sched) {
  for (std::size_t i = 0; i < sched.layers(); ++i)
    if (sched.state_lambda(i) == 0.0)
      throw AdmissibilityError("regularization of layer " +
                               std::to_string(i + 1) +
                               " is zero; the KKT middle matrix is singular");
}

}  // namespace

Matrix block_hessian(const NetworkParams& params, const ForwardState& state,
                     const AdjointState& adj, const RegSchedule& sched,
                     std::size_t cap) {
  require_admissible(sched);
  const HessianBlocks b = hessian_blocks(params, state, adj, sched, cap);
  const std::size_t s = b.states;
  const std::size_t w = b.weights;
  const Matrix linv = backward_operator_inverse(b, params.layers());
  const Matrix linv_t = linv.transposed();

  // M^{-1} = [[-L^-T Lambda L^-1, L^-T], [L^-1, 0]]
  Matrix minv(2 * s, 2 * s);
  put(minv, 0, 0, scaled(matmul(matmul(linv_t, b.lambda), linv), -1.0));
  put(minv, 0, s, linv_t);
  put(minv, s, 0, linv);

  // P = [[F', 0], [X^T, B]]
  Matrix p(s + w, 2 * s);
  put(p, 0, 0, b.deriv);
  put(p, s, 0, b.forward_sens.transposed());
  put(p, s, s, b.adjoint_coupling);

  const Matrix h = scaled(matmul(matmul(p, minv), p.transposed()), -1.0);
  return block_to_parameter_order(h, params);
}

LdlFactors ldl_factors(const NetworkParams& params, const ForwardState& state,
                       const AdjointState& adj, const RegSchedule& sched,
                       std::size_t cap) {
  for (std::size_t i = 0; i < params.layers(); ++i)
    if (!params.layer_activation(i).strictly_monotone())
      throw UnsupportedActivation(
          "LDL factors need an invertible F'; layer " + std::to_string(i + 1) +
          " uses " + params.layer_activation(i).name());
  LdlFactors f;
  f.middle = assemble_middle_matrix(params, state, adj, sched, cap);
  const HessianBlocks b = hessian_blocks(params, state, adj, sched, cap);
  const std::size_t s = b.states;
  const std::size_t w = b.weights;

  // E = (X^T - B Lambda^-1 L^T) F'^-1
  const Matrix lambda_inv = diagonal_inverse(b.lambda);
  const Matrix coupled =
      matmul(matmul(b.adjoint_coupling, lambda_inv), b.backward.transposed());
  const Matrix e =
      matmul(subtract(b.forward_sens.transposed(), coupled), diagonal_inverse(b.deriv));
  f.lower = Matrix::identity(s + w);
  put(f.lower, s, 0, e);
  return f;
}

Matrix assemble_middle_matrix(const NetworkParams& params,
                              const ForwardState& state,
                              const AdjointState& adj,
                              const RegSchedule& sched, std::size_t cap) {
  require_admissible(sched);
  const HessianBlocks b = hessian_blocks(params, state, adj, sched, cap);
  const std::size_t s = b.states;
  const std::size_t w = b.weights;
  const Matrix linv = backward_operator_inverse(b, params.layers());

  const Matrix upper = matmul(
      matmul(matmul(matmul(b.deriv, linv.transposed()), b.lambda), linv),
      b.deriv);
  const Matrix lower = scaled(
      matmul(matmul(b.adjoint_coupling, diagonal_inverse(b.lambda)),
             b.adjoint_coupling.transposed()),
      -1.0);

  Matrix mid(s + w, s + w);
  put(mid, 0, 0, upper);
  put(mid, s, s, lower);
  return mid;
}

Matrix block_to_parameter_order(const Matrix& m, const NetworkParams& params) {
  const Layout l = layout_of(params);
  const std::size_t total = l.states + l.weights;
  if (m.rows() != total || m.cols() != total)
    throw DimensionError("matrix does not match the network's parameter count");
  // Parameter coordinate p maps to block coordinate perm(p).
  auto perm = [&](std::size_t p) {
    return p < l.weights ? l.states + p : p - l.weights;
  };
  Matrix out(total, total);
  for (std::size_t i = 0; i < total; ++i)
    for (std::size_t j = 0; j < total; ++j) out(i, j) = m(perm(i), perm(j));
  return out;
}

std::vector<double> SpectrumReport::multiset(std::size_t total) const {
  std::vector<double> out;
  for (const auto* family : {&family_a, &family_b})
    for (const SpectrumEntry& e : *family)
      out.insert(out.end(), e.multiplicity, e.eigenvalue);
  if (out.size() > total)
    throw DimensionError("spectrum has more eigenvalues than the matrix size");
  out.resize(total, 0.0);
  std::sort(out.begin(), out.end());
  return out;
}

SpectrumReport closed_form_spectrum(const ForwardState& state,
                                    const AdjointState& adj,
                                    const RegSchedule& sched) {
  const std::size_t n = state.layers();
  if (adj.adjoints.size() != n || sched.layers() != n)
    throw DimensionError("state, adjoint and schedule depths differ");
  require_admissible(sched);

  SpectrumReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = sched.state_lambda(i);
    std::map<double, std::size_t> groups;
    for (double d : state.derivs[i]) ++groups[lambda * d * d];
    for (const auto& [value, count] : groups)
      rep.family_a.push_back({i + 1, value, count});
    if (i == 0) continue;
    const double v2 = squared_norm(scaled_adjoint(state, adj, i));
    rep.family_b.push_back(
        {i + 1, -v2 / sched.lambdas[i - 1], state.layer_input(i).size()});
  }
  for (const auto* family : {&rep.family_a, &rep.family_b})
    for (const SpectrumEntry& e : *family)
      rep.radius = std::max(rep.radius, std::abs(e.eigenvalue));
  return rep;
}

}  // namespace sifrian
