#include "sifrian/adjoint.hpp"

#include <algorithm>
#include <string>

#include "sifrian/errors.hpp"

namespace sifrian {

Direction Direction::zeros_like(const NetworkParams& params) {
  Direction d;
  for (std::size_t i = 0; i < params.layers(); ++i) {
    d.weights.emplace_back(params.weights[i].rows(), params.weights[i].cols());
    d.biases.emplace_back(params.biases[i].size());
  }
  return d;
}

std::size_t Direction::size() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    n += weights[i].size() + biases[i].size();
  return n;
}

std::vector<double> Direction::flatten() const {
  std::vector<double> out;
  out.reserve(size());
  for (const Matrix& w : weights)
    for (std::size_t c = 0; c < w.cols(); ++c)
      for (std::size_t r = 0; r < w.rows(); ++r) out.push_back(w(r, c));
  for (const Vector& b : biases) out.insert(out.end(), b.begin(), b.end());
  return out;
}

Direction Direction::unflatten(const NetworkParams& like,
                               std::span<const double> coords) {
  Direction d = zeros_like(like);
  if (coords.size() != d.size())
    throw DimensionError("flat direction has " + std::to_string(coords.size()) +
                         " coordinates, expected " + std::to_string(d.size()));
  std::size_t at = 0;
  for (Matrix& w : d.weights)
    for (std::size_t c = 0; c < w.cols(); ++c)
      for (std::size_t r = 0; r < w.rows(); ++r) w(r, c) = coords[at++];
  for (Vector& b : d.biases)
    for (double& x : b) x = coords[at++];
  return d;
}

namespace {

void require_same_shape(const Direction& a, const Direction& b) {
  bool ok = a.layers() == b.layers();
  for (std::size_t i = 0; ok && i < a.layers(); ++i)
    ok = a.weights[i].rows() == b.weights[i].rows() &&
         a.weights[i].cols() == b.weights[i].cols() &&
         a.biases[i].size() == b.biases[i].size();
  if (!ok) throw DimensionError("direction shapes differ");
}

}  // namespace

double dot(const Direction& a, const Direction& b) {
  require_same_shape(a, b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.layers(); ++i)
    acc += dot(a.weights[i].span(), b.weights[i].span()) +
           dot(a.biases[i], b.biases[i]);
  return acc;
}

double max_abs(const Direction& d) {
  double m = 0.0;
  for (std::size_t i = 0; i < d.layers(); ++i)
    m = std::max({m, max_abs(d.weights[i].span()), max_abs(d.biases[i].span())});
  return m;
}

Direction scaled(const Direction& d, double s) {
  Direction out;
  for (std::size_t i = 0; i < d.layers(); ++i) {
    out.weights.push_back(scaled(d.weights[i], s));
    out.biases.push_back(scaled(d.biases[i], s));
  }
  return out;
}

Direction subtract(const Direction& a, const Direction& b) {
  return combine(1.0, a, -1.0, b);
}

Direction combine(double alpha, const Direction& a, double beta,
                  const Direction& b) {
  require_same_shape(a, b);
  Direction out = scaled(a, alpha);
  for (std::size_t i = 0; i < a.layers(); ++i) {
    axpy(beta, b.weights[i].span(), out.weights[i].span());
    axpy(beta, b.biases[i].span(), out.biases[i].span());
  }
  return out;
}

AdjointState backprop(const NetworkParams& params, const ForwardState& state,
                      const Vector& label, const RegSchedule& sched) {
  const std::size_t n = params.layers();
  if (state.layers() != n)
    throw DimensionError("forward state does not match network depth");
  if (sched.layers() != n)
    throw DimensionError("schedule has " + std::to_string(sched.layers()) +
                         " layers, network has " + std::to_string(n));
  if (label.size() != state.output().size())
    throw DimensionError("label length " + std::to_string(label.size()) +
                         " does not match output length " +
                         std::to_string(state.output().size()));

  AdjointState adj;
  adj.residual = subtract(label, state.output());
  adj.regularized = sched.lambda_out != 1.0 ||
                    std::any_of(sched.lambdas.begin(), sched.lambdas.end(),
                                [](double l) { return l != 0.0; });
  adj.adjoints.resize(n);
  adj.adjoints[n - 1] = scaled(adj.residual, sched.lambda_out);
  for (std::size_t i = n - 1; i > 0; --i) {
    Vector v = hadamard(state.derivs[i], adj.adjoints[i]);
    Vector b = matvec_transposed(params.weights[i], v);
    const double lambda = sched.lambdas[i - 1];
    const Vector& x = state.acts[i - 1];
    for (std::size_t j = 0; j < b.size(); ++j) b[j] -= lambda * x[j];
    adj.adjoints[i - 1] = std::move(b);
  }
  return adj;
}

AdjointState unregularized_adjoint(const NetworkParams& params,
                                   const ForwardState& state,
                                   const Vector& label) {
  AdjointState adj =
      backprop(params, state, label, RegSchedule::plain(params.layers()));
  adj.regularized = false;
  return adj;
}

Vector scaled_adjoint(const ForwardState& state, const AdjointState& adj,
                      std::size_t layer) {
  return hadamard(state.derivs[layer], adj.adjoints[layer]);
}

Direction gradient(const ForwardState& state, const AdjointState& adj) {
  if (adj.adjoints.size() != state.layers())
    throw DimensionError("adjoint state does not match forward state");
  Direction g;
  for (std::size_t i = 0; i < state.layers(); ++i) {
    Vector bias = scaled_adjoint(state, adj, i);
    for (double& x : bias) x = -x;
    g.weights.push_back(outer(bias, state.layer_input(i)));
    g.biases.push_back(std::move(bias));
  }
  return g;
}

}  // namespace sifrian
