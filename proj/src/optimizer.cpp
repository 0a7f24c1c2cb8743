#include "sifrian/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "sifrian/errors.hpp"
#include "sifrian/sifrian.hpp"

namespace sifrian {

std::string to_string(DirectionKind kind) {
  switch (kind) {
    case DirectionKind::sgd: return "sgd";
    case DirectionKind::newton_exact: return "newton-exact";
    case DirectionKind::mk: return "mk";
    case DirectionKind::mk_damped: return "mk-damped";
  }
  return "unknown";
}

DirectionKind parse_direction_kind(const std::string& name) {
  if (name == "sgd") return DirectionKind::sgd;
  if (name == "newton-exact" || name == "newton") return DirectionKind::newton_exact;
  if (name == "mk") return DirectionKind::mk;
  if (name == "mk-damped") return DirectionKind::mk_damped;
  throw ConfigError("unknown optimizer '" + name + "'");
}

bool degenerate_layer(const ForwardState& state, const AdjointState& adj,
                      std::size_t layer) {
  const double v = std::sqrt(squared_norm(scaled_adjoint(state, adj, layer)));
  const double b = std::sqrt(squared_norm(adj.adjoints[layer]));
  return v < kDegeneracyTol * (1.0 + b);
}

namespace {

void require_depths(const ForwardState& state, const AdjointState& adj,
                    const RegSchedule& sched) {
  if (adj.adjoints.size() != state.layers() || sched.layers() != state.layers())
    throw DimensionError("state, adjoint and schedule depths differ");
}

// Numerator of the MK bias coefficient for layer i.
double bias_numerator(const ForwardState& state, const AdjointState& adj,
                      const RegSchedule& sched, std::size_t i) {
  double c = sched.input_lambda(i) * squared_norm(state.layer_input(i));
  if (i + 1 == state.layers())
    c += sched.lambda_out * squared_norm(adj.residual);
  return c;
}

Direction mk_impl(const ForwardState& state, const AdjointState& adj,
                  const Direction& grad, const RegSchedule& sched, double mu) {
  require_depths(state, adj, sched);
  if (grad.layers() != state.layers())
    throw DimensionError("gradient depth differs from state");
  Direction out;
  for (std::size_t i = 0; i < state.layers(); ++i) {
    const double lambda = sched.input_lambda(i);
    const double c = bias_numerator(state, adj, sched, i);
    const double s = squared_norm(grad.biases[i]);
    if (mu == 0.0 && (lambda != 0.0 || c != 0.0) &&
        degenerate_layer(state, adj, i))
      throw NearZeroGradient(i + 1, std::sqrt(s));
    const double wn = lambda == 0.0 ? 0.0 : lambda / (mu * lambda + s);
    const double bn = c == 0.0 ? 0.0 : c / (mu * c + s);
    out.weights.push_back(scaled(grad.weights[i], wn));
    out.biases.push_back(scaled(grad.biases[i], bn));
  }
  return out;
}

}  // namespace

Direction newton_exact(const ForwardState& state, const AdjointState& adj,
                       const RegSchedule& sched) {
  require_depths(state, adj, sched);
  const std::size_t n = state.layers();
  Direction out;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector& xin = state.layer_input(i);
    const double lambda = sched.input_lambda(i);
    const bool last = i + 1 == n;
    Matrix w(state.acts[i].size(), xin.size());
    Vector eta(state.acts[i].size());
    if (lambda != 0.0 || last) {
      const Vector v = scaled_adjoint(state, adj, i);
      if (degenerate_layer(state, adj, i))
        throw DegenerateAdjoint(i + 1, std::sqrt(squared_norm(v)));
      if (lambda != 0.0) {
        w = outer(scaled(v, -lambda / squared_norm(v)), xin);
        eta = matvec(w, xin);
        for (double& e : eta) e = -e;
      }
    }
    if (last) {
      const Vector& d = state.derivs[i];
      for (std::size_t r = 0; r < eta.size(); ++r) {
        if (d[r] == 0.0)
          throw UnsupportedActivation("output derivative vanishes; F' is not invertible");
        eta[r] -= adj.residual[r] / d[r];
      }
    }
    out.weights.push_back(std::move(w));
    out.biases.push_back(std::move(eta));
  }
  return out;
}

Direction mk_direction(const ForwardState& state, const AdjointState& adj,
                       const Direction& grad, const RegSchedule& sched) {
  return mk_impl(state, adj, grad, sched, 0.0);
}

Direction mk_damped(const ForwardState& state, const AdjointState& adj,
                    const Direction& grad, const RegSchedule& sched) {
  if (!(sched.mu >= 0.0)) throw ConfigError("damping mu must be >= 0");
  return mk_impl(state, adj, grad, sched, sched.mu);
}

RegSchedule spectral_schedule(const ForwardState& state,
                              const AdjointState& unreg_adj) {
  const std::size_t n = state.layers();
  if (unreg_adj.adjoints.size() != n)
    throw DimensionError("adjoint depth differs from state");
  RegSchedule s;
  s.mode = LambdaMode::spectral_adaptive;
  s.lambdas.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double num = std::sqrt(squared_norm(scaled_adjoint(state, unreg_adj, i + 1)));
    s.lambdas[i] = std::max(num / norms(state.derivs[i]).inf, kLambdaFloor);
  }
  const double out = std::sqrt(squared_norm(unreg_adj.adjoints[n - 1]));
  s.lambda_out = std::max(out / norms(state.derivs[n - 1]).inf, kLambdaFloor);
  return s;
}

namespace {

void require_direction_shape(const NetworkParams& params, const Direction& dir) {
  if (dir.layers() != params.layers())
    throw DimensionError("direction depth differs from network");
  for (std::size_t i = 0; i < params.layers(); ++i)
    if (dir.weights[i].rows() != params.weights[i].rows() ||
        dir.weights[i].cols() != params.weights[i].cols() ||
        dir.biases[i].size() != params.biases[i].size())
      throw DimensionError("direction shape differs at layer " + std::to_string(i + 1));
}

bool finite_after(std::span<const double> p, std::span<const double> d, double step) {
  for (std::size_t j = 0; j < p.size(); ++j)
    if (!std::isfinite(p[j] - step * d[j])) return false;
  return true;
}

}  // namespace

void apply_step_in_place(NetworkParams& params, const Direction& dir, double step) {
  require_direction_shape(params, dir);
  for (std::size_t i = 0; i < params.layers(); ++i)
    if (!finite_after(params.weights[i].span(), dir.weights[i].span(), step) ||
        !finite_after(params.biases[i].span(), dir.biases[i].span(), step))
      throw NonFiniteError("non-finite parameters after update at layer " +
                           std::to_string(i + 1) + " (|dir|_max = " +
                           std::to_string(max_abs(dir)) + ", step " +
                           std::to_string(step) + ")");
  for (std::size_t i = 0; i < params.layers(); ++i) {
    axpy(-step, dir.weights[i].span(), params.weights[i].span());
    axpy(-step, dir.biases[i].span(), params.biases[i].span());
  }
}

NetworkParams apply_step(const NetworkParams& params, const Direction& dir,
                         double step) {
  NetworkParams out = params;
  apply_step_in_place(out, dir, step);
  return out;
}

NetworkParams sgd_step(const NetworkParams& params, const ForwardState& state,
                       const Vector& label, double lr) {
  const AdjointState adj = unregularized_adjoint(params, state, label);
  return apply_step(params, gradient(state, adj), lr);
}

namespace {

std::size_t argmax(const Vector& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

StepReport train_step(NetworkParams& params, const Vector& input,
                      const Vector& label, const StepOptions& opt) {
  const ForwardState state = forward(params, input);
  StepReport rep;
  rep.kind = opt.kind;
  rep.cost_before = plain_cost(state, label);
  rep.correct_before = argmax(state.output()) == argmax(label);

  const AdjointState plain = unregularized_adjoint(params, state, label);
  Direction dir;
  double step = opt.step_scale;
  if (opt.kind == DirectionKind::sgd) {
    dir = gradient(state, plain);
    rep.inner_product = dot(dir, dir);
    step = opt.lr;
  } else {
    RegSchedule sched = opt.fixed;
    if (opt.mode == LambdaMode::spectral_adaptive) {
      sched = spectral_schedule(state, plain);
      sched.mu = opt.fixed.mu;
      rep.hessian_radius = closed_form_spectrum(state, plain, sched).radius;
    }
    const AdjointState adj = backprop(params, state, label, sched);
    const Direction grad = gradient(state, adj);

    bool degenerate = false;
    for (std::size_t i = 0; i < state.layers(); ++i)
      if (sched.input_lambda(i) != 0.0 || i + 1 == state.layers())
        degenerate = degenerate || degenerate_layer(state, adj, i);
    if (opt.kind == DirectionKind::mk_damped) {
      dir = mk_damped(state, adj, grad, sched);
    } else if (degenerate) {
      rep.kind = DirectionKind::mk_damped;
      sched.mu = std::max(sched.mu, kFallbackMu);
      dir = mk_damped(state, adj, grad, sched);
    } else if (opt.kind == DirectionKind::mk) {
      dir = mk_direction(state, adj, grad, sched);
    } else {
      dir = newton_exact(state, adj, sched);
    }
    rep.inner_product = dot(dir, grad);
  }
  apply_step_in_place(params, dir, step);
  if (opt.measure_after) rep.cost_after = plain_cost(forward(params, input), label);
  return rep;
}

}  // namespace sifrian
