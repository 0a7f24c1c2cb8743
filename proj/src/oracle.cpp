#include "sifrian/oracle.hpp"

#include <cmath>
#include <random>

#include "sifrian/errors.hpp"
#include "sifrian/optimizer.hpp"

namespace sifrian {

double pattern_cost(const NetworkParams& params, const Vector& input,
                    const Vector& label, const RegSchedule& sched) {
  return cost(forward(params, input), label, sched);
}

Direction pattern_gradient(const NetworkParams& params, const Vector& input,
                           const Vector& label, const RegSchedule& sched) {
  const ForwardState s = forward(params, input);
  return gradient(s, backprop(params, s, label, sched));
}

std::vector<double> flatten_params(const NetworkParams& params) {
  return Direction{params.weights, params.biases}.flatten();
}

NetworkParams with_coords(const NetworkParams& like,
                          const std::vector<double>& coords) {
  Direction d = Direction::unflatten(like, coords);
  NetworkParams out = like;
  out.weights = std::move(d.weights);
  out.biases = std::move(d.biases);
  return out;
}

Direction fd_gradient(const NetworkParams& params, const Vector& input,
                      const Vector& label, const RegSchedule& sched,
                      double step) {
  std::vector<double> theta = flatten_params(params);
  std::vector<double> g(theta.size());
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double t = theta[i];
    theta[i] = t + step;
    const double up = pattern_cost(with_coords(params, theta), input, label, sched);
    theta[i] = t - step;
    const double down = pattern_cost(with_coords(params, theta), input, label, sched);
    theta[i] = t;
    g[i] = (up - down) / (2.0 * step);
  }
  return Direction::unflatten(params, g);
}

Direction fd_hessian_vector(const NetworkParams& params, const Vector& input,
                            const Vector& label, const RegSchedule& sched,
                            const Direction& dir, double step) {
  const Direction up = pattern_gradient(apply_step(params, dir, -step), input, label, sched);
  const Direction down = pattern_gradient(apply_step(params, dir, step), input, label, sched);
  return combine(0.5 / step, up, -0.5 / step, down);
}

Matrix fd_hessian(const NetworkParams& params, const Vector& input,
                  const Vector& label, const RegSchedule& sched, double step,
                  std::size_t cap) {
  if (params.parameter_count() > cap)
    throw CapExceeded(params.parameter_count(), cap);
  std::vector<double> theta = flatten_params(params);
  const std::size_t m = theta.size();
  auto j = [&](std::size_t a, double sa, std::size_t b, double sb) {
    std::vector<double> t = theta;
    t[a] += sa;
    t[b] += sb;
    return pattern_cost(with_coords(params, t), input, label, sched);
  };
  Matrix h(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = a; b < m; ++b) {
      const double v = (j(a, step, b, step) - j(a, step, b, -step) -
                        j(a, -step, b, step) + j(a, -step, b, -step)) /
                       (4.0 * step * step);
      h(a, b) = v;
      h(b, a) = v;
    }
  return h;
}

std::vector<std::size_t> random_tiny_sizes(std::uint64_t seed,
                                           std::size_t max_layers,
                                           std::size_t max_width) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> depth(1, max_layers);
  std::uniform_int_distribution<std::size_t> width(1, max_width);
  std::vector<std::size_t> sizes(depth(rng) + 1);
  for (std::size_t& s : sizes) s = width(rng);
  return sizes;
}

RegSchedule random_schedule(std::size_t layers, std::uint64_t seed, double lo,
                            double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  RegSchedule s;
  s.lambdas.resize(layers - 1);
  for (double& l : s.lambdas) l = u(rng);
  s.lambda_out = u(rng);
  return s;
}

bool satisfies_margin(const Sample& s, double margin, double lambda) {
  const ForwardState st = forward(s.params, s.input);
  for (std::size_t i = 0; i < st.layers(); ++i) {
    if (s.params.layer_activation(i).kind == ActivationKind::identity) continue;
    for (double a : st.preacts[i])
      if (!(std::abs(a) > margin)) return false;
  }
  const RegSchedule sched = RegSchedule::uniform(s.params.layers(), lambda);
  const AdjointState adj = backprop(s.params, st, s.label, sched);
  for (std::size_t i = 0; i < st.layers(); ++i)
    if (!(std::sqrt(squared_norm(scaled_adjoint(st, adj, i))) > margin * 1e-3))
      return false;
  return true;
}

Sample kink_safe_sample(const std::vector<std::size_t>& sizes,
                        std::uint64_t seed, double margin,
                        const SampleOptions& opt) {
  if (!(margin > 0.0)) throw SamplingError("margin must be positive");
  if (sizes.size() < 2) throw DimensionError("need at least two layer sizes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> in(-1.0, 1.0);
  std::uniform_real_distribution<double> out(0.0, 1.0);
  for (std::size_t attempt = 1; attempt <= opt.max_attempts; ++attempt) {
    Sample s;
    s.params = init(sizes, opt.activation, rng());
    for (std::size_t w = 0; w < opt.white_layers; ++w)
      s.params = add_white_layer(s.params);
    s.input = Vector(sizes.front());
    for (double& x : s.input) x = in(rng);
    s.label = Vector(sizes.back());
    for (double& x : s.label) x = out(rng);
    s.attempts = attempt;
    if (satisfies_margin(s, margin, opt.lambda)) return s;
  }
  throw SamplingError("no kink-safe instance within " +
                      std::to_string(opt.max_attempts) + " attempts");
}

}  // namespace sifrian
