#include "sifrian/network.hpp"

#include <cmath>
#include <random>

#include "sifrian/errors.hpp"

namespace sifrian {

Activation Activation::leaky_relu(double slope) {
  if (!(slope > 0.0 && slope < 1.0))
    throw ConfigError("leaky-relu slope must lie in (0, 1), got " +
                      std::to_string(slope));
  return {ActivationKind::leaky_relu, slope};
}

double Activation::value(double a) const {
  switch (kind) {
    case ActivationKind::leaky_relu:
      return a >= 0.0 ? a : slope * a;
    case ActivationKind::relu:
      return a >= 0.0 ? a : 0.0;
    case ActivationKind::sigmoid:
      return 1.0 / (1.0 + std::exp(-a));
    case ActivationKind::tanh:
      return std::tanh(a);
    case ActivationKind::identity:
      return a;
  }
  return a;
}

double Activation::derivative(double a) const {
  switch (kind) {
    case ActivationKind::leaky_relu:
      return a >= 0.0 ? 1.0 : slope;
    case ActivationKind::relu:
      return a >= 0.0 ? 1.0 : 0.0;
    case ActivationKind::sigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-a));
      return s * (1.0 - s);
    }
    case ActivationKind::tanh: {
      const double t = std::tanh(a);
      return 1.0 - t * t;
    }
    case ActivationKind::identity:
      return 1.0;
  }
  return 1.0;
}

bool Activation::piecewise_linear() const {
  return kind == ActivationKind::leaky_relu || kind == ActivationKind::relu ||
         kind == ActivationKind::identity;
}

bool Activation::strictly_monotone() const {
  return kind == ActivationKind::leaky_relu ||
         kind == ActivationKind::identity;
}

std::string Activation::name() const {
  switch (kind) {
    case ActivationKind::leaky_relu: return "leaky-relu";
    case ActivationKind::relu: return "relu";
    case ActivationKind::sigmoid: return "sigmoid";
    case ActivationKind::tanh: return "tanh";
    case ActivationKind::identity: return "identity";
  }
  return "unknown";
}

Activation Activation::parse(const std::string& name, double slope) {
  if (name == "leaky-relu" || name == "leaky_relu") return leaky_relu(slope);
  if (name == "relu") return relu();
  if (name == "sigmoid") return sigmoid();
  if (name == "tanh") return tanh();
  throw ConfigError("unknown activation '" + name + "'");
}

std::size_t NetworkParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < weights.size(); ++i)
    n += weights[i].size() + biases[i].size();
  return n;
}

const Activation& NetworkParams::layer_activation(std::size_t layer) const {
  static const Activation linear = Activation::identity();
  return layer < white_layers ? linear : activation;
}

void NetworkParams::validate() const {
  if (sizes.size() < 2)
    throw DimensionError("a network needs at least two layer sizes");
  if (weights.size() + 1 != sizes.size() || biases.size() != weights.size())
    throw DimensionError("layer count does not match sizes");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i].rows() != sizes[i + 1] || weights[i].cols() != sizes[i])
      throw DimensionError("weight " + std::to_string(i) + " is " +
                           std::to_string(weights[i].rows()) + "x" +
                           std::to_string(weights[i].cols()) + ", expected " +
                           std::to_string(sizes[i + 1]) + "x" +
                           std::to_string(sizes[i]));
    if (biases[i].size() != sizes[i + 1])
      throw DimensionError("bias " + std::to_string(i) + " has length " +
                           std::to_string(biases[i].size()));
  }
  if (white_layers > weights.size())
    throw DimensionError("more white layers than layers");
}

NetworkParams init(const std::vector<std::size_t>& sizes,
                   const Activation& activation, std::uint64_t seed,
                   InitScheme /*scheme*/) {
  if (sizes.size() < 2)
    throw DimensionError("a network needs at least two layer sizes");
  for (std::size_t s : sizes)
    if (s == 0) throw DimensionError("layer size must be at least 1");

  std::mt19937_64 rng(seed);
  NetworkParams p;
  p.sizes = sizes;
  p.activation = activation;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const double r = std::sqrt(6.0 / static_cast<double>(sizes[i] + sizes[i + 1]));
    std::uniform_real_distribution<double> wdist(-r, r);
    std::uniform_real_distribution<double> bdist(-0.01, 0.01);
    Matrix w(sizes[i + 1], sizes[i]);
    for (double& x : w.span()) x = wdist(rng);
    Vector b(sizes[i + 1]);
    for (double& x : b) {
      do {
        x = bdist(rng);
      } while (x == 0.0);
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(std::move(b));
  }
  return p;
}

NetworkParams add_white_layer(const NetworkParams& params) {
  params.validate();
  NetworkParams out;
  const std::size_t d0 = params.sizes.front();
  out.sizes.reserve(params.sizes.size() + 1);
  out.sizes.push_back(d0);
  out.sizes.insert(out.sizes.end(), params.sizes.begin(), params.sizes.end());
  out.weights.push_back(Matrix::identity(d0));
  out.biases.emplace_back(d0);
  out.weights.insert(out.weights.end(), params.weights.begin(),
                     params.weights.end());
  out.biases.insert(out.biases.end(), params.biases.begin(),
                    params.biases.end());
  out.activation = params.activation;
  out.white_layers = params.white_layers + 1;
  return out;
}

ForwardState forward(const NetworkParams& params, const Vector& input) {
  if (input.size() != params.sizes.front())
    throw DimensionError("input length " + std::to_string(input.size()) +
                         " does not match d0 = " +
                         std::to_string(params.sizes.front()));
  if (!all_finite(input.span())) throw NonFiniteError("non-finite input");

  ForwardState s;
  s.input = input;
  const std::size_t n = params.layers();
  s.preacts.reserve(n);
  s.acts.reserve(n);
  s.derivs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Activation& f = params.layer_activation(i);
    Vector a = matvec(params.weights[i], s.layer_input(i));
    const Vector& beta = params.biases[i];
    for (std::size_t j = 0; j < a.size(); ++j) a[j] += beta[j];
    Vector x(a.size());
    Vector d(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) {
      x[j] = f.value(a[j]);
      d[j] = f.derivative(a[j]);
    }
    if (!all_finite(a.span()) || !all_finite(x.span()))
      throw NonFiniteError("non-finite activation at layer " +
                           std::to_string(i + 1));
    s.preacts.push_back(std::move(a));
    s.acts.push_back(std::move(x));
    s.derivs.push_back(std::move(d));
  }
  return s;
}

Vector predict(const NetworkParams& params, const Vector& input) {
  if (input.size() != params.sizes.front())
    throw DimensionError("input length does not match d0");
  Vector x = input;
  for (std::size_t i = 0; i < params.layers(); ++i) {
    const Activation& f = params.layer_activation(i);
    Vector a = matvec(params.weights[i], x);
    for (std::size_t j = 0; j < a.size(); ++j)
      a[j] = f.value(a[j] + params.biases[i][j]);
    x = std::move(a);
  }
  return x;
}

double plain_cost(const ForwardState& state, const Vector& label) {
  if (label.size() != state.output().size())
    throw DimensionError("label length " + std::to_string(label.size()) +
                         " does not match output length " +
                         std::to_string(state.output().size()));
  return 0.5 * squared_norm(subtract(label, state.output()));
}

double cost(const ForwardState& state, const Vector& label,
            const RegSchedule& sched) {
  const std::size_t n = state.layers();
  if (sched.layers() != n)
    throw DimensionError("schedule has " + std::to_string(sched.layers()) +
                         " layers, network has " + std::to_string(n));
  double j = sched.lambda_out * plain_cost(state, label);
  for (std::size_t i = 0; i + 1 < n; ++i)
    j += 0.5 * sched.lambdas[i] * squared_norm(state.acts[i]);
  return j;
}

RegSchedule RegSchedule::plain(std::size_t layers) {
  RegSchedule s;
  s.lambdas.assign(layers == 0 ? 0 : layers - 1, 0.0);
  return s;
}

RegSchedule RegSchedule::uniform(std::size_t layers, double lambda,
                                 double lambda_out) {
  RegSchedule s;
  s.lambdas.assign(layers == 0 ? 0 : layers - 1, lambda);
  s.lambda_out = lambda_out;
  return s;
}

}  // namespace sifrian
