#include <doctest.h>

#include "sifrian/errors.hpp"
#include "sifrian/network.hpp"

using namespace sifrian;

namespace {

NetworkParams scalar_net(double w, double beta, double slope = 0.01) {
  NetworkParams p;
  p.sizes = {1, 1};
  p.weights = {Matrix{{w}}};
  p.biases = {Vector{beta}};
  p.activation = Activation::leaky_relu(slope);
  return p;
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("init shapes for the MNIST architecture") {
  const NetworkParams p = init({784, 512, 256, 32, 10}, Activation::leaky_relu(), 1);
  REQUIRE(p.layers() == 4);
  CHECK(p.weights[0].rows() == 512);
  CHECK(p.weights[0].cols() == 784);
  CHECK(p.weights[1].rows() == 256);
  CHECK(p.weights[1].cols() == 512);
  CHECK(p.weights[2].rows() == 32);
  CHECK(p.weights[2].cols() == 256);
  CHECK(p.weights[3].rows() == 10);
  CHECK(p.weights[3].cols() == 32);
}

TEST_CASE("init minimal net and determinism") {
  const NetworkParams p = init({2, 2}, Activation::leaky_relu(), 42);
  CHECK(p.layers() == 1);
  CHECK(p.weights[0].rows() == 2);
  CHECK(p.biases[0].size() == 2);
  CHECK(init({3, 4, 2}, Activation::leaky_relu(), 9) ==
        init({3, 4, 2}, Activation::leaky_relu(), 9));
  CHECK_FALSE(init({3, 4, 2}, Activation::leaky_relu(), 9) ==
              init({3, 4, 2}, Activation::leaky_relu(), 10));
  CHECK_THROWS_AS(init({3}, Activation::leaky_relu(), 0), DimensionError);
}

TEST_CASE("add_white_layer prepends an identity") {
  const NetworkParams p = init({2, 3}, Activation::leaky_relu(), 5);
  const NetworkParams w = add_white_layer(p);
  CHECK(w.sizes == std::vector<std::size_t>{2, 2, 3});
  CHECK(w.weights[0] == Matrix::identity(2));
  CHECK(w.biases[0] == Vector(2));
  CHECK(w.white_layers == 1);
}

TEST_CASE("white layers keep the network function bitwise") {
  const NetworkParams p = init({3, 4, 2}, Activation::leaky_relu(), 5);
  const NetworkParams w1 = add_white_layer(p);
  const NetworkParams w2 = add_white_layer(w1);
  CHECK(w2.white_layers == 2);
  for (const Vector& x : {Vector{0.5, -1, 2}, Vector{-3, -0.1, 0.7}}) {
    const Vector out = forward(p, x).output();
    CHECK(forward(w1, x).output() == out);
    CHECK(forward(w2, x).output() == out);
  }
}

TEST_CASE("forward hand examples") {
  NetworkParams zero;
  zero.sizes = {2, 3};
  zero.weights = {Matrix(3, 2)};
  zero.biases = {Vector(3)};
  CHECK(forward(zero, Vector{1, -2}).output() == Vector(3));

  const ForwardState pos = forward(scalar_net(2, 1), Vector{3});
  CHECK(pos.preacts[0][0] == 7.0);
  CHECK(pos.output()[0] == 7.0);

  const ForwardState neg = forward(scalar_net(1, -5), Vector{3});
  CHECK(neg.preacts[0][0] == -2.0);
  CHECK(neg.output()[0] == doctest::Approx(-0.02).epsilon(1e-15));
  CHECK(neg.derivs[0][0] == 0.01);
}

TEST_CASE("leaky-relu derivatives and tie-break") {
  const Activation f = Activation::leaky_relu(0.2);
  CHECK(f.derivative(0.0) == 1.0);
  CHECK(f.derivative(-1e-300) == 0.2);
  const NetworkParams p = init({4, 6, 3}, f, 2);
  const ForwardState s = forward(p, Vector{0.3, -0.8, 1.1, -0.4});
  for (const Vector& d : s.derivs)
    for (double x : d) CHECK((x == 0.2 || x == 1.0));
  CHECK_THROWS_AS(Activation::leaky_relu(1.5), ConfigError);
  CHECK_THROWS_AS(Activation::leaky_relu(0.0), ConfigError);
}

TEST_CASE("forward is deterministic and matches predict") {
  const NetworkParams p = init({5, 4, 3}, Activation::leaky_relu(), 8);
  const Vector x{0.1, 0.2, -0.3, 0.4, -0.5};
  CHECK(forward(p, x) == forward(p, x));
  CHECK(predict(p, x) == forward(p, x).output());
}

TEST_CASE("forward errors") {
  const NetworkParams p = init({2, 2}, Activation::leaky_relu(), 1);
  CHECK_THROWS_AS(forward(p, Vector{1, 2, 3}), DimensionError);
  NetworkParams big = scalar_net(1e308, 0);
  big.sizes = {1, 1};
  CHECK_THROWS_AS(forward(big, Vector{1e10}), NonFiniteError);
}

TEST_CASE("cost hand examples") {
  NetworkParams p;
  p.sizes = {1, 1, 2};
  p.weights = {Matrix{{1}}, Matrix{{0}, {0}}};
  p.biases = {Vector{1}, Vector{0, 0}};
  const ForwardState s = forward(p, Vector{1});  // hidden act 2, output (0, 0)
  CHECK(cost(s, Vector{0, 0}, RegSchedule::plain(2)) == 0.0);
  CHECK(cost(s, Vector{1, 0}, RegSchedule::plain(2)) == 0.5);
  CHECK(cost(s, Vector{0, 0}, RegSchedule::uniform(2, 3.0)) == 6.0);
  CHECK(plain_cost(s, Vector{1, 0}) == cost(s, Vector{1, 0}, RegSchedule::plain(2)));
  CHECK_THROWS_AS(cost(s, Vector{1}, RegSchedule::plain(2)), DimensionError);
}

}
