#include <doctest.h>

#include <cmath>
#include <random>

#include "sifrian/errors.hpp"
#include "sifrian/oracle.hpp"

using namespace sifrian;

TEST_SUITE("oracle") {

TEST_CASE("FD gradient of a linear scalar net is exact up to roundoff") {
  // J = 1/2 (d - w x - beta)^2 is quadratic in (w, beta).
  NetworkParams p;
  p.sizes = {1, 1};
  p.weights = {Matrix{{0.8}}};
  p.biases = {Vector{0.3}};
  p.activation = Activation::identity();
  const Vector x{1.7}, d{2.9};
  const RegSchedule plain = RegSchedule::plain(1);
  const double r = d[0] - (0.8 * 1.7 + 0.3);
  const Direction fd = fd_gradient(p, x, d, plain);
  CHECK(fd.weights[0](0, 0) == doctest::Approx(-r * 1.7).epsilon(1e-9));
  CHECK(fd.biases[0][0] == doctest::Approx(-r).epsilon(1e-9));
}

TEST_CASE("FD gradient vanishes at a zero-residual point") {
  const NetworkParams p = init({3, 4, 2}, Activation::leaky_relu(0.1), 3);
  const Vector x{0.5, -0.2, 0.9};
  const Direction fd = fd_gradient(p, x, forward(p, x).output(), RegSchedule::plain(2));
  CHECK(max_abs(fd) <= 1e-10);
}

TEST_CASE("FD gradient error shrinks quadratically on a smooth net") {
  // Piecewise-linear nets are quadratic in each coordinate, so the central
  // difference is exact there; sigmoid exposes the truncation term.
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const NetworkParams p = init({3, 4, 2}, Activation::sigmoid(), seed);
    const Vector x{0.4, -0.7, 0.9}, d{0.2, 0.8};
    const RegSchedule sched = random_schedule(2, seed);
    const Direction g = pattern_gradient(p, x, d, sched);
    const double e1 = max_abs(subtract(fd_gradient(p, x, d, sched, 2e-2), g));
    const double e2 = max_abs(subtract(fd_gradient(p, x, d, sched, 1e-2), g));
    const double ratio = e1 / e2;
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
  }
}

TEST_CASE("FD Hessian-vector product") {
  const Sample s = kink_safe_sample({2, 3, 2}, 1, 1e-3);
  const RegSchedule sched = random_schedule(2, 1);
  CHECK(max_abs(fd_hessian_vector(s.params, s.input, s.label, sched,
                                  Direction::zeros_like(s.params))) == 0.0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> a(s.params.parameter_count()), b(a.size());
  for (double& x : a) x = u(rng);
  for (double& x : b) x = u(rng);
  const Direction da = Direction::unflatten(s.params, a), db = Direction::unflatten(s.params, b);
  const double ab = dot(da, fd_hessian_vector(s.params, s.input, s.label, sched, db));
  const double ba = dot(db, fd_hessian_vector(s.params, s.input, s.label, sched, da));
  CHECK(std::abs(ab - ba) <= 1e-6);
}

TEST_CASE("kink-safe sampling") {
  const Sample s = kink_safe_sample({3, 4, 2}, 0, 1e-3);
  CHECK(s.attempts <= 100);
  CHECK(satisfies_margin(s, 1e-3, 0.0));
  const Sample t = kink_safe_sample({3, 4, 2}, 0, 1e-3);
  CHECK(s.params == t.params);
  CHECK(s.input == t.input);
  CHECK(s.label == t.label);
  CHECK_THROWS_AS(kink_safe_sample({3, 4, 2}, 0, 0.0), SamplingError);
  SampleOptions tight;
  tight.max_attempts = 3;
  CHECK_THROWS_AS(kink_safe_sample({3, 4, 2}, 0, 10.0, tight), SamplingError);
}

TEST_CASE("random tiny sizes stay within bounds") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto sizes = random_tiny_sizes(seed, 4, 5);
    CHECK(sizes.size() >= 2);
    CHECK(sizes.size() <= 5);
    for (std::size_t s : sizes) CHECK((s >= 1 && s <= 5));
  }
}

}
