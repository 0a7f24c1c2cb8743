#include <doctest.h>

#include <cmath>
#include <random>

#include "sifrian/errors.hpp"
#include "sifrian/tensor.hpp"

using namespace sifrian;

TEST_SUITE("tensor") {

TEST_CASE("matvec") {
  CHECK(matvec(Matrix::identity(2), Vector{3, -1}) == Vector{3, -1});
  CHECK(matvec(Matrix(2, 2), Vector{5, 7}) == Vector{0, 0});
  CHECK(matvec(Matrix{{1, 2}, {3, 4}}, Vector{1, 1}) == Vector{3, 7});
  CHECK_THROWS_AS(matvec(Matrix(2, 3), Vector{1, 1}), DimensionError);
}

TEST_CASE("matvec is linear") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix m(4, 3);
  for (double& x : m.span()) x = u(rng);
  Vector a(3), b(3);
  for (double& x : a) x = u(rng);
  for (double& x : b) x = u(rng);
  const double alpha = 0.7, beta = -1.3;
  const Vector lhs = matvec(m, add(scaled(a, alpha), scaled(b, beta)));
  const Vector rhs = add(scaled(matvec(m, a), alpha), scaled(matvec(m, b), beta));
  for (std::size_t i = 0; i < lhs.size(); ++i)
    CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
}

TEST_CASE("matvec_transposed matches the explicit transpose") {
  const Matrix m{{1, 2, 3}, {4, 5, 6}};
  CHECK(matvec_transposed(m, Vector{1, -1}) == matvec(m.transposed(), Vector{1, -1}));
}

TEST_CASE("outer") {
  CHECK(outer(Vector{1, 0}, Vector{0, 1}) == Matrix{{0, 1}, {0, 0}});
  CHECK(outer(Vector{0, 0}, Vector{2.5, -1}) == Matrix(2, 2));
  CHECK(outer(Vector{2, 3}, Vector{4, 5}) == Matrix{{8, 10}, {12, 15}});
}

TEST_CASE("outer product has rank one") {
  const Vector u{1.5, -2, 0.25}, v{0.3, 4, -1, 2};
  const Matrix o = outer(u, v);
  const auto eig = sym_eigenvalues(matmul(o, o.transposed()));
  // Second singular value squared is the second-largest Gram eigenvalue.
  CHECK(std::abs(eig[eig.size() - 2]) <= 1e-12 * squared_norm(u) * squared_norm(v));
}

TEST_CASE("norms") {
  CHECK(norms(Vector{0, 0, 0}).two == 0.0);
  CHECK(norms(Vector{0, 0, 0}).inf == 0.0);
  CHECK(norms(Vector{3, 4}).two == 5.0);
  CHECK(norms(Vector{3, 4}).inf == 4.0);
  CHECK(norms(Vector{-2}).two == 2.0);
  CHECK(norms(Vector{-2}).inf == 2.0);
}

TEST_CASE("sym_eigenvalues") {
  Matrix d(3, 3);
  d(0, 0) = 1;
  d(1, 1) = 5;
  d(2, 2) = -2;
  const auto e = sym_eigenvalues(d);
  CHECK(e[0] == doctest::Approx(-2));
  CHECK(e[1] == doctest::Approx(1));
  CHECK(e[2] == doctest::Approx(5));

  const auto s = sym_eigenvalues(Matrix{{0, 1}, {1, 0}});
  CHECK(s[0] == doctest::Approx(-1));
  CHECK(s[1] == doctest::Approx(1));

  for (double x : sym_eigenvalues(Matrix(3, 3))) CHECK(x == 0.0);
  CHECK_THROWS_AS(sym_eigenvalues(Matrix(2, 3)), DimensionError);
}

TEST_CASE("eigenvalues satisfy trace and Frobenius identities") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix a(6, 6);
    for (double& x : a.span()) x = u(rng);
    const Matrix m = add(a, a.transposed());
    const auto e = sym_eigenvalues(m);
    double sum = 0, sq = 0;
    for (double x : e) {
      sum += x;
      sq += x * x;
    }
    CHECK(sum == doctest::Approx(trace(m)).epsilon(1e-9));
    const double f = frobenius_norm(m);
    CHECK(sq == doctest::Approx(f * f).epsilon(1e-9));
  }
}

TEST_CASE("inertia counts signs with a relative zero band") {
  const Inertia in = inertia({-3, -1e-14, 0, 2, 5}, 1e-10);
  CHECK(in.positive == 2);
  CHECK(in.negative == 1);
  CHECK(in.zero == 2);
}

}
