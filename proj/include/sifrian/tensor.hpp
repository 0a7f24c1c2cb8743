#pragma once

// Dense 64-bit linear algebra used throughout the library.
//
// Reductions always run sequentially in ascending index order, so two runs
// on the same platform produce bitwise-identical results.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace sifrian {

class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) noexcept { return data_[i]; }
  double operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> data_;
};

/// Row-major dense matrix: entry (i, j) lives at data[i * cols + j].
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  static Matrix from_row_major(std::size_t rows, std::size_t cols,
                               std::vector<double> data);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  Matrix transposed() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Norms {
  double two = 0.0;
  double inf = 0.0;
};

Vector matvec(const Matrix& m, const Vector& v);
/// m^T v without forming the transpose.
Vector matvec_transposed(const Matrix& m, const Vector& v);
Matrix matmul(const Matrix& a, const Matrix& b);
Matrix outer(const Vector& u, const Vector& v);

double dot(std::span<const double> a, std::span<const double> b);
double dot(const Vector& a, const Vector& b);
double squared_norm(const Vector& v);
Norms norms(const Vector& v);
double max_abs(std::span<const double> v);
double frobenius_norm(const Matrix& m);
double trace(const Matrix& m);

Vector hadamard(const Vector& a, const Vector& b);
Vector scaled(const Vector& v, double s);
Matrix scaled(const Matrix& m, double s);
Vector add(const Vector& a, const Vector& b);
Vector subtract(const Vector& a, const Vector& b);
Matrix add(const Matrix& a, const Matrix& b);
Matrix subtract(const Matrix& a, const Matrix& b);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

bool all_finite(std::span<const double> v);

/// Largest |m(i,j) - m(j,i)|.
double asymmetry(const Matrix& m);

/// Real eigenvalues of a symmetric matrix, ascending.  The input is
/// symmetrized as (m + m^T) / 2 before solving; throws DimensionError if it
/// is not square.
std::vector<double> sym_eigenvalues(const Matrix& m);

struct Inertia {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
  bool operator==(const Inertia&) const = default;
};

/// Signs of eigenvalues, with |lambda| <= rel_tol * max|lambda| counted zero.
Inertia inertia(const std::vector<double>& eigenvalues, double rel_tol);

}  // namespace sifrian
