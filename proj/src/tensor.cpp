#include "sifrian/tensor.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "sifrian/errors.hpp"

namespace sifrian {

namespace {

void require(bool ok, const char* what, std::size_t a, std::size_t b) {
  if (!ok) {
    throw DimensionError(std::string(what) + ": " + std::to_string(a) +
                         " vs " + std::to_string(b));
  }
}

}  // namespace

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    require(r.size() == cols_, "ragged matrix literal", r.size(), cols_);
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_row_major(std::size_t rows, std::size_t cols,
                              std::vector<double> data) {
  require(data.size() == rows * cols, "row-major data length", data.size(),
          rows * cols);
  Matrix m;
  m.rows_ = rows;
  m.cols_ = cols;
  m.data_ = std::move(data);
  return m;
}

Matrix Matrix::transposed() const {
  Matrix t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Vector matvec(const Matrix& m, const Vector& v) {
  require(m.cols() == v.size(), "matvec", m.cols(), v.size());
  Vector out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const auto r = m.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * v[j];
    out[i] = acc;
  }
  return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
  require(m.rows() == v.size(), "matvec_transposed", m.rows(), v.size());
  // Accumulates row by row so out[j] = sum_i m(i,j) v[i] in ascending i.
  Vector out(m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    const double vi = v[i];
    const auto r = m.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j] * vi;
  }
  return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  require(a.cols() == b.rows(), "matmul", a.cols(), b.rows());
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto ci = c.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto bk = b.row(k);
      for (std::size_t j = 0; j < bk.size(); ++j) ci[j] += aik * bk[j];
    }
  }
  return c;
}

Matrix outer(const Vector& u, const Vector& v) {
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < v.size(); ++j) r[j] = u[i] * v[j];
  }
  return m;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "dot", a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double dot(const Vector& a, const Vector& b) { return dot(a.span(), b.span()); }

double squared_norm(const Vector& v) { return dot(v, v); }

Norms norms(const Vector& v) {
  return {std::sqrt(squared_norm(v)), max_abs(v.span())};
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double frobenius_norm(const Matrix& m) {
  return std::sqrt(dot(m.span(), m.span()));
}

double trace(const Matrix& m) {
  require(m.rows() == m.cols(), "trace of non-square", m.rows(), m.cols());
  double t = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) t += m(i, i);
  return t;
}

Vector hadamard(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "hadamard", a.size(), b.size());
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

Vector scaled(const Vector& v, double s) {
  Vector out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] * s;
  return out;
}

Matrix scaled(const Matrix& m, double s) {
  Matrix out(m.rows(), m.cols());
  auto o = out.span();
  auto in = m.span();
  for (std::size_t i = 0; i < in.size(); ++i) o[i] = in[i] * s;
  return out;
}

Vector add(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "add", a.size(), b.size());
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

Vector subtract(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "subtract", a.size(), b.size());
  Vector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

Matrix add(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix add",
          a.size(), b.size());
  Matrix out = a;
  axpy(1.0, b.span(), out.span());
  return out;
}

Matrix subtract(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "matrix subtract",
          a.size(), b.size());
  Matrix out = a;
  axpy(-1.0, b.span(), out.span());
  return out;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  require(x.size() == y.size(), "axpy", x.size(), y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

double asymmetry(const Matrix& m) {
  require(m.rows() == m.cols(), "asymmetry of non-square", m.rows(), m.cols());
  double worst = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      worst = std::max(worst, std::abs(m(i, j) - m(j, i)));
  return worst;
}

std::vector<double> sym_eigenvalues(const Matrix& m) {
  require(m.rows() == m.cols(), "sym_eigenvalues of non-square", m.rows(),
          m.cols());
  const auto n = static_cast<Eigen::Index>(m.rows());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      a(i, j) = 0.5 * (m(i, j) + m(j, i));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw Error("symmetric eigensolver did not converge");
  std::vector<double> out(solver.eigenvalues().data(),
                          solver.eigenvalues().data() + n);
  std::sort(out.begin(), out.end());
  return out;
}

Inertia inertia(const std::vector<double>& eigenvalues, double rel_tol) {
  const double scale = max_abs(eigenvalues);
  const double cut = rel_tol * scale;
  Inertia in;
  for (double e : eigenvalues) {
    if (std::abs(e) <= cut)
      ++in.zero;
    else if (e > 0)
      ++in.positive;
    else
      ++in.negative;
  }
  return in;
}

}  // namespace sifrian
