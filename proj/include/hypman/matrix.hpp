#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "hypman/ball.hpp"
#include "hypman/error.hpp"
#include "hypman/rational.hpp"

namespace hypman {

/// Dense row-major matrix over an arbitrary ring-like entry type.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) fail(ErrorCode::DimensionMismatch, "matrix data size");
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const T> data() const { return data_; }
  std::span<T> data() { return data_; }

  Matrix& operator+=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] = data_[k] + o.data_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same(o);
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] = data_[k] - o.data_[k];
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) fail(ErrorCode::DimensionMismatch, "matrix product shapes");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t j = 0; j < b.cols_; ++j) {
        T acc(0);
        for (std::size_t k = 0; k < a.cols_; ++k) acc = acc + a(i, k) * b(k, j);
        c(i, j) = acc;
      }
    }
    return c;
  }
  friend Matrix operator*(const T& s, Matrix a) {
    for (auto& x : a.data_) x = s * x;
    return a;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) = default;

 private:
  void check_same(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) fail(ErrorCode::DimensionMismatch, "matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using RationalMatrix = Matrix<Rational>;
using BallMatrix = Matrix<Ball>;
using ComplexBallMatrix = Matrix<ComplexBall>;
using BallVector = std::vector<Ball>;
using RationalVector = std::vector<Rational>;

BallMatrix to_ball(const RationalMatrix& m);
ComplexBallMatrix to_complex(const BallMatrix& m);
/// Entrywise real parts.
BallMatrix real_part(const ComplexBallMatrix& m);

Eigen::MatrixXd mid(const BallMatrix& m);
Eigen::MatrixXcd mid(const ComplexBallMatrix& m);
Eigen::MatrixXd to_eigen(const RationalMatrix& m);
/// Exact (zero-radius) ball matrix from doubles.
BallMatrix from_eigen(const Eigen::MatrixXd& m);
ComplexBallMatrix from_eigen(const Eigen::MatrixXcd& m);

/// Upper bounds on the Hilbert-Schmidt norm of every member, rounded up.
double hs_norm_upper(const BallMatrix& m);
double hs_norm_upper(const ComplexBallMatrix& m);
/// Same bound as an exact rational (the double bound converted exactly).
Rational hs_norm_bound(const BallMatrix& m);
Rational hs_norm_bound(const ComplexBallMatrix& m);
/// Exact-input upper bound: a dyadic upper bound of sqrt(sum a_ij^2).
Rational hs_norm_bound(const RationalMatrix& m);
/// Hilbert-Schmidt norm of a double matrix rounded up.
double hs_norm_upper(const Eigen::MatrixXd& m);

/// Largest radius over all entries.
double max_radius(const BallMatrix& m);
double max_radius(const ComplexBallMatrix& m);

bool contains(const BallMatrix& m, const RationalMatrix& exact);
bool contains_identity(const BallMatrix& m);
bool contains_zero(const BallMatrix& m);

/// Certified inverse via an approximate inverse Y of the midpoint and the
/// residual R = I - Y M; requires ||R|| < 1.  Throws NotCertifiablyInvertible.
BallMatrix inverse(const BallMatrix& m);
ComplexBallMatrix inverse(const ComplexBallMatrix& m);

BallVector operator*(const BallMatrix& m, const BallVector& v);
/// Euclidean norm upper bound.
double norm_upper(const BallVector& v);

}  // namespace hypman
