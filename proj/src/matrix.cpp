#include "hypman/matrix.hpp"

#include <cmath>

#include "hypman/rounding.hpp"

namespace hypman {

using namespace rnd;

BallMatrix to_ball(const RationalMatrix& m) {
  BallMatrix b(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) b(i, j) = Ball::from_rational(m(i, j));
  return b;
}

ComplexBallMatrix to_complex(const BallMatrix& m) {
  ComplexBallMatrix c(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) c(i, j) = ComplexBall(m(i, j));
  return c;
}

BallMatrix real_part(const ComplexBallMatrix& m) {
  BallMatrix b(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) b(i, j) = m(i, j).re();
  return b;
}

Eigen::MatrixXd mid(const BallMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j).mid();
  return e;
}

Eigen::MatrixXcd mid(const ComplexBallMatrix& m) {
  Eigen::MatrixXcd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = {m(i, j).re().mid(), m(i, j).im().mid()};
  return e;
}

Eigen::MatrixXd to_eigen(const RationalMatrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j).get_d();
  return e;
}

BallMatrix from_eigen(const Eigen::MatrixXd& m) {
  BallMatrix b(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      b(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = Ball(m(i, j));
  return b;
}

ComplexBallMatrix from_eigen(const Eigen::MatrixXcd& m) {
  ComplexBallMatrix b(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      b(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          ComplexBall(Ball(m(i, j).real()), Ball(m(i, j).imag()));
  return b;
}

double hs_norm_upper(const BallMatrix& m) {
  double s = 0;
  for (const Ball& x : m.data()) s = add_up(s, sq_up(x.mag()));
  return sqrt_up(s);
}

double hs_norm_upper(const ComplexBallMatrix& m) {
  double s = 0;
  for (const ComplexBall& z : m.data()) {
    s = add_up(s, sq_up(z.re().mag()));
    s = add_up(s, sq_up(z.im().mag()));
  }
  return sqrt_up(s);
}

double hs_norm_upper(const Eigen::MatrixXd& m) {
  double s = 0;
  for (Eigen::Index i = 0; i < m.size(); ++i) s = add_up(s, sq_up(m.data()[i]));
  return sqrt_up(s);
}

Rational hs_norm_bound(const BallMatrix& m) { return Rational(hs_norm_upper(m)); }
Rational hs_norm_bound(const ComplexBallMatrix& m) { return Rational(hs_norm_upper(m)); }

Rational hs_norm_bound(const RationalMatrix& m) {
  Rational s = 0;
  for (const Rational& x : m.data()) s += x * x;
  return sqrt_upper(s);
}

double max_radius(const BallMatrix& m) {
  double r = 0;
  for (const Ball& x : m.data()) r = std::max(r, x.rad());
  return r;
}

double max_radius(const ComplexBallMatrix& m) {
  double r = 0;
  for (const ComplexBall& z : m.data()) r = std::max({r, z.re().rad(), z.im().rad()});
  return r;
}

bool contains(const BallMatrix& m, const RationalMatrix& exact) {
  if (m.rows() != exact.rows() || m.cols() != exact.cols()) return false;
  for (std::size_t k = 0; k < m.data().size(); ++k) {
    if (!m.data()[k].contains(exact.data()[k])) return false;
  }
  return true;
}

bool contains_identity(const BallMatrix& m) {
  return m.square() && contains(m, RationalMatrix::identity(m.rows()));
}

bool contains_zero(const BallMatrix& m) {
  for (const Ball& x : m.data()) {
    if (!x.contains_zero()) return false;
  }
  return true;
}

namespace {

template <class Ball_, class Eig>
Matrix<Ball_> certified_inverse(const Matrix<Ball_>& m, const Eig& center) {
  if (!m.square()) fail(ErrorCode::DimensionMismatch, "inverse of a non-square matrix");
  const std::size_t n = m.rows();
  Eigen::FullPivLU<Eig> lu(center);
  if (!lu.isInvertible()) fail(ErrorCode::NotCertifiablyInvertible, "midpoint matrix is singular");
  const Eig y = lu.inverse();
  if (!y.allFinite()) fail(ErrorCode::NotCertifiablyInvertible, "approximate inverse not finite");
  const Matrix<Ball_> yb = from_eigen(y);
  Matrix<Ball_> r = Matrix<Ball_>::identity(n) - yb * m;
  const double beta = hs_norm_upper(r);
  if (!(beta < 1)) fail(ErrorCode::NotCertifiablyInvertible, "residual norm bound is not below 1");
  Matrix<Ball_> result = yb + r * yb;
  if (beta > 0) {
    const double nu = hs_norm_upper(yb);
    const double tail = div_up(mul_up(mul_up(beta, beta), nu), sub_down(1.0, beta));
    for (auto& x : result.data()) x = inflate(x, tail);
  }
  return result;
}

}  // namespace

BallMatrix inverse(const BallMatrix& m) { return certified_inverse(m, mid(m)); }
ComplexBallMatrix inverse(const ComplexBallMatrix& m) { return certified_inverse(m, mid(m)); }

BallVector operator*(const BallMatrix& m, const BallVector& v) {
  if (m.cols() != v.size()) fail(ErrorCode::DimensionMismatch, "matrix-vector shapes");
  BallVector out(m.rows(), Ball(0.0));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Ball acc(0.0);
    for (std::size_t j = 0; j < m.cols(); ++j) acc = acc + m(i, j) * v[j];
    out[i] = acc;
  }
  return out;
}

double norm_upper(const BallVector& v) {
  double s = 0;
  for (const Ball& x : v) s = add_up(s, sq_up(x.mag()));
  return sqrt_up(s);
}

}  // namespace hypman
