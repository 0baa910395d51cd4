#include "wormchain/so3.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace wormchain {

Mat3 SkewSym3::matrix() const {
  Mat3 m;
  // clang-format off
  m <<        0.0, -omega_.z(),  omega_.y(),
       omega_.z(),         0.0, -omega_.x(),
      -omega_.y(),  omega_.x(),         0.0;
  // clang-format on
  return m;
}

Rotation3 Rotation3::from_matrix(const Mat3& m) {
  if (!m.allFinite()) throw std::invalid_argument("rotation matrix has non-finite entries");
  auto r = from_matrix_unchecked(m);
  if (r.orthonormality_defect() > kOrthonormalityTol) {
    throw std::invalid_argument("matrix is not orthonormal");
  }
  if (std::abs(r.determinant() - 1.0) > kOrthonormalityTol) {
    throw std::invalid_argument("matrix is not a proper rotation (det != +1)");
  }
  return r;
}

double Rotation3::orthonormality_defect() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

UnitVec3 UnitVec3::from(const Vec3& v) {
  if (!v.allFinite() || std::abs(v.norm() - 1.0) > kNormTol) {
    throw std::invalid_argument("vector is not of unit length");
  }
  return UnitVec3(v);
}

UnitVec3 UnitVec3::normalized(const Vec3& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
  return UnitVec3(v / n);
}

SkewSym3 hat(const Vec3& v) {
  if (!v.allFinite()) throw std::invalid_argument("hat: non-finite coefficients");
  return SkewSym3(v);
}

Rotation3 exp_rodrigues(const SkewSym3& s) {
  const Vec3& w = s.omega();
  const double t2 = w.squaredNorm();
  const double t = std::sqrt(t2);
  double a;  // sin(t)/t
  double b;  // (1 - cos(t))/t^2
  double c;  // cos(t)
  if (t < 1e-4) {
    a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    c = 1.0 - t2 / 2.0 + t2 * t2 / 24.0;
  } else {
    a = std::sin(t) / t;
    c = std::cos(t);
    b = (1.0 - c) / t2;
  }
  // [w]x^2 = w w^T - t^2 I, so R = cos(t) I + a [w]x + b w w^T.
  Mat3 r = b * (w * w.transpose());
  r.diagonal().array() += c;
  r(0, 1) -= a * w.z();
  r(1, 0) += a * w.z();
  r(0, 2) += a * w.y();
  r(2, 0) -= a * w.y();
  r(1, 2) -= a * w.x();
  r(2, 1) += a * w.x();
  return Rotation3::from_matrix_unchecked(r);
}

Rotation3 reorthonormalize(const Rotation3& r) {
  const Mat3& m = r.matrix();
  if (!m.allFinite()) throw NumericFailure("reorthonormalize: non-finite matrix");
  Mat3 q = m;
  constexpr double kRankTol = 1e-8;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    const double n = q.col(j).norm();
    if (n < kRankTol) throw NumericFailure("reorthonormalize: rank-deficient frame");
    q.col(j) /= n;
  }
  // A second sweep brings the residual to round-off level.
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    q.col(j).normalize();
  }
  if (q.determinant() < 0.0) throw NumericFailure("reorthonormalize: orientation-reversing frame");
  return Rotation3::from_matrix_unchecked(q);
}

Rotation3 axis_angle(const Vec3& axis, double angle) {
  return exp_rodrigues(hat(axis.normalized() * angle));
}

}  // namespace wormchain
