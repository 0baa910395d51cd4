#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <stdexcept>
#include <string>

namespace wormchain {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Raised when a floating-point computation cannot produce a valid result
/// (rank-deficient frames, broken orthonormality).
class NumericFailure : public std::runtime_error {
 public:
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}
};

inline const Vec3& e1() {
  static const Vec3 v = Vec3::UnitX();
  return v;
}
inline const Vec3& e2() {
  static const Vec3 v = Vec3::UnitY();
  return v;
}
inline const Vec3& e3() {
  static const Vec3 v = Vec3::UnitZ();
  return v;
}

/// Element of so(3) stored by its axis-angle coefficients omega; represents
/// the antisymmetric matrix [omega]x with [omega]x v = omega x v.
class SkewSym3 {
 public:
  SkewSym3() : omega_(Vec3::Zero()) {}

  const Vec3& omega() const { return omega_; }
  Mat3 matrix() const;
  Vec3 apply(const Vec3& w) const { return omega_.cross(w); }

  SkewSym3 operator*(double c) const { return SkewSym3(omega_ * c); }
  SkewSym3 operator+(const SkewSym3& o) const { return SkewSym3(omega_ + o.omega_); }

 private:
  explicit SkewSym3(const Vec3& omega) : omega_(omega) {}
  friend SkewSym3 hat(const Vec3& v);

  Vec3 omega_;
};

/// Element of SO(3) as a full 3x3 matrix. Columns are the rotated frame
/// vectors (Z e1, Z e2, Z e3).
class Rotation3 {
 public:
  static constexpr double kOrthonormalityTol = 1e-8;

  Rotation3() : m_(Mat3::Identity()) {}

  static Rotation3 identity() { return Rotation3(); }

  /// Checked construction; throws std::invalid_argument when m is not a
  /// proper rotation within kOrthonormalityTol.
  static Rotation3 from_matrix(const Mat3& m);

  /// No checks. For results of operations that preserve the group by
  /// construction.
  static Rotation3 from_matrix_unchecked(const Mat3& m) {
    Rotation3 r;
    r.m_ = m;
    return r;
  }

  const Mat3& matrix() const { return m_; }
  Vec3 column(int i) const { return m_.col(i); }
  Rotation3 transpose() const { return from_matrix_unchecked(m_.transpose()); }

  /// Frobenius norm of m^T m - I.
  double orthonormality_defect() const;
  double determinant() const { return m_.determinant(); }

 private:
  Mat3 m_;
};

/// Direction on the unit sphere.
class UnitVec3 {
 public:
  static constexpr double kNormTol = 1e-10;

  UnitVec3() : v_(Vec3::UnitZ()) {}

  /// Throws std::invalid_argument if |v| is not 1 within kNormTol.
  static UnitVec3 from(const Vec3& v);
  static UnitVec3 normalized(const Vec3& v);

  const Vec3& vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  double dot(const UnitVec3& o) const { return v_.dot(o.v_); }

 private:
  explicit UnitVec3(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

/// Coefficients -> so(3). Throws std::invalid_argument on non-finite input.
SkewSym3 hat(const Vec3& v);

/// Rodrigues closed form of the matrix exponential,
///   exp([w]x) = I + sin(t)/t [w]x + (1 - cos(t))/t^2 [w]x^2,  t = |w|,
/// with a Taylor branch below t = 1e-4.
Rotation3 exp_rodrigues(const SkewSym3& s);

inline Rotation3 compose(const Rotation3& a, const Rotation3& b) {
  return Rotation3::from_matrix_unchecked(a.matrix() * b.matrix());
}

inline Vec3 apply(const Rotation3& r, const Vec3& v) { return r.matrix() * v; }

/// Modified Gram-Schmidt on the columns. Throws NumericFailure for
/// rank-deficient or orientation-reversing input.
Rotation3 reorthonormalize(const Rotation3& r);

/// Rotation by `angle` about the unit axis `axis`.
Rotation3 axis_angle(const Vec3& axis, double angle);

}  // namespace wormchain
