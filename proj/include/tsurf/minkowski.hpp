#pragma once

// Linear algebra of Minkowski 4-space R^4_1 with signature (+,+,+,-),
// time coordinate last. Everything here is header-only and templated on the
// scalar type so that the same code runs for double and long double.

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <random>
#include <string_view>

#include "tsurf/error.hpp"

namespace tsurf {

template <typename Scalar>
using Vec4T = Eigen::Matrix<Scalar, 4, 1>;
template <typename Scalar>
using Mat4T = Eigen::Matrix<Scalar, 4, 4>;

using Vec4 = Vec4T<double>;
using Mat4 = Mat4T<double>;

/// The ambient metric diag(1, 1, 1, -1).
template <typename Scalar = double>
Mat4T<Scalar> minkowski_metric() {
  return Vec4T<Scalar>(1, 1, 1, -1).asDiagonal();
}

/// <a, b> = a1 b1 + a2 b2 + a3 b3 - a4 b4. Accepts any 4-element Eigen
/// expression (columns, rows of a frame matrix, blocks).
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar minkowski_dot(const Eigen::MatrixBase<DerivedA>& a,
                                        const Eigen::MatrixBase<DerivedB>& b) {
  static_assert(DerivedA::SizeAtCompileTime == 4 && DerivedB::SizeAtCompileTime == 4,
                "minkowski_dot expects 4-vectors");
  return a(0) * b(0) + a(1) * b(1) + a(2) * b(2) - a(3) * b(3);
}

template <typename Derived>
typename Derived::Scalar minkowski_square(const Eigen::MatrixBase<Derived>& a) {
  return minkowski_dot(a, a);
}

enum class CausalClass { Spacelike, Timelike, Lightlike, Zero };

constexpr std::string_view to_string(CausalClass c) {
  switch (c) {
    case CausalClass::Spacelike: return "spacelike";
    case CausalClass::Timelike: return "timelike";
    case CausalClass::Lightlike: return "lightlike";
    case CausalClass::Zero: return "zero";
  }
  return "unknown";
}

/// Zero takes precedence over Lightlike.
template <typename Derived>
CausalClass causal_class(const Eigen::MatrixBase<Derived>& a,
                         typename Derived::Scalar tol = 1e-9) {
  using std::abs;
  if (a.cwiseAbs().maxCoeff() < tol) return CausalClass::Zero;
  const auto sq = minkowski_square(a);
  if (abs(sq) < tol) return CausalClass::Lightlike;
  return sq > 0 ? CausalClass::Spacelike : CausalClass::Timelike;
}

/// Gram matrix of an exact pseudo-orthonormal frame (x, y, n1, n2):
/// <x,y> = -1, <n1,n1> = <n2,n2> = 1, everything else 0.
template <typename Scalar = double>
Mat4T<Scalar> reference_gram() {
  Mat4T<Scalar> g = Mat4T<Scalar>::Zero();
  g(0, 1) = g(1, 0) = Scalar(-1);
  g(2, 2) = g(3, 3) = Scalar(1);
  return g;
}

/// Ordered quadruple (x, y, n1, n2) stored as the rows of a 4x4 matrix, so
/// that the frame system W_u = A W is a plain matrix product.
template <typename Scalar>
struct PseudoOrthonormalFrameT {
  Mat4T<Scalar> legs = Mat4T<Scalar>::Identity();

  PseudoOrthonormalFrameT() = default;
  explicit PseudoOrthonormalFrameT(const Mat4T<Scalar>& rows) : legs(rows) {}
  PseudoOrthonormalFrameT(const Vec4T<Scalar>& x, const Vec4T<Scalar>& y,
                          const Vec4T<Scalar>& n1, const Vec4T<Scalar>& n2) {
    legs.row(0) = x.transpose();
    legs.row(1) = y.transpose();
    legs.row(2) = n1.transpose();
    legs.row(3) = n2.transpose();
  }

  Vec4T<Scalar> leg(int i) const { return legs.row(i).transpose(); }
  Vec4T<Scalar> x() const { return leg(0); }
  Vec4T<Scalar> y() const { return leg(1); }
  Vec4T<Scalar> n1() const { return leg(2); }
  Vec4T<Scalar> n2() const { return leg(3); }

  /// Entries are <leg_i, leg_j>.
  Mat4T<Scalar> gram() const { return legs * minkowski_metric<Scalar>() * legs.transpose(); }

  /// det(x, y, n1, n2); the geometric frame is oriented so that this is positive.
  Scalar orientation() const { return legs.determinant(); }
};

using Frame = PseudoOrthonormalFrameT<double>;

/// x = (1,0,0,1), y = (-1/2,0,0,1/2), n1 = e2, n2 = e3. Positively oriented.
template <typename Scalar = double>
PseudoOrthonormalFrameT<Scalar> standard_frame() {
  return {Vec4T<Scalar>(1, 0, 0, 1), Vec4T<Scalar>(Scalar(-0.5), 0, 0, Scalar(0.5)),
          Vec4T<Scalar>(0, 1, 0, 0), Vec4T<Scalar>(0, 0, 1, 0)};
}

/// max |h_i| over the ten Gram functions h_1 .. h_10.
template <typename Scalar>
Scalar frame_gram_residual(const PseudoOrthonormalFrameT<Scalar>& frame) {
  return (frame.gram() - reference_gram<Scalar>()).cwiseAbs().maxCoeff();
}

/// Projects a drifted frame back onto the pseudo-orthonormal set: normals
/// first (normalize n1, orthogonalize and normalize n2), then strip the
/// normal components from x and y, then mix x and y to kill their
/// self-products and rescale so that <x,y> = -1. Exact frames are fixed points.
template <typename Scalar>
PseudoOrthonormalFrameT<Scalar> reorthonormalize(const PseudoOrthonormalFrameT<Scalar>& frame) {
  using std::abs;
  using std::copysign;
  using std::sqrt;
  using V = Vec4T<Scalar>;

  V x = frame.x(), y = frame.y(), n1 = frame.n1(), n2 = frame.n2();

  const Scalar n1_sq = minkowski_square(n1);
  if (!(n1_sq > Scalar(0.01))) throw Error(ErrorKind::DegenerateFrame, "n1 is not spacelike");
  n1 /= sqrt(n1_sq);

  n2 -= minkowski_dot(n2, n1) * n1;
  const Scalar n2_sq = minkowski_square(n2);
  if (!(n2_sq > Scalar(0.01)))
    throw Error(ErrorKind::DegenerateFrame, "normal pair is near-collinear");
  n2 /= sqrt(n2_sq);

  x -= minkowski_dot(x, n1) * n1 + minkowski_dot(x, n2) * n2;
  y -= minkowski_dot(y, n1) * n1 + minkowski_dot(y, n2) * n2;

  const Scalar a = minkowski_square(x);
  const Scalar b = minkowski_square(y);
  const Scalar c = minkowski_dot(x, y);
  if (!(abs(c) >= Scalar(0.1)))
    throw Error(ErrorKind::DegenerateFrame, "lightlike pair has |<x,y>| < 0.1");
  const Scalar disc = c * c - a * b;
  if (!(disc > 0)) throw Error(ErrorKind::DegenerateFrame, "tangent pair is not Lorentzian");

  // alpha, beta are the small roots of b t^2 + 2 c t + a = 0 and a t^2 + 2 c t + b = 0.
  const Scalar q = -(c + copysign(sqrt(disc), c));
  const V xn = x + (a / q) * y;
  const V yn = y + (b / q) * x;

  const Scalar cross = minkowski_dot(xn, yn);
  if (!(cross < 0)) throw Error(ErrorKind::DegenerateFrame, "<x,y> has the wrong sign");
  const Scalar scale = Scalar(1) / sqrt(-cross);
  return {V(xn * scale), V(yn * scale), n1, n2};
}

/// Affine map p -> L p + t with L in O(3,1).
template <typename Scalar>
struct LorentzMotionT {
  Mat4T<Scalar> linear = Mat4T<Scalar>::Identity();
  Vec4T<Scalar> translation = Vec4T<Scalar>::Zero();

  static LorentzMotionT identity() { return {}; }
  static LorentzMotionT translation_by(const Vec4T<Scalar>& t) {
    LorentzMotionT m;
    m.translation = t;
    return m;
  }

  Vec4T<Scalar> apply_point(const Vec4T<Scalar>& p) const { return linear * p + translation; }
  Vec4T<Scalar> apply_vector(const Vec4T<Scalar>& w) const { return linear * w; }
  PseudoOrthonormalFrameT<Scalar> apply(const PseudoOrthonormalFrameT<Scalar>& f) const {
    return PseudoOrthonormalFrameT<Scalar>(Mat4T<Scalar>(f.legs * linear.transpose()));
  }

  /// (*this) o other
  LorentzMotionT compose(const LorentzMotionT& other) const {
    LorentzMotionT m;
    m.linear = linear * other.linear;
    m.translation = linear * other.translation + translation;
    return m;
  }

  LorentzMotionT inverse() const {
    LorentzMotionT m;
    m.linear = linear.inverse();
    m.translation = -(m.linear * translation);
    return m;
  }
};

using LorentzMotion = LorentzMotionT<double>;

/// max |L^T eta L - eta|; zero exactly when L preserves the Minkowski product.
template <typename Scalar>
Scalar lorentz_defect(const Mat4T<Scalar>& linear) {
  const Mat4T<Scalar> eta = minkowski_metric<Scalar>();
  return (linear.transpose() * eta * linear - eta).cwiseAbs().maxCoeff();
}

/// The motion taking the point p to q and the frame F leg-by-leg onto G.
/// With legs as columns, L Fc = Gc and Fc^{-1} = Gram^{-1} Fc^T eta, where the
/// reference Gram matrix is its own inverse.
template <typename Scalar>
LorentzMotionT<Scalar> motion_from_frames(const Vec4T<Scalar>& p,
                                          const PseudoOrthonormalFrameT<Scalar>& from,
                                          const Vec4T<Scalar>& q,
                                          const PseudoOrthonormalFrameT<Scalar>& to) {
  if (!(frame_gram_residual(from) < Scalar(1e-8)) || !(frame_gram_residual(to) < Scalar(1e-8)))
    throw Error(ErrorKind::DegenerateFrame, "motion_from_frames needs exact frames");
  LorentzMotionT<Scalar> m;
  m.linear = to.legs.transpose() * reference_gram<Scalar>() * from.legs * minkowski_metric<Scalar>();
  m.translation = q - m.linear * p;
  return m;
}

/// Proper orthochronous Lorentz transformation: a uniformly random spatial
/// rotation followed by a boost of rapidity in [-max_rapidity, max_rapidity]
/// along a random direction.
template <typename Scalar = double, typename Rng>
Mat4T<Scalar> random_lorentz(Rng& rng, Scalar max_rapidity = Scalar(1)) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);

  Eigen::Quaternion<double> quat(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  quat.normalize();
  Mat4T<Scalar> rotation = Mat4T<Scalar>::Identity();
  rotation.template topLeftCorner<3, 3>() = quat.toRotationMatrix().template cast<Scalar>();

  Eigen::Matrix<Scalar, 3, 1> dir(gauss(rng), gauss(rng), gauss(rng));
  dir.normalize();
  const Scalar rapidity = max_rapidity * Scalar(uniform(rng));
  Mat4T<Scalar> boost = Mat4T<Scalar>::Identity();
  boost.template topLeftCorner<3, 3>() += (std::cosh(rapidity) - 1) * dir * dir.transpose();
  boost.template block<3, 1>(0, 3) = std::sinh(rapidity) * dir;
  boost.template block<1, 3>(3, 0) = std::sinh(rapidity) * dir.transpose();
  boost(3, 3) = std::cosh(rapidity);
  return boost * rotation;
}

template <typename Scalar = double, typename Rng>
LorentzMotionT<Scalar> random_motion(Rng& rng, Scalar max_rapidity = Scalar(1),
                                     Scalar max_shift = Scalar(1)) {
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  LorentzMotionT<Scalar> m;
  m.linear = random_lorentz<Scalar>(rng, max_rapidity);
  for (int k = 0; k < 4; ++k) m.translation(k) = max_shift * Scalar(uniform(rng));
  return m;
}

}  // namespace tsurf
