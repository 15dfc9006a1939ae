#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "dcl/errors.hpp"

namespace dcl::so3 {

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

inline Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
      -w.y(), w.x(), 0.0;
  return m;
}

/// vee of the antisymmetric part; no symmetry check.
inline Vec3 vee_skew(const Mat3& m) {
  Mat3 a = 0.5 * (m - m.transpose());
  return Vec3(a(2, 1), a(0, 2), a(1, 0));
}

inline Vec3 vee(const Mat3& m) {
  if ((m + m.transpose()).norm() > 1e-8 * (1.0 + m.norm()))
    throw DomainError("vee: input is not antisymmetric");
  return vee_skew(m);
}

/// Rodrigues formula.
inline Mat3 expm(const Vec3& w) {
  const double th = w.norm();
  const Mat3 k = hat(w);
  if (th < 1e-12) return Mat3::Identity() + k + 0.5 * k * k;
  const double a = std::sin(th) / th;
  const double b = (1.0 - std::cos(th)) / (th * th);
  return Mat3::Identity() + a * k + b * k * k;
}

/// Inverse of expm for rotation angle < pi.
inline Vec3 logm(const Mat3& r) {
  const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double th = std::acos(c);
  if (th >= M_PI - 1e-6)
    throw DomainError("logm: rotation angle too close to pi");
  if (th < 1e-12) return vee_skew(r);  // r ~ I + hat(w)
  return th / (2.0 * std::sin(th)) * vee_skew(r - r.transpose());
}

inline Mat3 cay(const Vec3& w) {
  const Mat3 k = hat(w);
  const Mat3 a = Mat3::Identity() - 0.5 * k;
  if (std::abs(a.determinant()) < 1e-14)
    throw DomainError("cay: I - xi/2 is singular");
  return a.inverse() * (Mat3::Identity() + 0.5 * k);
}

inline Vec3 cay_inv(const Mat3& r) {
  const Mat3 a = r + Mat3::Identity();
  if (std::abs(a.determinant()) < 1e-14)
    throw DomainError("cay_inv: R + I is singular");
  return vee_skew(2.0 * (r - Mat3::Identity()) * a.inverse());
}

/// Derivative of cay_inv (as a matrix map, before vee) along dA at A.
inline Mat3 cay_inv_diff(const Mat3& a, const Mat3& da) {
  const Mat3 p = (a + Mat3::Identity()).inverse();
  return 2.0 * (da * p - (a - Mat3::Identity()) * p * da * p);
}

enum class RetractionKind { Exp, Cay };

/// Local diffeomorphism tau: so(3) -> SO(3) together with its
/// right-trivialized inverse tangent dtau^{-1}: for a curve xi(t),
/// d/dt tau(xi) = hat(dtau_xi(xi')) tau(xi), and dtau_inv inverts dtau_xi.
struct Retraction {
  RetractionKind kind = RetractionKind::Cay;

  Mat3 tau(const Vec3& xi) const {
    return kind == RetractionKind::Exp ? expm(xi) : cay(xi);
  }

  Vec3 tau_inv(const Mat3& g) const {
    return kind == RetractionKind::Exp ? logm(g) : cay_inv(g);
  }

  /// Matrix of dtau^{-1}_xi acting on coordinates: eta |-> dtau^{-1}_xi(eta).
  Mat3 dtau_inv(const Vec3& xi) const {
    if (kind == RetractionKind::Cay) {
      const Mat3 k = hat(xi);
      Mat3 m;
      for (int i = 0; i < 3; ++i) {
        const Mat3 e = hat(Vec3::Unit(i));
        m.col(i) = vee_skew((Mat3::Identity() - 0.5 * k) * e *
                            (Mat3::Identity() + 0.5 * k));
      }
      return m;
    }
    // dexp^{-1}_xi = sum_n B_n/n! ad_xi^n with B_1 = -1/2; ad_xi = hat(xi).
    // Truncated at order 8, valid for |xi| < 1.
    static const double coeff[] = {1.0,        -0.5,  1.0 / 12.0, 0.0,
                                   -1.0 / 720.0, 0.0, 1.0 / 30240.0, 0.0,
                                   -1.0 / 1209600.0};
    const Mat3 ad = hat(xi);
    Mat3 term = Mat3::Identity();
    Mat3 m = Mat3::Zero();
    for (int n = 0; n <= 8; ++n) {
      if (coeff[n] != 0.0) m += coeff[n] * term;
      term = ad * term;
    }
    return m;
  }

  Vec3 dtau_inv_apply(const Vec3& xi, const Vec3& eta) const {
    return dtau_inv(xi) * eta;
  }
};

/// Coadjoint action in coordinates: <Ad*_g mu, xi> = <mu, g xi g^-1>.
inline Vec3 coadjoint(const Mat3& g, const Vec3& mu) {
  Mat3 ad;
  for (int i = 0; i < 3; ++i)
    ad.col(i) = vee_skew(g * hat(Vec3::Unit(i)) * g.transpose());
  return ad.transpose() * mu;
}

inline Eigen::VectorXd flatten(const Mat3& m) {
  Eigen::VectorXd v(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) v(3 * i + j) = m(i, j);
  return v;
}

inline Mat3 unflatten(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = v(3 * i + j);
  return m;
}

}  // namespace dcl::so3
