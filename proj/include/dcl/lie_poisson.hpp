#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dcl/errors.hpp"
#include "dcl/newton.hpp"
#include "dcl/so3.hpp"

namespace dcl {

/// Scalar function on the algebra coordinates with optional analytic
/// gradient.
struct AlgebraFunction {
  std::function<double(const so3::Vec3&)> value;
  std::function<so3::Vec3(const so3::Vec3&)> grad;

  double operator()(const so3::Vec3& xi) const { return value(xi); }
  so3::Vec3 gradient(const so3::Vec3& xi) const {
    if (grad) return grad(xi);
    so3::Vec3 g;
    const double d = 1e-6 * std::max(1.0, xi.norm());
    for (int i = 0; i < 3; ++i) {
      so3::Vec3 xp = xi, xm = xi;
      xp(i) += d;
      xm(i) -= d;
      g(i) = (value(xp) - value(xm)) / (2.0 * d);
    }
    return g;
  }
};

struct LiePoissonState {
  so3::Mat3 g = so3::Mat3::Identity();  // accumulated configuration
  so3::Vec3 xi = so3::Vec3::Zero();     // body velocity
  Vec lambda;                            // multipliers, size m
};

enum class LiePoissonForm { DTauInv, CoAd };

namespace detail {

inline so3::Vec3 momentum_sum(const AlgebraFunction& l,
                              const std::vector<AlgebraFunction>& psi,
                              const so3::Vec3& xi, const Vec& lambda) {
  so3::Vec3 p = l.gradient(xi);
  for (int a = 0; a < lambda.size(); ++a)
    p += lambda(a) * psi[a].gradient(xi);
  return p;
}

/// Right-trivialized differential at e of f(tau^{-1}(.) / h) scaled by h,
/// pulled back through right translation by the arrow element: coordinates of
/// r*_a d(h f(tau^{-1}/h))(e), by central difference along the basis
/// rotations.
inline so3::Vec3 right_trivialized(const so3::Retraction& ret,
                                   const AlgebraFunction& f, double h,
                                   const so3::Mat3& arrow) {
  so3::Vec3 mu;
  const double d = 1e-6;
  for (int i = 0; i < 3; ++i) {
    const so3::Mat3 gp = so3::expm(d * so3::Vec3::Unit(i)) * arrow;
    const so3::Mat3 gm = so3::expm(-d * so3::Vec3::Unit(i)) * arrow;
    mu(i) = h * (f(ret.tau_inv(gp) / h) - f(ret.tau_inv(gm) / h)) / (2.0 * d);
  }
  return mu;
}

}  // namespace detail

/// One step of the discrete constrained dynamics on a Lie group in body
/// coordinates: solves for (xi_{k+1}, lambda_{k+1}) and advances the
/// configuration by tau(h xi_{k+1}). The two formulations are algebraically
/// equivalent; they share no code path beyond the Newton solver.
inline LiePoissonState lie_poisson_step(
    const so3::Retraction& ret, const AlgebraFunction& l,
    const std::vector<AlgebraFunction>& psi, double h,
    const LiePoissonState& s, LiePoissonForm form = LiePoissonForm::DTauInv,
    const NewtonOptions& opt = {}) {
  const int m = static_cast<int>(psi.size());
  if (s.lambda.size() != m)
    throw DomainError("lie_poisson_step: multiplier count mismatch");

  std::function<Vec(const Vec&)> residual;
  if (form == LiePoissonForm::DTauInv) {
    const so3::Vec3 rhs = ret.dtau_inv(-h * s.xi).transpose() *
                          detail::momentum_sum(l, psi, s.xi, s.lambda);
    residual = [&, rhs](const Vec& z) {
      const so3::Vec3 xn = z.head(3);
      const Vec ln = z.tail(m);
      Vec r(3 + m);
      r.head(3) = ret.dtau_inv(h * xn).transpose() *
                      detail::momentum_sum(l, psi, xn, ln) -
                  rhs;
      for (int a = 0; a < m; ++a) r(3 + a) = psi[a](xn);
      return r;
    };
  } else {
    const so3::Mat3 arrow_k = ret.tau(h * s.xi);
    so3::Vec3 rhs = detail::right_trivialized(ret, l, h, arrow_k);
    for (int a = 0; a < m; ++a)
      rhs += s.lambda(a) * detail::right_trivialized(ret, psi[a], h, arrow_k);
    rhs = so3::coadjoint(arrow_k, rhs);
    residual = [&, rhs](const Vec& z) {
      const so3::Vec3 xn = z.head(3);
      const Vec ln = z.tail(m);
      const so3::Mat3 arrow_n = ret.tau(h * so3::Vec3(xn));
      so3::Vec3 lhs = detail::right_trivialized(ret, l, h, arrow_n);
      for (int a = 0; a < m; ++a)
        lhs += ln(a) * detail::right_trivialized(ret, psi[a], h, arrow_n);
      Vec r(3 + m);
      r.head(3) = lhs - rhs;
      for (int a = 0; a < m; ++a) r(3 + a) = psi[a](xn);
      return r;
    };
  }

  Vec z0(3 + m);
  z0.head(3) = s.xi;
  z0.tail(m) = s.lambda;
  const NewtonResult nr = newton_solve(residual, z0, opt);

  LiePoissonState out;
  out.xi = nr.x.head(3);
  out.lambda = nr.x.tail(m);
  out.g = s.g * ret.tau(h * out.xi);
  return out;
}

/// Body momentum mu_k = gradient of l at xi_k mapped through (dtau^{-1}_{h
/// xi_k})*; its norm is the coadjoint orbit radius in the unconstrained case.
inline so3::Vec3 lie_poisson_momentum(const so3::Retraction& ret,
                                      const AlgebraFunction& l, double h,
                                      const so3::Vec3& xi) {
  return ret.dtau_inv(h * xi).transpose() * l.gradient(xi);
}

}  // namespace dcl
