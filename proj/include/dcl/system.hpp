#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "dcl/errors.hpp"
#include "dcl/groupoid.hpp"
#include "dcl/newton.hpp"

namespace dcl {

/// Scalar field on G with an optional analytic directional derivative.
struct ScalarField {
  std::function<double(const Vec&)> value;
  std::function<double(const Vec&, const Vec&)> dir;  // may be empty

  double operator()(const Vec& g) const { return value(g); }
  double d(const Vec& g, const Vec& w) const {
    return dir ? dir(g, w) : directional_derivative(value, g, w);
  }
};

/// Discrete Lagrangian plus constraint functions cutting out the admissible
/// submanifold N = {phi^a = 0}.
struct ConstrainedSystem {
  GroupoidModel model;
  AlgebroidBasis basis;
  ScalarField lagrangian;  // extension of L to a neighborhood of N
  std::vector<ScalarField> constraints;

  int n_constraints() const { return static_cast<int>(constraints.size()); }

  Vec phi(const Vec& g) const {
    Vec r(n_constraints());
    for (int a = 0; a < r.size(); ++a) r(a) = constraints[a](g);
    return r;
  }

  /// L-hat + lambda_a phi^a evaluated directionally.
  double extended_dir(const Vec& g, const Vec& lambda, const Vec& w) const {
    double r = lagrangian.d(g, w);
    for (int a = 0; a < lambda.size(); ++a)
      r += lambda(a) * constraints[a].d(g, w);
    return r;
  }

  double extended_value(const Vec& g, const Vec& lambda) const {
    double r = lagrangian(g);
    for (int a = 0; a < lambda.size(); ++a) r += lambda(a) * constraints[a](g);
    return r;
  }
};

/// Point of the generated Lagrangian submanifold, coordinatized by an
/// admissible element and its multipliers.
struct SigmaPoint {
  Vec g;
  Vec lambda;
};

/// Covector at a base point, expressed in the algebroid basis there.
struct Covector {
  Vec base;
  Vec components;
};

inline void require_admissible(const ConstrainedSystem& sys, const Vec& g,
                               double tol = 1e-9) {
  const Vec c = sys.phi(g);
  if (c.size() > 0 && c.lpNorm<Eigen::Infinity>() > tol)
    throw DomainError("point violates constraints by " +
                      std::to_string(c.lpNorm<Eigen::Infinity>()));
}

/// Source-side transform, no admissibility check (used off N internally).
inline Covector legendre_minus_raw(const ConstrainedSystem& sys, const Vec& g,
                                   const Vec& lambda) {
  Covector cv;
  cv.base = sys.model.source(g);
  const Mat b = sys.basis.basis_at(cv.base);
  cv.components.resize(sys.basis.n_a);
  for (int i = 0; i < sys.basis.n_a; ++i) {
    const Vec w = right_invariant(sys.model, cv.base, Vec(b.col(i)), g);
    cv.components(i) = sys.extended_dir(g, lambda, w);
  }
  return cv;
}

/// Target-side transform, no admissibility check.
inline Covector legendre_plus_raw(const ConstrainedSystem& sys, const Vec& g,
                                  const Vec& lambda) {
  Covector cv;
  cv.base = sys.model.target(g);
  const Mat b = sys.basis.basis_at(cv.base);
  cv.components.resize(sys.basis.n_a);
  for (int i = 0; i < sys.basis.n_a; ++i) {
    const Vec w = left_invariant(sys.model, cv.base, Vec(b.col(i)), g);
    cv.components(i) = sys.extended_dir(g, lambda, w);
  }
  return cv;
}

inline Covector legendre_minus(const ConstrainedSystem& sys,
                               const SigmaPoint& p) {
  require_admissible(sys, p.g);
  return legendre_minus_raw(sys, p.g, p.lambda);
}

inline Covector legendre_plus(const ConstrainedSystem& sys,
                              const SigmaPoint& p) {
  require_admissible(sys, p.g);
  return legendre_plus_raw(sys, p.g, p.lambda);
}

/// Stepping residual with the next element parametrized through the fiber
/// chart over target(g_k), so composability is structural. First n_a rows
/// match the two transforms, last m rows are the constraints at the new
/// element.
inline Vec del_residual(const ConstrainedSystem& sys, const SigmaPoint& p_k,
                        const Vec& u, const Vec& lambda_next) {
  const Vec q = sys.model.target(p_k.g);
  const Vec g_next = sys.model.fiber_chart(q, u);
  const Mat b = sys.basis.basis_at(q);
  const int na = sys.basis.n_a;
  const int m = sys.n_constraints();
  Vec r(na + m);
  for (int i = 0; i < na; ++i) {
    const Vec wl = left_invariant(sys.model, q, Vec(b.col(i)), p_k.g);
    const Vec wr = right_invariant(sys.model, q, Vec(b.col(i)), g_next);
    r(i) = sys.extended_dir(p_k.g, p_k.lambda, wl) -
           sys.extended_dir(g_next, lambda_next, wr);
  }
  for (int a = 0; a < m; ++a) r(na + a) = sys.constraints[a](g_next);
  return r;
}

/// Matching defect for an explicit consecutive pair of points.
inline Vec del_defect_pair(const ConstrainedSystem& sys, const SigmaPoint& p_k,
                           const SigmaPoint& p_next) {
  const Vec q = sys.model.target(p_k.g);
  if ((sys.model.source(p_next.g) - q).norm() >
      1e-9 * (1.0 + p_k.g.norm() + p_next.g.norm()))
    throw DomainError("del_defect_pair: points are not composable");
  const Mat b = sys.basis.basis_at(q);
  const int na = sys.basis.n_a;
  const int m = sys.n_constraints();
  Vec r(na + m);
  for (int i = 0; i < na; ++i) {
    const Vec wl = left_invariant(sys.model, q, Vec(b.col(i)), p_k.g);
    const Vec wr = right_invariant(sys.model, q, Vec(b.col(i)), p_next.g);
    r(i) = sys.extended_dir(p_k.g, p_k.lambda, wl) -
           sys.extended_dir(p_next.g, p_next.lambda, wr);
  }
  for (int a = 0; a < m; ++a) r(na + a) = sys.constraints[a](p_next.g);
  return r;
}

struct StepResult {
  SigmaPoint p;
  Vec u;  // fiber coordinates of the accepted element
  double residual = 0.0;
  int iterations = 0;
};

inline StepResult step_full(const ConstrainedSystem& sys, const SigmaPoint& p_k,
                            const Vec* guess_u = nullptr,
                            const NewtonOptions& opt = {}) {
  const int nu = sys.model.fiber_dim();
  const int m = sys.n_constraints();
  Vec z0 = Vec::Zero(nu + m);
  if (guess_u) z0.head(nu) = *guess_u;
  z0.tail(m) = p_k.lambda;
  auto f = [&](const Vec& z) {
    return del_residual(sys, p_k, Vec(z.head(nu)), Vec(z.tail(m)));
  };
  const NewtonResult nr = newton_solve(f, z0, opt);
  StepResult sr;
  sr.u = nr.x.head(nu);
  sr.p.g = sys.model.fiber_chart(sys.model.target(p_k.g), sr.u);
  sr.p.lambda = nr.x.tail(m);
  sr.residual = nr.residual;
  sr.iterations = nr.iterations;
  return sr;
}

inline SigmaPoint step(const ConstrainedSystem& sys, const SigmaPoint& p_k,
                       const Vec* guess_u = nullptr,
                       const NewtonOptions& opt = {}) {
  return step_full(sys, p_k, guess_u, opt).p;
}

struct Trajectory {
  std::vector<SigmaPoint> points;
  std::vector<double> residuals;      // one per accepted step
  std::vector<double> composability;  // base mismatch per junction
  int newton_iterations = 0;
};

/// Iterates the flow map; returns n points (n - 1 Newton solves). The guess
/// for each solve is the previous accepted increment; guess0, when given,
/// seeds the first solve (needed when zero fiber coordinates are singular,
/// e.g. a vanishing time step).
inline Trajectory run(const ConstrainedSystem& sys, const SigmaPoint& p_1,
                      int n, const NewtonOptions& opt = {},
                      const Vec* guess0 = nullptr) {
  require_admissible(sys, p_1.g);
  Trajectory tr;
  tr.points.push_back(p_1);
  Vec guess;
  if (guess0) guess = *guess0;
  for (int k = 1; k < n; ++k) {
    StepResult sr;
    try {
      sr = step_full(sys, tr.points.back(),
                     guess.size() > 0 ? &guess : nullptr, opt);
    } catch (const std::runtime_error& e) {
      throw SolverError("step " + std::to_string(k) + ": " + e.what());
    }
    tr.composability.push_back(
        (sys.model.source(sr.p.g) - sys.model.target(tr.points.back().g))
            .norm());
    tr.points.push_back(sr.p);
    tr.residuals.push_back(sr.residual);
    tr.newton_iterations += sr.iterations;
    guess = sr.u;
  }
  return tr;
}

struct RegularityReport {
  int rank_minus = 0;
  int rank_plus = 0;
  int ker_dim_minus = 0;
  int ker_dim_plus = 0;
  double cond_minus = 0.0;
  double cond_plus = 0.0;
};

namespace detail {

/// Ambient gradient of a scalar field as a row vector.
inline Vec ambient_gradient(const ScalarField& f, const Vec& g) {
  const int n = static_cast<int>(g.size());
  Vec grad(n);
  for (int k = 0; k < n; ++k) {
    const double d = fd_step(g);
    Vec gp = g, gm = g;
    gp(k) += d;
    gm(k) -= d;
    grad(k) = (f(gp) - f(gm)) / (2.0 * d);
  }
  return grad;
}

inline Vec pack(const Covector& cv) {
  Vec r(cv.base.size() + cv.components.size());
  r.head(cv.base.size()) = cv.base;
  r.tail(cv.components.size()) = cv.components;
  return r;
}

inline void svd_rank(const Mat& j, double threshold_rel, int& rank,
                     int& ker_dim, double& cond) {
  Eigen::JacobiSVD<Mat> svd(j);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > threshold_rel * smax) ++rank;
  ker_dim = static_cast<int>(j.cols()) - rank;
  const double smin = s(s.size() - 1);
  cond = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/// Jacobian analysis of both transforms in local coordinates of the
/// generated submanifold: an orthonormal kernel basis of the constraint
/// Jacobian (chart of N) plus the multiplier directions.
inline RegularityReport regularity_report(const ConstrainedSystem& sys,
                                          const SigmaPoint& p) {
  require_admissible(sys, p.g);
  const int n = sys.model.dim_g;
  const int m = sys.n_constraints();

  Mat kernel;  // columns: tangent chart of N at g
  if (m == 0) {
    kernel = Mat::Identity(n, n);
  } else {
    Mat d(m, n);
    for (int a = 0; a < m; ++a)
      d.row(a) = detail::ambient_gradient(sys.constraints[a], p.g).transpose();
    Eigen::JacobiSVD<Mat> svd(d, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s(i) > 1e-8 * s(0)) ++rank;
    kernel = svd.matrixV().rightCols(n - rank);
  }

  const int nk = static_cast<int>(kernel.cols());
  const double d = fd_step(p.g);
  Mat jm(n, nk + m), jp(n, nk + m);
  for (int i = 0; i < nk; ++i) {
    const Vec gp = p.g + d * kernel.col(i);
    const Vec gm = p.g - d * kernel.col(i);
    jm.col(i) = (detail::pack(legendre_minus_raw(sys, gp, p.lambda)) -
                 detail::pack(legendre_minus_raw(sys, gm, p.lambda))) /
                (2.0 * d);
    jp.col(i) = (detail::pack(legendre_plus_raw(sys, gp, p.lambda)) -
                 detail::pack(legendre_plus_raw(sys, gm, p.lambda))) /
                (2.0 * d);
  }
  const double dl = 1e-6 * std::max(1.0, p.lambda.norm());
  for (int a = 0; a < m; ++a) {
    Vec lp = p.lambda, lm = p.lambda;
    lp(a) += dl;
    lm(a) -= dl;
    jm.col(nk + a) = (detail::pack(legendre_minus_raw(sys, p.g, lp)) -
                      detail::pack(legendre_minus_raw(sys, p.g, lm))) /
                     (2.0 * dl);
    jp.col(nk + a) = (detail::pack(legendre_plus_raw(sys, p.g, lp)) -
                      detail::pack(legendre_plus_raw(sys, p.g, lm))) /
                     (2.0 * dl);
  }

  RegularityReport rep;
  detail::svd_rank(jm, 1e-8, rep.rank_minus, rep.ker_dim_minus,
                   rep.cond_minus);
  detail::svd_rank(jp, 1e-8, rep.rank_plus, rep.ker_dim_plus, rep.cond_plus);
  return rep;
}

}  // namespace dcl
