#pragma once

#include <Eigen/Dense>
#include <functional>

#include "dcl/errors.hpp"
#include "dcl/groupoid.hpp"

namespace dcl {

struct NewtonOptions {
  int max_iter = 50;
  double tol = 1e-10;
  int max_halvings = 8;
  double cond_limit = 1e12;
};

struct NewtonResult {
  Vec x;
  double residual = 0.0;
  int iterations = 0;
  double condition = 0.0;
};

/// Central-difference Jacobian of a vector residual.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x) {
  const double d = fd_step(x);
  const int n = static_cast<int>(x.size());
  Vec xp = x, xm = x;
  Mat j;
  for (int k = 0; k < n; ++k) {
    xp(k) += d;
    xm(k) -= d;
    const Vec col = (f(xp) - f(xm)) / (2.0 * d);
    if (j.size() == 0) j.resize(col.size(), n);
    j.col(k) = col;
    xp(k) = x(k);
    xm(k) = x(k);
  }
  return j;
}

/// Damped Newton with half-step backtracking. Throws RegularityError when the
/// Jacobian condition number exceeds the limit, SolverError on
/// non-convergence.
inline NewtonResult newton_solve(const std::function<Vec(const Vec&)>& f,
                                 const Vec& x0,
                                 const NewtonOptions& opt = {}) {
  NewtonResult res;
  res.x = x0;
  Vec r = f(res.x);
  res.residual = r.norm();
  for (int it = 0; it < opt.max_iter; ++it) {
    if (res.residual < opt.tol) {
      res.iterations = it;
      return res;
    }
    const Mat j = fd_jacobian(f, res.x);
    Eigen::JacobiSVD<Mat> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smax = svd.singularValues()(0);
    const double smin = svd.singularValues()(svd.singularValues().size() - 1);
    res.condition = smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity();
    if (!(res.condition < opt.cond_limit))
      throw RegularityError("newton: Jacobian condition " +
                            std::to_string(res.condition) +
                            " exceeds limit; system not regular here");
    const Vec dx = svd.solve(r);
    double s = 1.0;
    Vec x_new = res.x - dx;
    Vec r_new = f(x_new);
    for (int halving = 0;
         halving < opt.max_halvings && !(r_new.norm() < res.residual);
         ++halving) {
      s *= 0.5;
      x_new = res.x - s * dx;
      r_new = f(x_new);
    }
    res.x = x_new;
    r = r_new;
    res.residual = r.norm();
    res.iterations = it + 1;
  }
  if (res.residual < opt.tol) return res;
  throw SolverError("newton: no convergence after " +
                    std::to_string(opt.max_iter) +
                    " iterations, residual " + std::to_string(res.residual));
}

}  // namespace dcl
