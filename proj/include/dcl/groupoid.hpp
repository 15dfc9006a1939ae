#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dcl/errors.hpp"

namespace dcl {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline double fd_step(const Vec& x) { return 1e-6 * std::max(1.0, x.norm()); }

/// Central difference of a vector-valued map along w at x.
template <class F>
Vec fd_directional(F&& f, const Vec& x, const Vec& w) {
  const double d = fd_step(x);
  return (f(x + d * w) - f(x - d * w)) / (2.0 * d);
}

/// Chart-level Lie groupoid over a single global chart: elements are flat
/// coordinate vectors of length dim_g, base points of length dim_q.
struct GroupoidModel {
  int dim_g = 0;
  int dim_q = 0;
  std::function<Vec(const Vec&)> source;            // alpha
  std::function<Vec(const Vec&)> target;            // beta
  std::function<Vec(const Vec&, const Vec&)> multiply;
  std::function<Vec(const Vec&)> invert;
  std::function<Vec(const Vec&)> identity_section;  // eps
  // Parametrizes the alpha-fiber over q near the identity;
  // fiber_chart(q, 0) = identity_section(q).
  std::function<Vec(const Vec&, const Vec&)> fiber_chart;

  // Optional analytic translation tangents. left_tangent(g, v) is the
  // derivative of h |-> m(g, h) at eps(target(g)) along v; right_tangent(g, v)
  // is minus the derivative of h |-> m(invert(h), g) at eps(source(g)).
  std::function<Vec(const Vec&, const Vec&)> left_tangent;
  std::function<Vec(const Vec&, const Vec&)> right_tangent;

  // Number of fiber_chart coordinates; differs from dim_g - dim_q when the
  // element coordinates are an embedding (e.g. rotation matrices).
  int chart_dim = -1;

  int fiber_dim() const { return chart_dim >= 0 ? chart_dim : dim_g - dim_q; }

  /// Multiplication with an explicit composability check.
  Vec compose(const Vec& g, const Vec& h) const {
    if ((target(g) - source(h)).norm() > 1e-9 * (1.0 + g.norm() + h.norm()))
      throw DomainError("compose: pair is not composable");
    return multiply(g, h);
  }
};

/// Basis of sections of the algebroid bundle: basis_at(q) has one column per
/// section, each tangent to the alpha-fiber at eps(q).
struct AlgebroidBasis {
  int n_a = 0;
  std::function<Mat(const Vec&)> basis_at;  // dim_g x n_a
};

/// Directional derivative of a scalar field on G, central difference unless
/// the caller supplies an analytic form elsewhere.
inline double directional_derivative(const std::function<double(const Vec&)>& f,
                                     const Vec& g, const Vec& w) {
  const double d = fd_step(g);
  const double r = (f(g + d * w) - f(g - d * w)) / (2.0 * d);
  if (!std::isfinite(r))
    throw DomainError("directional_derivative: non-finite value");
  return r;
}

/// Left-translated field value at g for an algebroid vector v based at
/// q = target(g).
inline Vec left_invariant(const GroupoidModel& model, const Vec& q,
                          const Vec& v, const Vec& g) {
  if ((model.target(g) - q).norm() > 1e-9 * (1.0 + g.norm() + q.norm()))
    throw DomainError("left_invariant: vector base does not match target(g)");
  if (model.left_tangent) return model.left_tangent(g, v);
  const Vec e = model.identity_section(q);
  return fd_directional([&](const Vec& h) { return model.multiply(g, h); }, e,
                        v);
}

/// Right-translated field value at g for an algebroid vector v based at
/// q = source(g).
inline Vec right_invariant(const GroupoidModel& model, const Vec& q,
                           const Vec& v, const Vec& g) {
  if ((model.source(g) - q).norm() > 1e-9 * (1.0 + g.norm() + q.norm()))
    throw DomainError("right_invariant: vector base does not match source(g)");
  if (model.right_tangent) return model.right_tangent(g, v);
  const Vec e = model.identity_section(q);
  return -fd_directional(
      [&](const Vec& h) { return model.multiply(model.invert(h), g); }, e, v);
}

/// Anchor matrix at q: column i is the pushforward of basis section i under
/// the target map.
inline Mat anchor(const AlgebroidBasis& basis, const GroupoidModel& model,
                  const Vec& q) {
  const Mat b = basis.basis_at(q);
  const Vec e = model.identity_section(q);
  Mat a(model.dim_q, basis.n_a);
  for (int i = 0; i < basis.n_a; ++i)
    a.col(i) = fd_directional(model.target, e, Vec(b.col(i)));
  return a;
}

/// Random element generator for a model: base points and fiber coordinates.
struct Sampler {
  std::function<Vec(std::mt19937_64&)> base;
  std::function<Vec(std::mt19937_64&)> fiber;

  Vec element(const GroupoidModel& model, std::mt19937_64& rng) const {
    return model.fiber_chart(base(rng), fiber(rng));
  }
};

inline Sampler uniform_sampler(int dim_q, int fiber_dim, double scale = 0.5) {
  Sampler s;
  s.base = [dim_q, scale](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vec q(dim_q);
    for (int i = 0; i < dim_q; ++i) q(i) = u(rng);
    return q;
  };
  s.fiber = [fiber_dim, scale](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Vec v(fiber_dim);
    for (int i = 0; i < fiber_dim; ++i) v(i) = u(rng);
    return v;
  };
  return s;
}

struct AxiomReport {
  double identity_base = 0.0;      // alpha(eps(q)) = beta(eps(q)) = q
  double left_identity = 0.0;      // eps(alpha(g)) g = g
  double right_identity = 0.0;     // g eps(beta(g)) = g
  double inverse_left = 0.0;       // g g^-1 = eps(alpha(g))
  double inverse_right = 0.0;      // g^-1 g = eps(beta(g))
  double associativity = 0.0;
  double fiber_chart_source = 0.0; // alpha(fiber_chart(q, u)) = q
  double max_residual() const {
    return std::max({identity_base, left_identity, right_identity,
                     inverse_left, inverse_right, associativity,
                     fiber_chart_source});
  }
  bool pass(double tol = 1e-10) const { return max_residual() < tol; }
};

inline AxiomReport check_axioms(const GroupoidModel& model,
                                const Sampler& sampler, int n,
                                std::mt19937_64& rng) {
  AxiomReport rep;
  for (int k = 0; k < n; ++k) {
    const Vec q = sampler.base(rng);
    const Vec e = model.identity_section(q);
    rep.identity_base = std::max(
        rep.identity_base, std::max((model.source(e) - q).norm(),
                                    (model.target(e) - q).norm()));

    const Vec u = sampler.fiber(rng);
    const Vec g = model.fiber_chart(q, u);
    rep.fiber_chart_source =
        std::max(rep.fiber_chart_source, (model.source(g) - q).norm());

    rep.left_identity = std::max(
        rep.left_identity,
        (model.multiply(model.identity_section(model.source(g)), g) - g)
            .norm());
    rep.right_identity = std::max(
        rep.right_identity,
        (model.multiply(g, model.identity_section(model.target(g))) - g)
            .norm());

    const Vec gi = model.invert(g);
    rep.inverse_left = std::max(
        rep.inverse_left,
        (model.multiply(g, gi) - model.identity_section(model.source(g)))
            .norm());
    rep.inverse_right = std::max(
        rep.inverse_right,
        (model.multiply(gi, g) - model.identity_section(model.target(g)))
            .norm());

    const Vec h = model.fiber_chart(model.target(g), sampler.fiber(rng));
    const Vec w = model.fiber_chart(model.target(h), sampler.fiber(rng));
    rep.associativity =
        std::max(rep.associativity,
                 (model.multiply(model.multiply(g, h), w) -
                  model.multiply(g, model.multiply(h, w)))
                     .norm());
  }
  return rep;
}

/// Residual of the identity Ti(v) = -v + T(eps o beta)(v) for v tangent to
/// the alpha-fiber at eps(q).
inline double tangent_inversion_check(const GroupoidModel& model, const Vec& q,
                                      const Vec& v) {
  const Vec e = model.identity_section(q);
  const Vec ti = fd_directional(model.invert, e, v);
  const Vec teb = fd_directional(
      [&](const Vec& x) { return model.identity_section(model.target(x)); }, e,
      v);
  return (ti - (-v + teb)).norm();
}

/// A local bisection through a point, given by its two sections: alpha_section
/// (maps q to the bisection point with source q) and beta_section (maps q to
/// the bisection point with target q).
struct BisectionData {
  std::function<Vec(const Vec&)> alpha_section;
  std::function<Vec(const Vec&)> beta_section;
};

/// Residual of the three-term bisection formula for the tangent map of
/// multiplication against a direct finite difference of m, for a tangent pair
/// (v_g1, v_g2) with matching base velocity.
inline double tangent_multiplication_check(const GroupoidModel& model,
                                           const Vec& g1, const Vec& g2,
                                           const BisectionData& b1,
                                           const BisectionData& b2,
                                           const Vec& v_g1, const Vec& v_g2) {
  const Vec q = model.target(g1);
  const double mismatch_tol = 1e-6 * (1.0 + g1.norm() + g2.norm());
  if ((b1.beta_section(q) - g1).norm() > mismatch_tol)
    throw DomainError("tangent_multiplication_check: B1 misses g1");
  if ((b2.alpha_section(q) - g2).norm() > mismatch_tol)
    throw DomainError("tangent_multiplication_check: B2 misses g2");

  const double d = std::max(fd_step(g1), fd_step(g2));
  const Vec lhs = (model.multiply(g1 + d * v_g1, g2 + d * v_g2) -
                   model.multiply(g1 - d * v_g1, g2 - d * v_g2)) /
                  (2.0 * d);

  // T r_{B2}(v_g1): r_{B2}(g) = g . (B2)_alpha(beta(g)).
  const Vec t1 = fd_directional(
      [&](const Vec& g) {
        return model.multiply(g, b2.alpha_section(model.target(g)));
      },
      g1, v_g1);
  // T l_{B1}(v_g2): l_{B1}(g) = (B1)_beta(alpha(g)) . g.
  const Vec t2 = fd_directional(
      [&](const Vec& g) {
        return model.multiply(b1.beta_section(model.source(g)), g);
      },
      g2, v_g2);
  // T(l_{B1} o r_{B2} o eps)(v_q) with v_q the common base velocity.
  const Vec v_q = fd_directional(model.target, g1, v_g1);
  const Vec t3 = fd_directional(
      [&](const Vec& p) {
        return model.multiply(b1.beta_section(p), b2.alpha_section(p));
      },
      q, v_q);

  return (lhs - (t1 + t2 - t3)).norm();
}

}  // namespace dcl
