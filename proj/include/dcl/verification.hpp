#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "dcl/errors.hpp"
#include "dcl/groupoid.hpp"
#include "dcl/system.hpp"

namespace dcl {

/// Admissible variation directions at a junction: algebroid vectors whose
/// left translate at the incoming element and right translate at the
/// outgoing element are both tangent to the admissible set.
struct VariationSpace {
  Vec q;
  Mat basis_matrix;  // n_a x dim, columns in algebroid coordinates
  int dim() const { return static_cast<int>(basis_matrix.cols()); }
};

inline VariationSpace variation_space(const ConstrainedSystem& sys,
                                      const Vec& g1, const Vec& g2) {
  const Vec q = sys.model.target(g1);
  if ((sys.model.source(g2) - q).norm() >
      1e-9 * (1.0 + g1.norm() + g2.norm()))
    throw DomainError("variation_space: elements are not composable");
  const int na = sys.basis.n_a;
  const int m = sys.n_constraints();
  VariationSpace vs;
  vs.q = q;
  if (m == 0) {
    vs.basis_matrix = Mat::Identity(na, na);
    return vs;
  }
  const Mat b = sys.basis.basis_at(q);
  Mat rows(2 * m, na);
  for (int i = 0; i < na; ++i) {
    const Vec wl = left_invariant(sys.model, q, Vec(b.col(i)), g1);
    const Vec wr = right_invariant(sys.model, q, Vec(b.col(i)), g2);
    for (int a = 0; a < m; ++a) {
      rows(a, i) = sys.constraints[a].d(g1, wl);
      rows(m + a, i) = sys.constraints[a].d(g2, wr);
    }
  }
  Eigen::JacobiSVD<Mat> svd(rows, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > 1e-8 * smax) ++rank;
  vs.basis_matrix = svd.matrixV().rightCols(na - rank);
  return vs;
}

/// Max derivative of the discrete action along unit admissible variations at
/// junction k of a trajectory (only the plain Lagrangian enters; multipliers
/// pair to zero against admissible directions).
inline double action_criticality(const ConstrainedSystem& sys,
                                 const Trajectory& tr, int k) {
  const Vec& g1 = tr.points[k].g;
  const Vec& g2 = tr.points[k + 1].g;
  const VariationSpace vs = variation_space(sys, g1, g2);
  const Vec q = vs.q;
  const Mat b = sys.basis.basis_at(q);
  double worst = 0.0;
  for (int j = 0; j < vs.dim(); ++j) {
    const Vec v = b * vs.basis_matrix.col(j);
    const Vec wl = left_invariant(sys.model, q, v, g1);
    const Vec wr = right_invariant(sys.model, q, v, g2);
    worst = std::max(
        worst, std::abs(sys.lagrangian.d(g1, wl) - sys.lagrangian.d(g2, wr)));
  }
  return worst;
}

/// Candidate symmetry: an algebroid section (coefficients against the basis)
/// together with a gauge function on the base.
struct NoetherCandidate {
  std::function<Vec(const Vec&)> coeffs;  // q -> R^{n_a}
  std::function<double(const Vec&)> f;    // gauge term on Q
};

/// Max defect of the symmetry identity
/// <F-L(p), X(alpha)> + f(alpha) = <F+L(p), X(beta)> + f(beta)
/// over the supplied points.
inline double noether_check(const ConstrainedSystem& sys,
                            const NoetherCandidate& cand,
                            const std::vector<SigmaPoint>& samples) {
  double worst = 0.0;
  for (const auto& p : samples) {
    const Covector lm = legendre_minus(sys, p);
    const Covector lp = legendre_plus(sys, p);
    const double lhs =
        lm.components.dot(cand.coeffs(lm.base)) + cand.f(lm.base);
    const double rhs =
        lp.components.dot(cand.coeffs(lp.base)) + cand.f(lp.base);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return worst;
}

/// The associated momentum; constant along solutions when the candidate
/// passes noether_check.
inline double momentum(const ConstrainedSystem& sys,
                       const NoetherCandidate& cand, const SigmaPoint& p) {
  const Covector lm = legendre_minus(sys, p);
  return lm.components.dot(cand.coeffs(lm.base)) + cand.f(lm.base);
}

/// Map between systems respecting the structure: Phi on elements, phi0 on
/// base points.
struct SystemMorphism {
  std::function<Vec(const Vec&)> phi;
  std::function<Vec(const Vec&)> phi0;
};

struct MorphismReport {
  double multiplicativity = 0.0;   // Phi(gh) vs Phi(g)Phi(h)
  double base_compat = 0.0;        // alpha' o Phi vs phi0 o alpha
  double lagrangian_match = 0.0;   // L vs L' o Phi on admissible samples
  double max() const {
    return std::max({multiplicativity, base_compat, lagrangian_match});
  }
};

/// Sample-based morphism check between a system and its image system.
inline MorphismReport check_morphism(const SystemMorphism& mor,
                                     const ConstrainedSystem& sys,
                                     const ConstrainedSystem& sys_to,
                                     const Sampler& sampler, int n,
                                     std::mt19937_64& rng) {
  MorphismReport rep;
  for (int k = 0; k < n; ++k) {
    const Vec g = sampler.element(sys.model, rng);
    const Vec h =
        sys.model.fiber_chart(sys.model.target(g), sampler.fiber(rng));
    rep.multiplicativity = std::max(
        rep.multiplicativity,
        (mor.phi(sys.model.multiply(g, h)) -
         sys_to.model.multiply(mor.phi(g), mor.phi(h)))
            .norm());
    rep.base_compat =
        std::max(rep.base_compat, (sys_to.model.source(mor.phi(g)) -
                                   mor.phi0(sys.model.source(g)))
                                      .norm());
    rep.lagrangian_match =
        std::max(rep.lagrangian_match,
                 std::abs(sys.lagrangian(g) - sys_to.lagrangian(mor.phi(g))));
  }
  return rep;
}

/// Max stepping defect of an explicitly given point sequence (used for
/// lifted trajectories under a morphism; the first n_a rows measure the
/// transform matching, the rest the constraints).
inline double trajectory_del_defect(const ConstrainedSystem& sys,
                                    const std::vector<SigmaPoint>& pts) {
  double worst = 0.0;
  for (size_t k = 0; k + 1 < pts.size(); ++k)
    worst = std::max(
        worst, del_defect_pair(sys, pts[k], pts[k + 1]).lpNorm<Eigen::Infinity>());
  return worst;
}

}  // namespace dcl
