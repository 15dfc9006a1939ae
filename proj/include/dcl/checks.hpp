#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "dcl/groupoid.hpp"
#include "dcl/models.hpp"
#include "dcl/so3.hpp"
#include "dcl/system.hpp"
#include "dcl/systems.hpp"
#include "dcl/verification.hpp"

namespace dcl {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

inline CheckResult make_check(const std::string& name, double measured,
                              double threshold) {
  CheckResult r;
  r.name = name;
  r.measured = measured;
  r.threshold = threshold;
  r.pass = measured < threshold;
  return r;
}

namespace suites {

struct NamedModel {
  std::string name;
  GroupoidModel model;
  Sampler sampler;
};

inline std::vector<NamedModel> bundled_models() {
  std::vector<NamedModel> ms;
  ms.push_back({"pair-r3", pair_groupoid(3), uniform_sampler(3, 3)});
  ms.push_back({"so3", so3_group(), uniform_sampler(0, 3)});
  ms.push_back({"plate-ball", plate_ball_groupoid(), uniform_sampler(2, 5)});
  ms.push_back({"time-extended",
                time_extended_model(pair_groupoid(2)),
                uniform_sampler(3, 3)});
  return ms;
}

inline std::vector<CheckResult> axioms(std::uint64_t seed, int n = 1000,
                                       double tol = 1e-10) {
  std::vector<CheckResult> out;
  for (const auto& nm : bundled_models()) {
    std::mt19937_64 rng(seed);
    const AxiomReport rep = check_axioms(nm.model, nm.sampler, n, rng);
    out.push_back(make_check("axioms/" + nm.name, rep.max_residual(), tol));
  }
  return out;
}

struct SigmaSampleSet {
  std::string name;
  ConstrainedSystem sys;
  std::vector<SigmaPoint> points;
};

/// Random points of the generated submanifold for each bundled system.
inline std::vector<SigmaSampleSet> sigma_samples(std::uint64_t seed,
                                                 int per_system) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<SigmaSampleSet> out;

  auto pair_points = [&](const ConstrainedSystem& sys, int n, int m,
                         bool pin_vertical, double h, double c) {
    std::vector<SigmaPoint> pts;
    for (int k = 0; k < per_system; ++k) {
      SigmaPoint p;
      p.g.resize(2 * n);
      for (int i = 0; i < 2 * n; ++i) p.g(i) = u(rng);
      if (pin_vertical) p.g(2 * n - 1) = p.g(n - 1) + c * h;
      p.lambda.resize(m);
      for (int i = 0; i < m; ++i) p.lambda(i) = u(rng);
      pts.push_back(p);
    }
    return pts;
  };

  {
    SigmaSampleSet s;
    s.name = "free-particle";
    s.sys = free_particle_system(2, 0.1);
    s.points = pair_points(s.sys, 2, 0, false, 0.1, 0.0);
    out.push_back(std::move(s));
  }
  {
    SigmaSampleSet s;
    s.name = "harmonic";
    s.sys = harmonic_oscillator_system(0.1);
    s.points = pair_points(s.sys, 1, 0, false, 0.1, 0.0);
    out.push_back(std::move(s));
  }
  {
    SigmaSampleSet s;
    s.name = "degenerate";
    s.sys = degenerate_system();
    s.points = pair_points(s.sys, 1, 0, false, 0.1, 0.0);
    out.push_back(std::move(s));
  }
  {
    SigmaSampleSet s;
    s.name = "constrained-translation";
    s.sys = constrained_translation_system(0.1, 0.3);
    s.points = pair_points(s.sys, 2, 1, true, 0.1, 0.3);
    out.push_back(std::move(s));
  }
  {
    SigmaSampleSet s;
    s.name = "plate-ball";
    PlateBallConfig cfg;
    cfg.r = 1.0;
    cfg.Omega = 0.5;
    cfg.c = 0.2;
    cfg.h = 0.1;
    s.sys = plate_ball_system(cfg);
    for (int k = 0; k < per_system; ++k) {
      SigmaPoint p = plate_ball_initial(cfg, u(rng), u(rng), u(rng), u(rng));
      for (int i = 0; i < 3; ++i) p.lambda(i) = u(rng);
      s.points.push_back(p);
    }
    out.push_back(std::move(s));
  }
  return out;
}

/// Kernel-dimension equality of the two transforms at sampled points.
inline std::vector<CheckResult> regularity(std::uint64_t seed,
                                           int per_system = 200) {
  std::vector<CheckResult> out;
  for (const auto& set : sigma_samples(seed, per_system)) {
    int mismatches = 0;
    int expected_ker = set.name == "degenerate" ? 1 : 0;
    bool ker_as_expected = true;
    for (const auto& p : set.points) {
      const RegularityReport rep = regularity_report(set.sys, p);
      if (rep.ker_dim_minus != rep.ker_dim_plus) ++mismatches;
      if (set.name == "degenerate" && rep.ker_dim_minus != expected_ker)
        ker_as_expected = false;
    }
    CheckResult r = make_check("regularity/kernel-equality/" + set.name,
                               static_cast<double>(mismatches), 0.5);
    r.note = std::to_string(set.points.size()) + " points";
    out.push_back(r);
    if (set.name == "degenerate") {
      CheckResult d = make_check("regularity/degenerate-kernel-dim",
                                 ker_as_expected ? 0.0 : 1.0, 0.5);
      out.push_back(d);
    }
  }
  return out;
}

inline std::vector<CheckResult> noether(std::uint64_t seed, int steps = 100,
                                        double tol = 1e-8) {
  std::vector<CheckResult> out;
  const double h = 0.1;
  ConstrainedSystem sys = constrained_translation_system(h, 0.3);

  NoetherCandidate trans;
  trans.coeffs = [](const Vec&) {
    Vec c(2);
    c << 1.0, 0.0;
    return c;
  };
  trans.f = [](const Vec&) { return 0.0; };

  std::vector<SigmaPoint> samples;
  {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int k = 0; k < 50; ++k) {
      SigmaPoint p;
      p.g.resize(4);
      for (int i = 0; i < 4; ++i) p.g(i) = u(rng);
      p.g(3) = p.g(1) + 0.3 * h;
      p.lambda.resize(1);
      p.lambda(0) = u(rng);
      samples.push_back(p);
    }
  }
  out.push_back(make_check("noether/symmetry-defect",
                           noether_check(sys, trans, samples), tol));

  SigmaPoint p0;
  p0.g.resize(4);
  p0.g << 0.0, 0.0, 0.05, 0.03;
  p0.lambda = Vec::Zero(1);
  const Trajectory tr = run(sys, p0, steps + 1);
  const double f0 = momentum(sys, trans, tr.points[0]);
  double drift = 0.0;
  for (const auto& p : tr.points)
    drift = std::max(drift, std::abs(momentum(sys, trans, p) - f0));
  out.push_back(make_check("noether/momentum-drift", drift, tol));

  // Negative control: translation is not a symmetry of the oscillator.
  ConstrainedSystem osc = harmonic_oscillator_system(h);
  NoetherCandidate bad;
  bad.coeffs = [](const Vec&) {
    Vec c(1);
    c << 1.0;
    return c;
  };
  bad.f = [](const Vec&) { return 0.0; };
  std::vector<SigmaPoint> osc_samples;
  {
    SigmaPoint p;
    p.g.resize(2);
    p.g << 0.7, 0.8;
    p.lambda.resize(0);
    osc_samples.push_back(p);
  }
  const double bad_defect = noether_check(osc, bad, osc_samples);
  CheckResult neg = make_check("noether/negative-control", 1e-3, bad_defect);
  neg.note = "defect " + std::to_string(bad_defect) + " expected > 1e-3";
  out.push_back(neg);
  return out;
}

inline std::vector<CheckResult> variational(std::uint64_t seed,
                                            double tol = 1e-8) {
  (void)seed;
  std::vector<CheckResult> out;
  const double h = 0.1;

  auto check_traj = [&](const std::string& name, const ConstrainedSystem& sys,
                        const SigmaPoint& p0, int n) {
    const Trajectory tr = run(sys, p0, n);
    double worst = 0.0;
    for (int k = 0; k + 1 < static_cast<int>(tr.points.size()); ++k)
      worst = std::max(worst, action_criticality(sys, tr, k));
    out.push_back(make_check("variational/" + name, worst, tol));
    return tr;
  };

  {
    SigmaPoint p0;
    p0.g.resize(4);
    p0.g << 0.0, 0.0, 0.07, -0.02;
    p0.lambda.resize(0);
    Trajectory tr = check_traj("free-particle", free_particle_system(2, h),
                               p0, 20);
    // Negative control: shift one interior point consistently in both
    // adjacent elements.
    ConstrainedSystem sys = free_particle_system(2, h);
    tr.points[5].g(2) += 1e-3;
    tr.points[6].g(0) += 1e-3;
    const double defect = action_criticality(sys, tr, 5);
    CheckResult neg =
        make_check("variational/perturbation-control", 1e-5, defect);
    neg.note = "defect " + std::to_string(defect) + " expected > 1e-5";
    out.push_back(neg);
  }
  {
    SigmaPoint p0;
    p0.g.resize(2);
    p0.g << 0.3, 0.32;
    p0.lambda.resize(0);
    check_traj("harmonic", harmonic_oscillator_system(h), p0, 20);
  }
  {
    SigmaPoint p0;
    p0.g.resize(4);
    p0.g << 0.0, 0.0, 0.05, 0.3 * h;
    p0.lambda = Vec::Zero(1);
    check_traj("constrained-translation",
               constrained_translation_system(h, 0.3), p0, 20);
  }
  {
    PlateBallConfig cfg;
    cfg.Omega = 0.4;
    cfg.c = 0.1;
    cfg.h = 0.1;
    check_traj("plate-ball", plate_ball_system(cfg),
               plate_ball_initial(cfg, 0.1, -0.2, 0.3, 0.2), 20);
  }
  return out;
}

inline std::vector<CheckResult> reduction(std::uint64_t seed,
                                          double tol = 1e-9) {
  std::vector<CheckResult> out;
  const double h = 0.1;
  ConstrainedSystem inner = constrained_translation_system(h, 0.3);
  ConstrainedSystem full = time_extended_fixed(inner, h);

  SigmaPoint p0;
  p0.g.resize(4);
  p0.g << 0.0, 0.0, 0.05, 0.3 * h;
  p0.lambda = Vec::Zero(1);
  const Trajectory reduced = run(inner, p0, 101);

  // Lift: prepend the fixed time grid, transport inner multipliers, zero
  // time multiplier.
  std::vector<SigmaPoint> lifted;
  for (size_t k = 0; k < reduced.points.size(); ++k) {
    SigmaPoint p;
    p.g.resize(6);
    p.g(0) = static_cast<double>(k) * h;
    p.g(1) = static_cast<double>(k + 1) * h;
    p.g.tail(4) = reduced.points[k].g;
    p.lambda.resize(2);
    p.lambda(0) = reduced.points[k].lambda(0);
    p.lambda(1) = 0.0;
    lifted.push_back(p);
  }
  out.push_back(make_check("reduction/lift-residual",
                           trajectory_del_defect(full, lifted), tol));

  SystemMorphism proj;
  proj.phi = [](const Vec& g) { return Vec(g.tail(4)); };
  proj.phi0 = [](const Vec& q) { return Vec(q.tail(2)); };
  std::mt19937_64 rng(seed);
  const MorphismReport rep =
      check_morphism(proj, full, inner, uniform_sampler(3, 3), 1000, rng);
  out.push_back(make_check("reduction/morphism-defect", rep.max(), 1e-10));
  return out;
}

inline std::vector<CheckResult> identities(std::uint64_t seed) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);

  // Tangent inversion on every bundled model, algebroid vectors via the
  // fiber chart.
  for (const auto& nm : bundled_models()) {
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      const Vec q = nm.sampler.base(rng);
      const Vec e = nm.model.identity_section(q);
      const Vec du = nm.sampler.fiber(rng);
      const Vec v = fd_directional(
          [&](const Vec& t) {
            return nm.model.fiber_chart(q, Vec(t(0) * du));
          },
          Vec::Zero(1), Vec::Ones(1));
      worst = std::max(worst, tangent_inversion_check(nm.model, q, v));
      (void)e;
    }
    out.push_back(
        make_check("identities/tangent-inversion/" + nm.name, worst, 1e-6));
  }

  // Tangent multiplication on the pair groupoid with affine bisections.
  {
    const int n = 2;
    GroupoidModel model = pair_groupoid(n);
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      Vec g1(2 * n), g2(2 * n);
      for (int i = 0; i < 2 * n; ++i) g1(i) = u(rng);
      g2.head(n) = g1.tail(n);
      for (int i = 0; i < n; ++i) g2(n + i) = u(rng);

      auto affine_bisection = [&](const Vec& g) {
        Mat a = Mat::Identity(n, n);
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) a(i, j) += 0.3 * u(rng);
        const Vec d = g.tail(n) - a * g.head(n);
        BisectionData b;
        b.alpha_section = [a, d, n](const Vec& q) {
          Vec r(2 * n);
          r.head(n) = q;
          r.tail(n) = a * q + d;
          return r;
        };
        const Mat ai = a.inverse();
        b.beta_section = [ai, d, n](const Vec& q) {
          Vec r(2 * n);
          r.head(n) = ai * (q - d);
          r.tail(n) = q;
          return r;
        };
        return b;
      };
      const BisectionData b1 = affine_bisection(g1);
      const BisectionData b2 = affine_bisection(g2);

      Vec v1(2 * n), v2(2 * n);
      for (int i = 0; i < 2 * n; ++i) v1(i) = u(rng);
      v2.head(n) = v1.tail(n);  // matching base velocity
      for (int i = 0; i < n; ++i) v2(n + i) = u(rng);
      worst = std::max(worst, tangent_multiplication_check(model, g1, g2, b1,
                                                           b2, v1, v2));
    }
    out.push_back(
        make_check("identities/tangent-multiplication/pair", worst, 1e-5));
  }

  // Tangent multiplication on SO(3); over a point a bisection is a single
  // element.
  {
    GroupoidModel model = so3_group();
    double worst = 0.0;
    for (int k = 0; k < 50; ++k) {
      so3::Vec3 a, b, wa, wb;
      for (int i = 0; i < 3; ++i) {
        a(i) = u(rng);
        b(i) = u(rng);
        wa(i) = u(rng);
        wb(i) = u(rng);
      }
      const so3::Mat3 r1 = so3::expm(a);
      const so3::Mat3 r2 = so3::expm(b);
      const Vec g1 = so3::flatten(r1);
      const Vec g2 = so3::flatten(r2);
      BisectionData b1, b2;
      b1.alpha_section = [g1](const Vec&) { return g1; };
      b1.beta_section = [g1](const Vec&) { return g1; };
      b2.alpha_section = [g2](const Vec&) { return g2; };
      b2.beta_section = [g2](const Vec&) { return g2; };
      const Vec v1 = so3::flatten(r1 * so3::hat(wa));
      const Vec v2 = so3::flatten(r2 * so3::hat(wb));
      worst = std::max(worst, tangent_multiplication_check(model, g1, g2, b1,
                                                           b2, v1, v2));
    }
    out.push_back(
        make_check("identities/tangent-multiplication/so3", worst, 1e-5));
  }

  // Retraction inverse tangents against a finite-difference oracle built
  // from the defining relation.
  for (so3::RetractionKind kind :
       {so3::RetractionKind::Exp, so3::RetractionKind::Cay}) {
    so3::Retraction ret{kind};
    double worst = 0.0;
    double inv_worst = 0.0;
    for (int k = 0; k < 100; ++k) {
      so3::Vec3 xi;
      for (int i = 0; i < 3; ++i) xi(i) = 0.6 * u(rng);
      so3::Mat3 dtau_fd;
      const double d = 1e-6;
      for (int i = 0; i < 3; ++i) {
        const so3::Mat3 gp = ret.tau(xi + d * so3::Vec3::Unit(i));
        const so3::Mat3 gm = ret.tau(xi - d * so3::Vec3::Unit(i));
        dtau_fd.col(i) =
            so3::vee_skew((gp - gm) / (2.0 * d) * ret.tau(xi).transpose());
      }
      worst = std::max(
          worst, (ret.dtau_inv(xi) - dtau_fd.inverse()).norm());
      inv_worst =
          std::max(inv_worst, (ret.tau(xi) * ret.tau(-xi) -
                               so3::Mat3::Identity())
                                  .norm());
    }
    const std::string tag =
        kind == so3::RetractionKind::Exp ? "exp" : "cay";
    out.push_back(make_check("identities/dtau-inv/" + tag, worst, 1e-6));
    out.push_back(
        make_check("identities/tau-inverse-product/" + tag, inv_worst, 1e-12));
  }
  return out;
}

inline std::vector<CheckResult> all(std::uint64_t seed) {
  std::vector<CheckResult> out;
  for (auto&& r : axioms(seed)) out.push_back(r);
  for (auto&& r : regularity(seed)) out.push_back(r);
  for (auto&& r : noether(seed)) out.push_back(r);
  for (auto&& r : variational(seed)) out.push_back(r);
  for (auto&& r : reduction(seed)) out.push_back(r);
  for (auto&& r : identities(seed)) out.push_back(r);
  return out;
}

}  // namespace suites
}  // namespace dcl
