#pragma once

#include <Eigen/Dense>
#include <functional>

#include "dcl/groupoid.hpp"
#include "dcl/so3.hpp"

namespace dcl {

/// Pair groupoid on R^n: elements (q0, q1), source q0, target q1,
/// (a,b)(b,c) = (a,c).
inline GroupoidModel pair_groupoid(int n) {
  GroupoidModel m;
  m.dim_g = 2 * n;
  m.dim_q = n;
  m.source = [n](const Vec& g) { return Vec(g.head(n)); };
  m.target = [n](const Vec& g) { return Vec(g.tail(n)); };
  m.multiply = [n](const Vec& g, const Vec& h) {
    Vec r(2 * n);
    r.head(n) = g.head(n);
    r.tail(n) = h.tail(n);
    return r;
  };
  m.invert = [n](const Vec& g) {
    Vec r(2 * n);
    r.head(n) = g.tail(n);
    r.tail(n) = g.head(n);
    return r;
  };
  m.identity_section = [n](const Vec& q) {
    Vec r(2 * n);
    r.head(n) = q;
    r.tail(n) = q;
    return r;
  };
  m.fiber_chart = [n](const Vec& q, const Vec& u) {
    Vec r(2 * n);
    r.head(n) = q;
    r.tail(n) = q + u;
    return r;
  };
  m.left_tangent = [n](const Vec&, const Vec& v) {
    Vec r = Vec::Zero(2 * n);
    r.tail(n) = v.tail(n);
    return r;
  };
  m.right_tangent = [n](const Vec&, const Vec& v) {
    Vec r = Vec::Zero(2 * n);
    r.head(n) = -v.tail(n);
    return r;
  };
  return m;
}

inline AlgebroidBasis pair_basis(int n) {
  AlgebroidBasis b;
  b.n_a = n;
  b.basis_at = [n](const Vec&) {
    Mat m = Mat::Zero(2 * n, n);
    m.bottomRows(n).setIdentity();
    return m;
  };
  return b;
}

/// SO(3) as a groupoid over a point; elements are the 9 row-major matrix
/// entries, the fiber chart is a retraction from R^3.
inline GroupoidModel so3_group(so3::Retraction ret = {}) {
  GroupoidModel m;
  m.dim_g = 9;
  m.dim_q = 0;
  m.chart_dim = 3;
  m.source = [](const Vec&) { return Vec(0); };
  m.target = [](const Vec&) { return Vec(0); };
  m.multiply = [](const Vec& g, const Vec& h) {
    return so3::flatten(so3::unflatten(g) * so3::unflatten(h));
  };
  m.invert = [](const Vec& g) {
    return so3::flatten(so3::unflatten(g).transpose());
  };
  m.identity_section = [](const Vec&) {
    return so3::flatten(so3::Mat3::Identity());
  };
  m.fiber_chart = [ret](const Vec&, const Vec& u) {
    return so3::flatten(ret.tau(u));
  };
  m.left_tangent = [](const Vec& g, const Vec& v) {
    return so3::flatten(so3::unflatten(g) * so3::unflatten(v));
  };
  m.right_tangent = [](const Vec& g, const Vec& v) {
    return so3::flatten(so3::unflatten(v) * so3::unflatten(g));
  };
  return m;
}

inline AlgebroidBasis so3_basis() {
  AlgebroidBasis b;
  b.n_a = 3;
  b.basis_at = [](const Vec&) {
    Mat m(9, 3);
    for (int i = 0; i < 3; ++i)
      m.col(i) = so3::flatten(so3::hat(so3::Vec3::Unit(i)));
    return m;
  };
  return b;
}

/// Rolling-sphere groupoid R^2 x R^2 x SO(3) over R^2. Element layout:
/// (x0, y0, x1, y1, R row-major), 13 coordinates.
inline GroupoidModel plate_ball_groupoid() {
  GroupoidModel m;
  m.dim_g = 13;
  m.dim_q = 2;
  m.chart_dim = 5;
  m.source = [](const Vec& g) { return Vec(g.head(2)); };
  m.target = [](const Vec& g) { return Vec(g.segment(2, 2)); };
  m.multiply = [](const Vec& g, const Vec& h) {
    Vec r(13);
    r.head(2) = g.head(2);
    r.segment(2, 2) = h.segment(2, 2);
    r.tail(9) = so3::flatten(so3::unflatten(g.tail(9)) *
                             so3::unflatten(h.tail(9)));
    return r;
  };
  m.invert = [](const Vec& g) {
    Vec r(13);
    r.head(2) = g.segment(2, 2);
    r.segment(2, 2) = g.head(2);
    r.tail(9) = so3::flatten(so3::unflatten(g.tail(9)).transpose());
    return r;
  };
  m.identity_section = [](const Vec& q) {
    Vec r(13);
    r.head(2) = q;
    r.segment(2, 2) = q;
    r.tail(9) = so3::flatten(so3::Mat3::Identity());
    return r;
  };
  m.fiber_chart = [](const Vec& q, const Vec& u) {
    Vec r(13);
    r.head(2) = q;
    r.segment(2, 2) = q + u.head(2);
    r.tail(9) = so3::flatten(so3::cay(u.tail(3)));
    return r;
  };
  m.left_tangent = [](const Vec& g, const Vec& v) {
    Vec r = Vec::Zero(13);
    r.segment(2, 2) = v.segment(2, 2);
    r.tail(9) = so3::flatten(so3::unflatten(g.tail(9)) *
                             so3::unflatten(v.tail(9)));
    return r;
  };
  m.right_tangent = [](const Vec& g, const Vec& v) {
    Vec r = Vec::Zero(13);
    r.head(2) = -v.segment(2, 2);
    r.tail(9) = so3::flatten(so3::unflatten(v.tail(9)) *
                             so3::unflatten(g.tail(9)));
    return r;
  };
  return m;
}

inline AlgebroidBasis plate_ball_basis() {
  AlgebroidBasis b;
  b.n_a = 5;
  b.basis_at = [](const Vec&) {
    Mat m = Mat::Zero(13, 5);
    m(2, 0) = 1.0;
    m(3, 1) = 1.0;
    for (int i = 0; i < 3; ++i)
      m.col(2 + i).tail(9) = so3::flatten(so3::hat(so3::Vec3::Unit(i)));
    return m;
  };
  return b;
}

/// Time-extended groupoid R x R x G over R x Q. Element layout:
/// (t0, t1, inner element).
inline GroupoidModel time_extended_model(const GroupoidModel& inner) {
  const int ng = inner.dim_g;
  const int nq = inner.dim_q;
  GroupoidModel m;
  m.dim_g = 2 + ng;
  m.dim_q = 1 + nq;
  m.chart_dim = 1 + inner.fiber_dim();
  m.source = [inner, ng](const Vec& g) {
    Vec q(1 + inner.dim_q);
    q(0) = g(0);
    q.tail(inner.dim_q) = inner.source(Vec(g.tail(ng)));
    return q;
  };
  m.target = [inner, ng](const Vec& g) {
    Vec q(1 + inner.dim_q);
    q(0) = g(1);
    q.tail(inner.dim_q) = inner.target(Vec(g.tail(ng)));
    return q;
  };
  m.multiply = [inner, ng](const Vec& g, const Vec& h) {
    Vec r(2 + ng);
    r(0) = g(0);
    r(1) = h(1);
    r.tail(ng) = inner.multiply(Vec(g.tail(ng)), Vec(h.tail(ng)));
    return r;
  };
  m.invert = [inner, ng](const Vec& g) {
    Vec r(2 + ng);
    r(0) = g(1);
    r(1) = g(0);
    r.tail(ng) = inner.invert(Vec(g.tail(ng)));
    return r;
  };
  m.identity_section = [inner, nq, ng](const Vec& q) {
    Vec r(2 + ng);
    r(0) = q(0);
    r(1) = q(0);
    r.tail(ng) = inner.identity_section(Vec(q.tail(nq)));
    return r;
  };
  m.fiber_chart = [inner, nq, ng](const Vec& q, const Vec& u) {
    Vec r(2 + ng);
    r(0) = q(0);
    r(1) = q(0) + u(0);
    r.tail(ng) = inner.fiber_chart(Vec(q.tail(nq)),
                                   Vec(u.tail(u.size() - 1)));
    return r;
  };
  if (inner.left_tangent) {
    m.left_tangent = [inner, ng](const Vec& g, const Vec& v) {
      Vec r(2 + ng);
      r(0) = 0.0;
      r(1) = v(1);
      r.tail(ng) = inner.left_tangent(Vec(g.tail(ng)), Vec(v.tail(ng)));
      return r;
    };
    m.right_tangent = [inner, ng](const Vec& g, const Vec& v) {
      Vec r(2 + ng);
      r(0) = -v(1);
      r(1) = 0.0;
      r.tail(ng) = inner.right_tangent(Vec(g.tail(ng)), Vec(v.tail(ng)));
      return r;
    };
  }
  return m;
}

inline AlgebroidBasis time_extended_basis(const AlgebroidBasis& inner,
                                          int inner_dim_g) {
  AlgebroidBasis b;
  b.n_a = 1 + inner.n_a;
  const int na = inner.n_a;
  b.basis_at = [inner, inner_dim_g, na](const Vec& q) {
    Mat m = Mat::Zero(2 + inner_dim_g, 1 + na);
    m(1, 0) = 1.0;  // time section: moves t1 only
    m.block(2, 1, inner_dim_g, na) =
        inner.basis_at(Vec(q.tail(q.size() - 1)));
    return m;
  };
  return b;
}

}  // namespace dcl
