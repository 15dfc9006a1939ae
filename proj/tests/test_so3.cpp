#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dcl/so3.hpp"

using namespace dcl;
using so3::Mat3;
using so3::Vec3;

namespace {

std::mt19937_64 rng(42);

Vec3 random_vec3(double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

/// Inverse tangent of a retraction from its defining relation, by central
/// differences: columns of dtau are vee((d/dt tau(xi + t e_i)) tau(xi)^T).
Mat3 dtau_inv_oracle(const so3::Retraction& ret, const Vec3& xi) {
  Mat3 dtau;
  const double d = 1e-6;
  for (int i = 0; i < 3; ++i) {
    const Mat3 gp = ret.tau(xi + d * Vec3::Unit(i));
    const Mat3 gm = ret.tau(xi - d * Vec3::Unit(i));
    dtau.col(i) = so3::vee_skew((gp - gm) / (2 * d) * ret.tau(xi).transpose());
  }
  return dtau.inverse();
}

}  // namespace

TEST_CASE("hat maps the basis vectors to the standard generators") {
  Mat3 e1, e3;
  e1 << 0, 0, 0, 0, 0, -1, 0, 1, 0;
  e3 << 0, -1, 0, 1, 0, 0, 0, 0, 0;
  CHECK((so3::hat(Vec3(1, 0, 0)) - e1).norm() == 0.0);
  CHECK((so3::hat(Vec3(0, 0, 1)) - e3).norm() == 0.0);
  CHECK(so3::hat(Vec3::Zero()).norm() == 0.0);
}

TEST_CASE("vee inverts hat exactly and rejects symmetric input") {
  for (int k = 0; k < 20; ++k) {
    const Vec3 w = random_vec3(2.0);
    CHECK((so3::vee(so3::hat(w)) - w).norm() == 0.0);
  }
  CHECK_THROWS_AS(so3::vee(Mat3::Identity()), DomainError);
}

TEST_CASE("exponential: identity, quarter turn, log round trip") {
  CHECK((so3::expm(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);

  Mat3 qz;
  qz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((so3::expm(Vec3(0, 0, M_PI / 2)) - qz).norm() < 1e-14);

  for (int k = 0; k < 100; ++k) {
    Vec3 w = random_vec3(1.0);
    w *= (M_PI - 1e-3) / M_PI;  // keep the angle under the branch cut
    CHECK((so3::logm(so3::expm(w)) - w).norm() < 1e-9);
  }
  CHECK_THROWS_AS(so3::logm(so3::expm(Vec3(M_PI - 1e-9, 0, 0))), DomainError);
}

TEST_CASE("expm produces rotations") {
  for (int k = 0; k < 100; ++k) {
    const Mat3 g = so3::expm(random_vec3(2.0));
    CHECK((g.transpose() * g - Mat3::Identity()).norm() < 1e-13);
    CHECK(g.determinant() == Catch::Approx(1.0).margin(1e-13));
  }
}

TEST_CASE("cayley transform: identity, quarter turn, inverse pairing") {
  CHECK((so3::cay(Vec3::Zero()) - Mat3::Identity()).norm() == 0.0);

  // (I - hat(0,0,2)/2)^{-1} (I + hat(0,0,2)/2) worked out entrywise.
  Mat3 expect;
  expect << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  CHECK((so3::cay(Vec3(0, 0, 2)) - expect).norm() < 1e-14);

  for (int k = 0; k < 100; ++k) {
    const Vec3 w = random_vec3(2.0);
    CHECK((so3::cay(w) * so3::cay(-w) - Mat3::Identity()).norm() < 1e-14);
    const Mat3 g = so3::cay(w);
    CHECK((g.transpose() * g - Mat3::Identity()).norm() < 1e-13);
    CHECK(g.determinant() == Catch::Approx(1.0).margin(1e-12));
    CHECK((so3::cay_inv(g) - w).norm() < 1e-12);
  }
}

TEST_CASE("z-rate extraction from the trace pairing") {
  for (double th : {0.1, 0.7, 1.3}) {
    const Mat3 g = so3::expm(Vec3(0, 0, th));
    const double wz = -0.5 * (g * so3::hat(Vec3(0, 0, 1))).trace();
    CHECK(wz == Catch::Approx(std::sin(th)).margin(1e-14));
  }
}

TEST_CASE("retraction inverse tangents match the defining relation") {
  for (so3::RetractionKind kind :
       {so3::RetractionKind::Exp, so3::RetractionKind::Cay}) {
    so3::Retraction ret{kind};
    CHECK((ret.dtau_inv(Vec3::Zero()) - Mat3::Identity()).norm() < 1e-9);
    for (int k = 0; k < 100; ++k) {
      const Vec3 xi = random_vec3(0.3);
      CHECK((ret.dtau_inv(xi) - dtau_inv_oracle(ret, xi)).norm() < 1e-6);
    }
  }
}

TEST_CASE("cayley inverse tangent agrees with its sandwich form") {
  for (int k = 0; k < 20; ++k) {
    const Vec3 xi = random_vec3(1.0);
    const Vec3 eta = random_vec3(1.0);
    const Mat3 x = so3::hat(xi);
    const Mat3 sandwich = (Mat3::Identity() - 0.5 * x) * so3::hat(eta) *
                          (Mat3::Identity() + 0.5 * x);
    so3::Retraction cay{so3::RetractionKind::Cay};
    CHECK((cay.dtau_inv(xi) * eta - so3::vee_skew(sandwich)).norm() < 1e-13);
    // the sandwich is exactly antisymmetric-free only up to its symmetric
    // part; the coordinate map keeps the antisymmetric part
    CHECK((cay.dtau_inv_apply(xi, eta) - cay.dtau_inv(xi) * eta).norm() ==
          0.0);
  }
}

TEST_CASE("tau(xi) tau(-xi) = identity for both retractions") {
  for (so3::RetractionKind kind :
       {so3::RetractionKind::Exp, so3::RetractionKind::Cay}) {
    so3::Retraction ret{kind};
    for (int k = 0; k < 1000; ++k) {
      const Vec3 xi = random_vec3(1.5);
      CHECK((ret.tau(xi) * ret.tau(-xi) - Mat3::Identity()).norm() < 1e-12);
    }
  }
}

TEST_CASE("tau_inv inverts tau inside the unit ball") {
  for (so3::RetractionKind kind :
       {so3::RetractionKind::Exp, so3::RetractionKind::Cay}) {
    so3::Retraction ret{kind};
    for (int k = 0; k < 200; ++k) {
      const Vec3 xi = random_vec3(0.57);  // norm < 1
      CHECK((ret.tau_inv(ret.tau(xi)) - xi).norm() < 1e-9);
    }
  }
}

TEST_CASE("coadjoint action: identity, pairing, orbit radius") {
  const Vec3 mu = random_vec3(1.0);
  CHECK((so3::coadjoint(Mat3::Identity(), mu) - mu).norm() == 0.0);
  for (int k = 0; k < 50; ++k) {
    const Mat3 g = so3::expm(random_vec3(2.0));
    const Vec3 ad = so3::coadjoint(g, mu);
    for (int i = 0; i < 3; ++i) {
      const double lhs = ad(i);
      const double rhs =
          mu.dot(so3::vee_skew(g * so3::hat(Vec3::Unit(i)) * g.transpose()));
      CHECK(lhs == Catch::Approx(rhs).margin(1e-13));
    }
    CHECK(ad.norm() == Catch::Approx(mu.norm()).margin(1e-12));
  }
}

TEST_CASE("flatten and unflatten are inverse bijections") {
  const Mat3 g = so3::expm(random_vec3(1.0));
  CHECK((so3::unflatten(so3::flatten(g)) - g).norm() == 0.0);
}
