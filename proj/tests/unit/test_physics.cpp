#include "doctest.h"

#include <vector>

#include "core/error.hpp"
#include "core/params_json.hpp"
#include "helpers.hpp"

using namespace nfloc;
using namespace nfloc::test;

TEST_CASE("coupling constant matches a scalar hand evaluation") {
  const PhysicalParams p = PhysicalParams::reference_closed_form();
  // w mu S S N N sqrt(P) / (4 pi sqrt(R R)), written out with literals.
  const double hand = (2 * kPi * 13.56e6) * (4 * kPi * 1e-7) * (0.05 * 0.035) * (0.15 * 0.10) *
                      4.0 * 50.0 * std::sqrt(0.01) / (4 * kPi * std::sqrt(4.0 * 17.0));
  CHECK(rel_err(coupling_constant(p), hand) < 1e-12);

  PhysicalParams quad = p;
  quad.transmit_power *= 4.0;
  CHECK(rel_err(coupling_constant(quad), 2.0 * coupling_constant(p)) < 1e-14);

  PhysicalParams zero_turns = p;
  zero_turns.agent.turns = 0;
  try {
    coupling_constant(zero_turns);
    FAIL("expected invalid-parameter");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidParameter);
  }
}

TEST_CASE("noise variance") {
  const PhysicalParams p = PhysicalParams::reference_closed_form();
  const double hand = 1.380649e-23 * 300.0 * std::pow(10.0, 0.8) * 500.0;
  CHECK(rel_err(noise_variance(p), hand) < 1e-12);

  PhysicalParams wide = p;
  wide.bandwidth *= 2.0;
  CHECK(rel_err(noise_variance(wide), 2.0 * noise_variance(p)) < 1e-14);

  PhysicalParams unity = p;
  unity.noise_figure = 1.0;
  CHECK(rel_err(noise_variance(unity), 1.380649e-23 * 300.0 * 500.0) < 1e-14);

  for (auto field : {&PhysicalParams::temperature, &PhysicalParams::bandwidth,
                     &PhysicalParams::noise_figure}) {
    PhysicalParams bad = p;
    bad.*field = 0.0;
    CHECK_THROWS_AS(noise_variance(bad), Error);
  }
}

TEST_CASE("dBm overrides take precedence") {
  const PhysicalParams p = PhysicalParams::reference();
  CHECK(rel_err(effective_rho(p) * effective_rho(p), dbm_to_watts(-50.4)) < 1e-12);
  CHECK(rel_err(effective_sigma2(p), dbm_to_watts(-128.8)) < 1e-12);
  const PhysicalParams cf = PhysicalParams::reference_closed_form();
  CHECK(effective_rho(cf) == coupling_constant(cf));
  CHECK(effective_sigma2(cf) == noise_variance(cf));
  CHECK(watts_to_dbm(dbm_to_watts(-42.0)) == doctest::Approx(-42.0).epsilon(1e-14));
}

TEST_CASE("params JSON round trip and validation") {
  const PhysicalParams p = PhysicalParams::reference();
  const PhysicalParams back = params_from_json(params_to_json(p));
  CHECK(back.angular_frequency == p.angular_frequency);
  CHECK(back.anchor.turns == p.anchor.turns);
  CHECK(*back.rho_squared_dbm == -50.4);
  CHECK(*back.sigma_squared_dbm == -128.8);

  auto doc = params_to_json(p);
  doc["rho_squared_dbm_override"] = nullptr;
  CHECK_FALSE(params_from_json(doc).rho_squared_dbm.has_value());

  doc["unexpected_field"] = 1;
  CHECK_THROWS_AS(params_from_json(doc), Error);
  auto neg = params_to_json(p);
  neg["bandwidth_hz"] = -5.0;
  CHECK_THROWS_AS(params_from_json(neg), Error);
}

TEST_CASE("link geometry") {
  Anchor a;
  a.position = Vec3(1, 2, 3);
  a.orientation = UnitVec3(Vec3(0, 0, 1));

  SUBCASE("on the anchor axis b = o_n") {
    const LinkGeometry g = link_geometry(Vec3(1, 2, 5), a);
    CHECK(g.distance == doctest::Approx(2.0));
    CHECK((g.scaled_field - a.orientation.vec()).norm() < 1e-15);
  }
  SUBCASE("broadside b = -o_n / 2") {
    const LinkGeometry g = link_geometry(Vec3(4, 2, 3), a);
    CHECK((g.scaled_field + 0.5 * a.orientation.vec()).norm() < 1e-15);
  }
  SUBCASE("coincident position") {
    CHECK_THROWS_AS(link_geometry(a.position, a), SingularGeometryError);
  }
  SUBCASE("random instances against the matrix form") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
      const Anchor an = random_anchor(rng);
      const Vec3 p = random_point(rng, -5, 5);
      const LinkGeometry g = link_geometry(p, an);
      const Vec3 e = (p - an.position) / (p - an.position).norm();
      const Mat3 m = 1.5 * e * e.transpose() - 0.5 * Mat3::Identity();
      CHECK((g.scaled_field - m * an.orientation.vec()).norm() < 1e-12);
      const double nb = g.scaled_field.norm();
      CHECK(nb >= 0.5 - 1e-9);
      CHECK(nb <= 1.0 + 1e-9);
    }
  }
}

TEST_CASE("signal") {
  Anchor a;
  a.position = Vec3::Zero();
  a.orientation = UnitVec3(Vec3(1, 0, 0));
  const double rho = 3.7e-4;
  const UnitVec3 coax(Vec3(1, 0, 0));

  CHECK(signal(Vec3(1, 0, 0), coax, a, rho) == doctest::Approx(rho).epsilon(1e-15));
  const double s1 = signal(Vec3(1.3, 0, 0), coax, a, rho);
  const double s2 = signal(Vec3(2.6, 0, 0), coax, a, rho);
  CHECK(s2 == doctest::Approx(s1 / 8).epsilon(1e-14));
  CHECK(ratio_to_db((s2 * s2) / (s1 * s1)) == doctest::Approx(-18.0618).epsilon(1e-5));
  CHECK(signal(Vec3(1, 0, 0), UnitVec3(Vec3(0, 1, 0)), a, rho) == 0.0);

  Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const Anchor an = random_anchor(rng);
    const Pose pose = random_pose_near(rng, an.position, 0.1);
    const double d = (pose.position - an.position).norm();
    const double s = signal(pose, an, rho);
    CHECK(std::abs(s) <= rho / (d * d * d) * (1 + 1e-12));
    // d^-3 law along a fixed ray
    const Vec3 far = an.position + 2.5 * (pose.position - an.position);
    const double s_far = signal(Pose{far, pose.orientation}, an, rho);
    CHECK(std::abs(s_far * std::pow(2.5 * d, 3) - s * d * d * d) <=
          1e-12 * std::abs(s * d * d * d) + 1e-300);
  }
}

TEST_CASE("forward model stacks the scalar signal") {
  Rng rng(5);
  std::vector<Anchor> anchors;
  for (int i = 0; i < 12; ++i) anchors.push_back(random_anchor(rng));
  const AnchorTopology topo(anchors);
  const double rho = 1e-3;
  for (int t = 0; t < 100; ++t) {
    Pose pose;
    pose.position = random_point(rng, -6, 6);
    pose.orientation = spherical_from_orientation(uniform_on_sphere(rng));
    const MeasurementVector s = forward_model(pose, topo, rho);
    for (std::size_t n = 0; n < topo.size(); ++n) {
      const double ref = signal(pose, topo[n], rho);
      CHECK(std::abs(s[static_cast<Eigen::Index>(n)] - ref) <= 1e-12 * std::abs(ref) + 1e-300);
    }
    const UnitVec3 o = orientation_from_spherical(pose.orientation);
    const MeasurementVector neg = forward_model(pose.position, -o, topo, rho);
    CHECK((neg + s).norm() <= 1e-15 * s.norm());
  }
  const AnchorTopology single({anchors[0]});
  Pose p{Vec3(9, 9, 9), {0.3, 1.1}};
  CHECK(forward_model(p, single, rho)[0] == signal(p, anchors[0], rho));

  const AnchorTopology two({anchors[0], anchors[1]});
  try {
    forward_model(Pose{anchors[1].position, {}}, two, rho);
    FAIL("expected singular geometry");
  } catch (const SingularGeometryError& e) {
    CHECK(e.anchor_index() == 1);
  }
}

TEST_CASE("mutual inductance is consistent with the signal") {
  const PhysicalParams p = PhysicalParams::reference_closed_form();
  const double rho = coupling_constant(p);
  Rng rng(19);
  for (int i = 0; i < 500; ++i) {
    const Anchor an = random_anchor(rng);
    const Pose pose = random_pose_near(rng, an.position, 0.1);
    const double m = mutual_inductance(pose, an, p);
    const double s = signal(pose, an, rho);
    CHECK(std::abs(signal_from_mutual_inductance(m, p) - s) <= 1e-12 * std::abs(s) + 1e-300);
  }
  Anchor a;
  a.orientation = UnitVec3(Vec3(0, 0, 1));
  const Pose orth{Vec3(0, 0, 1), {0.0, kPi / 2}};  // o_ag = x, b = z
  const Pose near{Vec3(0, 0, 1), {0.0, 0.0}};
  CHECK(std::abs(mutual_inductance(orth, a, p)) <= 1e-15 * std::abs(mutual_inductance(near, a, p)));
  const Pose far{Vec3(0, 0, 2), {0.0, 0.0}};
  CHECK(mutual_inductance(far, a, p) ==
        doctest::Approx(mutual_inductance(near, a, p) / 8).epsilon(1e-14));
}

TEST_CASE("spherical parametrization") {
  const UnitVec3 x = orientation_from_spherical({0.0, kPi / 2});
  CHECK((x.vec() - Vec3(1, 0, 0)).norm() < 1e-15);
  for (double phi : {0.0, 1.0, 4.0}) {
    CHECK((orientation_from_spherical({phi, 0.0}).vec() - Vec3(0, 0, 1)).norm() < 1e-15);
  }
  const SphericalOrientation pole = spherical_from_orientation(UnitVec3(Vec3(0, 0, -1)));
  CHECK(pole.phi == 0.0);
  CHECK(pole.theta == doctest::Approx(kPi));

  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const SphericalOrientation a{uniform(rng, 0, 2 * kPi), uniform(rng, 0.01, kPi - 0.01)};
    const UnitVec3 o = orientation_from_spherical(a);
    CHECK(std::abs(o.vec().norm() - 1.0) < 1e-15);
    const SphericalOrientation b = spherical_from_orientation(o);
    CHECK(std::abs(b.phi - a.phi) < 1e-9);
    CHECK(std::abs(b.theta - a.theta) < 1e-9);
    CHECK((orientation_from_spherical(b).vec() - o.vec()).norm() < 1e-12);
  }
}

TEST_CASE("canonicalize keeps the direction") {
  Rng rng(4);
  for (int i = 0; i < 500; ++i) {
    const SphericalOrientation raw{uniform(rng, -20, 20), uniform(rng, -20, 20)};
    const SphericalOrientation c = canonicalize(raw);
    CHECK(c.phi >= 0.0);
    CHECK(c.phi < 2 * kPi);
    CHECK(c.theta >= 0.0);
    CHECK(c.theta <= kPi);
    CHECK((orientation_from_spherical(raw).vec() - orientation_from_spherical(c).vec()).norm() <
          1e-12);
  }
}

TEST_CASE("unit vector invariant") {
  CHECK_THROWS_AS(UnitVec3(Vec3(1, 1, 0)), Error);
  CHECK_THROWS_AS(UnitVec3::normalized(Vec3::Zero()), Error);
  CHECK(UnitVec3::normalized(Vec3(3, 0, 4)).vec().isApprox(Vec3(0.6, 0, 0.8)));
}

TEST_CASE("alignment loss percentile") {
  const double a = alignment_loss_percentile(0.1, 200000, 42);
  CHECK(a == alignment_loss_percentile(0.1, 200000, 42));
  CHECK(a == doctest::Approx(-23.7).epsilon(1.0 / 23.7));
  const double high = alignment_loss_percentile(0.9999, 200000, 42);
  CHECK(high < 0.0);
  CHECK(high > a);
  CHECK_THROWS_AS(alignment_loss_percentile(1.0, 200000, 1), Error);
  CHECK_THROWS_AS(alignment_loss_percentile(0.1, 100, 1), Error);
}

TEST_CASE("power curve") {
  const PhysicalParams p = PhysicalParams::reference();
  const std::vector<double> d{0.5, 1.0, 2.0, 10.0, 20.0};
  const PowerCurve c = power_curve(p, d, -23.7);
  CHECK(c.points[1].coaxial_dbm == doctest::Approx(-50.4).epsilon(1e-14));
  CHECK(c.points[2].coaxial_dbm - c.points[1].coaxial_dbm ==
        doctest::Approx(-60 * std::log10(2.0)).epsilon(1e-12));
  CHECK(c.points[2].coaxial_dbm - c.points[1].coaxial_dbm == doctest::Approx(-18.06).epsilon(1e-3));
  for (const auto& pt : c.points) {
    CHECK(pt.misaligned_dbm - pt.coaxial_dbm == doctest::Approx(-23.7));
  }
  const double crossing = crossing_distance(dbm_to_watts(-50.4), dbm_to_watts(-128.8));
  CHECK(crossing == doctest::Approx(std::pow(10.0, 78.4 / 60.0)).epsilon(1e-12));
  CHECK(crossing == doctest::Approx(20.3).epsilon(0.1 / 20.3));
}
