#include <doctest.h>

#include "phhs/flow.hpp"
#include "phhs/models.hpp"

#include <cmath>
#include <numbers>

using namespace phhs;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(int(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

CVec cv(std::initializer_list<cplx> v) {
  CVec z(int(v.size()));
  int i = 0;
  for (cplx x : v) z[i++] = x;
  return z;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("standard HHS with H = Q1 has a constant field") {
  const PhhsModel m = build_standard_hhs(1, "Q1");
  const HamiltonianFields f = assemble_phhs(m);
  CHECK(f.passed);
  const Vec a = f.X(pt({0, 0, 0, 0})), b = f.X(pt({0.5, -0.4, 0.3, 0.2}));
  CHECK((a - b).norm() < 1e-9);
  // P' = -dH/dQ = -1
  CHECK(max_abs(Vec(a - pt({0, -1, 0, 0}))) < 1e-9);
}

TEST_CASE("standard HHS for H = z_{2n}") {
  const PhhsModel m = build_standard_hhs(2, "z4");
  CHECK(m.m == 4);
  CHECK(assemble_phhs(m).passed);
}

TEST_CASE("anti-holomorphic H is rejected") {
  CHECK_THROWS_AS(build_standard_hhs(1, "conj(Q1)"), NotHolomorphic);
  CHECK_THROWS_AS(build_standard_hhs(1, "Q1 + 0.1*conj(P1)^2"), NotHolomorphic);
  CHECK_THROWS_AS(build_standard_hhs(0, "0"), DimensionError);
}

TEST_CASE("central problem closed form") {
  const auto [Q, P] = central::closed_form(1.0, 0.5, 3.0);
  CHECK(std::abs(Q - 2.0) < 1e-14);
  CHECK(std::abs(P - 0.25) < 1e-14);
  CHECK(std::abs(central::energy(1.0, 0.5)) < 1e-15);
  CHECK(std::abs(central::energy(2.0, 1.0) - (0.5 - 1.0 / 32)) < 1e-15);
}

TEST_CASE("central problem round trip of coordinates") {
  const Point p = central::to_point(cplx(1, 2), cplx(3, 4));
  CHECK(max_abs(Vec(p - pt({1, 3, 2, 4}))) == 0.0);
  const auto [Q, P] = central::from_point(p);
  CHECK(Q == cplx(1, 2));
  CHECK(P == cplx(3, 4));
}

TEST_CASE("QP = +-1/2 are separate leaves of E = 0") {
  const PhhsModel m = build_central_problem();
  const HamiltonianFields f = assemble_phhs(m);
  for (double sign : {1.0, -1.0}) {
    const Point x0 = central::to_point(1.0, sign * 0.5);
    const Point x = flow_word(f, x0, {{0.4, -0.3}, {-0.2, 0.5}});
    const auto [Q, P] = central::from_point(x);
    CHECK(std::abs(Q * P - sign * 0.5) < 1e-9);
  }
}

TEST_CASE("closed form hook matches the flow") {
  const PhhsModel m = build_central_problem();
  const HamiltonianFields f = assemble_phhs(m);
  const Point x0 = central::to_point(cplx(1.2, 0.1), cplx(0.3, -0.2));
  const Point a = tilted_flow(f, x0, 0.7, 0.5);
  CHECK((a - m.closed_form(x0, {0.0, std::polar(0.5, 0.7)})).norm() < 1e-8);
}

TEST_CASE("torus models") {
  const Lattice L = gaussian_lattice(1);
  const HamiltonianFields f = assemble_phhs(build_torus_model(L));
  const Point x0 = pt({0.2, 0.5, 0.1, -0.3});
  // H = P1: Q drifts by t, P fixed
  const HamiltonianFields g = assemble_phhs(build_torus_model(L, "P1"));
  const Point y = flow(g.X, x0, 0.7);
  CHECK(max_abs(Vec(y - pt({0.9, 0.5, 0.1, -0.3}))) < 1e-10);
  CHECK(f.passed);
  CHECK_THROWS_AS(build_torus_model(L, "Q1"), QDependence);
  CHECK_THROWS_AS(build_torus_model(L, "P1^2 + 0.1*Q1"), QDependence);
}

TEST_CASE("torus distance") {
  const Lattice L = gaussian_lattice(1);
  CHECK(torus_distance(L, cv({cplx(0.1, 0.2)}), cv({cplx(2.1, -0.8)})) < 1e-14);
  CHECK(torus_distance(L, cv({cplx(0.1, 0)}), cv({cplx(0.9, 0)})) == doctest::Approx(0.2));
}

TEST_CASE("torus orbit classification") {
  const Lattice L1 = gaussian_lattice(1);
  CHECK(classify_torus_orbit(cv({0.0}), L1, 3).kind == OrbitClass::Constant);
  const OrbitClass t = classify_torus_orbit(cv({1.0}), L1, 3);
  CHECK(t.kind == OrbitClass::Torus);
  CHECK_FALSE(t.caveat);
  REQUIRE(t.generators_found.size() == 2);
  CHECK(std::abs(t.generators_found[0] - 1.0) < 1e-12);
  CHECK(std::abs(t.generators_found[1] - cplx(0, 1)) < 1e-12);

  const OrbitClass a = classify_torus_orbit(cv({1.0, std::sqrt(2.0)}), gaussian_lattice(2), 3);
  CHECK(a.kind == OrbitClass::Aperiodic);
  CHECK(a.caveat);

  const OrbitClass c = classify_torus_orbit(cv({1.0, 0.0}), gaussian_lattice(2), 3);
  CHECK(c.kind == OrbitClass::Torus);
  // Z[i] x (Z + i sqrt2 Z): z (1, 1) lies in it only for real integers z
  Mat G = Mat::Zero(4, 4);
  G(0, 0) = 1, G(2, 1) = 1, G(1, 2) = 1, G(3, 3) = std::sqrt(2.0);
  const OrbitClass cyl = classify_torus_orbit(cv({1.0, 1.0}), Lattice{G}, 3);
  CHECK(cyl.kind == OrbitClass::Cylinder);
  CHECK(cyl.caveat);
  REQUIRE(cyl.generators_found.size() == 1);
  CHECK(std::abs(cyl.generators_found[0] - 1.0) < 1e-12);
}

TEST_CASE("classification is invariant under a unimodular basis change") {
  Lattice L = gaussian_lattice(1);
  Mat U(2, 2);
  U << 2, 1, 1, 1;  // det 1
  Lattice M{L.generators * U};
  for (const CVec &P0 : {cv({1.0}), cv({cplx(1, 1)}), cv({0.0}), cv({std::sqrt(2.0)})})
    CHECK(classify_torus_orbit(P0, L, 3).kind == classify_torus_orbit(P0, M, 3).kind);
}

TEST_CASE("proper PHHS builder") {
  const ProperPhhs p = build_proper_phhs("1", "exp(x1)", "-y1");
  const HamiltonianFields f = assemble_phhs(p.model);
  CHECK(f.passed);
  const double c = f.H_I(Point::Zero(4)) + 1;
  for (const Point &x : p.model.samples) CHECK(std::abs(f.H_I(x) - (-std::exp(-x[0]) + c)) < 1e-6);

  const ProperPhhs flat = build_proper_phhs("1", "1", "-y1");
  for (const Point &x : flat.model.samples) CHECK(max_abs(Mat(flat.model.J(x) - standard_J(2))) < 1e-15);

  CHECK_THROWS_AS(assemble_phhs(build_proper_phhs("1", "exp(x2)", "-y1").model), NonClosedForm);
  CHECK_THROWS_AS(build_proper_phhs("x1", "1", "-y1"), ZeroDenominator);
  CHECK_THROWS_AS(build_proper_phhs("1", "y2", "-y1"), ZeroDenominator);
}

TEST_CASE("rotation family") {
  const auto grid = cube_grid(4, -0.5, 0.5, 3);
  const PhhsModel zero = build_rotation_family("0");
  CHECK(max_abs(Mat(zero.J(pt({0.1, 0.2, 0.3, 0.4})) - standard_J(2))) == 0.0);
  CHECK(integrability_report(zero, grid).integrable);
  CHECK(integrability_report(build_rotation_family("0.7"), grid).integrable);
  const IntegrabilityReport r = integrability_report(build_rotation_family("x1"), grid);
  CHECK_FALSE(r.integrable);
  CHECK(r.consistent());
}

TEST_CASE("deformation with eps = 0 is the standard structure") {
  const Deformation d = build_deformation(0.0, bump(Point::Zero(8), 1.0), 2, false);
  for (const Point &p : d.model.samples) CHECK(max_abs(Mat(d.model.J(p) - standard_J(4))) == 0.0);
  CHECK(assemble_phhs(d.model).passed);
}

TEST_CASE("deformation is proper inside the bump only") {
  const Deformation d = build_deformation(0.5, bump(Point::Zero(4), 1.0), 1, true);
  const Point inside = pt({0.3, -0.2, 0.1, 0.2}), outside = pt({0.9, 0.5, 0.4, 0.1});
  const IntegrabilityReport in = integrability_report(d.model, {inside});
  const IntegrabilityReport out = integrability_report(d.model, {outside});
  CHECK_FALSE(in.integrable);
  CHECK(in.consistent());
  CHECK(out.integrable);
  CHECK(nijenhuis_rank(d.model.J, inside) == 2);
  CHECK(nijenhuis_rank(d.model.J, outside) == 0);
  // centre of the bump: df = 0
  CHECK(nijenhuis_rank(d.model.J, Point::Zero(4)) == 0);
}

TEST_CASE("d Omega_I of the deformation matches the closed formula") {
  const Deformation d = build_deformation(0.5, bump(Point::Zero(8), 1.0), 2, false);
  const TwoFormField WI = omega_I_from(d.model.omega_R, d.model.J);
  const Point p = pt({0.2, -0.1, 0.15, 0.05, 0.1, 0.2, -0.1, 0.1});
  const ThreeForm dW = exterior_derivative_2form(WI, p);
  double worst = 0, scale = 0;
  for (size_t k = 0; k < dW.index.size(); ++k) {
    const auto [a, b, c] = dW.index[k];
    worst = std::max(worst, std::abs(dW.value[k] - d.expected_d_omega_I(p, a, b, c)));
    scale = std::max(scale, std::abs(dW.value[k]));
  }
  CHECK(scale > 1e-2);
  CHECK(worst < 1e-6);
}

TEST_CASE("deformation builder rejects z_{2n} for n = 1") {
  CHECK_THROWS_AS(build_deformation(0.5, bump(Point::Zero(4), 1.0), 1, false), DimensionError);
}

TEST_CASE("bump") {
  const ScalarField b = bump(Point::Zero(2), 2.0);
  CHECK(b(Point::Zero(2)) == doctest::Approx(1.0));
  CHECK(b(pt({2.0, 0})) == 0.0);
  CHECK(b(pt({1.0, 0})) == doctest::Approx(std::exp(1 - 1 / 0.75)));
}

TEST_CASE("hyperkahler identities") {
  const HyperkahlerReport r = hyperkahler_check();
  CHECK(r.anticommutator == 0.0);
  CHECK(r.J_delta_minus_J == 0.0);
  CHECK(r.I_square == 0.0);
  // {I, J} e_x1 = (f - h) e_y2: equal factors still anticommute
  const HyperkahlerReport s = hyperkahler_check(2, 2);
  CHECK(s.I_square < 1e-15);
  CHECK(s.anticommutator < 1e-15);
  const HyperkahlerReport u = hyperkahler_check(2, 1);
  CHECK(u.I_square < 1e-15);
  CHECK(u.anticommutator == doctest::Approx(1.0));
}

TEST_CASE("default samples") {
  const auto s = default_samples(4);
  CHECK(s.size() == 1 + 8 + 8);
  CHECK(s[0].norm() == 0.0);
  CHECK(default_samples(4) == s);
}

}
