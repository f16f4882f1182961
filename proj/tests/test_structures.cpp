#include <doctest.h>

#include "phhs/models.hpp"
#include "phhs/structures.hpp"

#include <cmath>

using namespace phhs;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(int(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

// dp ^ dq on (q, p)
TwoFormField darboux() {
  Mat W(2, 2);
  W << 0, -1, 1, 0;
  return constant_field(W);
}

PhhsModel proper() { return build_proper_phhs("1", "exp(x1)", "-y1").model; }

}  // namespace

TEST_SUITE("structures") {

TEST_CASE("omega_I of the standard structure") {
  const Mat WI = omega_I_from(constant_field(standard_omega_R(1)), constant_field(standard_J(2)))(Point::Zero(4));
  Mat expect = Mat::Zero(4, 4);
  expect(1, 2) = 1;   // dx2 ^ dy1
  expect(3, 0) = 1;   // dy2 ^ dx1
  expect = expect - Mat(expect.transpose());
  CHECK(max_abs(Mat(WI - expect)) == 0.0);
}

TEST_CASE("omega_I of the proper example") {
  const PhhsModel m = proper();
  const TwoFormField WI = omega_I_from(m.omega_R, m.J);
  for (const Point &p : m.samples) {
    const double r = std::exp(-p[0]);  // f / h
    Mat expect = Mat::Zero(4, 4);
    expect(1, 2) = 1 / r;
    expect(3, 0) = r;
    expect = expect - Mat(expect.transpose());
    CHECK(max_abs(Mat(WI(p) - expect)) < 1e-12);
    CHECK(max_abs(Mat(WI(p) + WI(p).transpose())) < 1e-14);
  }
}

TEST_CASE("hamiltonian vector fields") {
  const ScalarField H{[](const Point &p) { return 0.5 * p[1] * p[1]; }};
  const Vec X = hamiltonian_vector_field(darboux(), H)(pt({0.3, 0.7}));
  CHECK(X[0] == doctest::Approx(0.7).epsilon(1e-10));
  CHECK(std::abs(X[1]) < 1e-12);

  const PhhsModel m = proper();
  const Vec Xp = hamiltonian_vector_field(m.omega_R, m.H_R)(pt({0.2, 0.3, -0.1, 0.5}));
  CHECK(max_abs(Vec(Xp - pt({0, 0, 0, -1}))) < 1e-10);
}

TEST_CASE("central problem field at (1, 1/2)") {
  const PhhsModel m = build_central_problem();
  const Vec X = hamiltonian_vector_field(m.omega_R, m.H_R)(central::to_point(1.0, 0.5));
  // P d_Q - 1/(4 Q^3) d_P
  const auto [dQ, dP] = central::from_point(X);
  CHECK(std::abs(dQ - cplx(0.5, 0)) < 1e-9);
  CHECK(std::abs(dP - cplx(-0.25, 0)) < 1e-9);
}

TEST_CASE("primitives") {
  const CovectorField dH{[](const Point &p) { return pt({2 * p[0], 0}); }};
  const Point base = pt({0.5, 0.1}), p = pt({-0.7, 0.9});
  CHECK(primitive_scalar(dH, base, p) == doctest::Approx(0.49 - 0.25).epsilon(1e-11));

  const PhhsModel m = proper();
  const HamiltonianFields f = assemble_phhs(m, {.run_diagnostics = false});
  const CovectorField a = contract_form(m.omega_R, f.JX);
  for (const Point &q : {pt({0.4, 0.1, -0.2, 0.3}), pt({-0.5, -0.3, 0.6, 0.1})})
    CHECK(primitive_scalar(a, Point::Zero(4), q) == doctest::Approx(1 - std::exp(-q[0])).epsilon(1e-10));
}

TEST_CASE("non-exact H_I is rejected") {
  const PhhsModel m = build_proper_phhs("1", "exp(x2)", "-y1").model;
  CHECK_THROWS_AS(assemble_phhs(m), NonClosedForm);
}

TEST_CASE("poisson bracket sign") {
  const ScalarField q{[](const Point &p) { return p[0]; }}, pp{[](const Point &p) { return p[1]; }};
  // i_X w = -dH makes {q, p} = w(X_q, X_p) = -1
  CHECK(poisson_bracket(q, pp, darboux(), pt({0.1, 0.2})) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(poisson_bracket(q, q, darboux(), pt({0.1, 0.2})) == 0.0);
}

TEST_CASE("assemble the standard HHS") {
  const PhhsModel m = build_standard_hhs(1, "z2");
  const HamiltonianFields f = assemble_phhs(m);
  CHECK(f.passed);
  CHECK(f.diagnostics.worst() <= 1e-6);
}

TEST_CASE("assemble the proper example") {
  const PhhsModel m = proper();
  const HamiltonianFields f = assemble_phhs(m);
  CHECK(f.passed);
  const Point p = pt({0.3, -0.2, 0.1, 0.4});
  CHECK(max_abs(Vec(f.X(p) - pt({0, 0, 0, -1}))) < 1e-9);
  CHECK(max_abs(Vec(f.JX(p) - pt({0, std::exp(-0.3), 0, 0}))) < 1e-9);
  CHECK(std::abs(poisson_bracket(m.H_R, f.H_I, m.omega_R, p)) < 1e-8);
}

TEST_CASE("a J that is not anticompatible is rejected") {
  PhhsModel m = build_standard_hhs(1, "z2");
  Mat J = Mat::Zero(4, 4);  // rotates (x1, x2) and (y1, y2) instead of (x, y)
  J(1, 0) = 1, J(0, 1) = -1, J(3, 2) = 1, J(2, 3) = -1;
  m.J = constant_field(J);
  m.H_I = {};
  CHECK(check_acs(J) == 0.0);
  CHECK(check_anticompat(standard_omega_R(1), J) > 0.5);
  CHECK_THROWS_AS(assemble_phhs(m), InvalidModel);
}

TEST_CASE("integrability reports") {
  const auto grid = cube_grid(4, -0.5, 0.5, 3);
  const IntegrabilityReport flat = integrability_report(build_standard_hhs(1, "z2"), grid);
  CHECK(flat.integrable);
  CHECK(flat.max_nijenhuis <= 1e-6);
  CHECK(flat.max_d_omega_I <= 1e-6);
  const IntegrabilityReport bent = integrability_report(proper(), grid);
  CHECK_FALSE(bent.integrable);
  CHECK(bent.consistent());
  CHECK(bent.max_nijenhuis > 0.1);
  CHECK(bent.max_d_omega_I > 0.1);
}

TEST_CASE("J-preserving fields") {
  const std::vector<Point> origin{Point::Zero(4)};
  const PhhsModel s = build_standard_hhs(1, "z2");
  const HamiltonianFields fs = assemble_phhs(s);
  const JPreservingReport rs = j_preserving_check(fs.X, s, origin);
  CHECK(rs.max_lie < 1e-8);
  CHECK(rs.max_contract < 1e-8);

  const PhhsModel m = proper();
  const HamiltonianFields f = assemble_phhs(m);
  const JPreservingReport rx = j_preserving_check(f.X, m, origin);
  CHECK(rx.max_lie < 1e-6);
  CHECK(rx.max_contract < 1e-6);
  const JPreservingReport rj = j_preserving_check(f.JX, m, origin);
  CHECK(rj.max_lie > 0.1);
  CHECK(rj.max_contract > 0.1);
}

TEST_CASE("cube grid") {
  const auto g = cube_grid(2, -1, 1, 3);
  CHECK(g.size() == 9);
  CHECK(g.front()[0] == -1.0);
  CHECK(g.back()[1] == 1.0);
}

}
