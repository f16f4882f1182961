#include <doctest.h>

#include "phhs/models.hpp"
#include "phhs/tensor.hpp"

#include <cmath>
#include <random>

using namespace phhs;

namespace {

Point pt(std::initializer_list<double> v) {
  Point p(int(v.size()));
  int i = 0;
  for (double x : v) p[i++] = x;
  return p;
}

VectorField const_vec(Vec v) { return constant_field(v); }

}  // namespace

TEST_SUITE("tensor") {

TEST_CASE("partial_jet") {
  auto sq = [](const Point &p) { return p[0] * p[0]; };
  CHECK(partial_jet(sq, pt({3, 0, 0, 0}), 0) == doctest::Approx(6.0).epsilon(1e-10));
  auto c = [](const Point &) { return 4.2; };
  CHECK(partial_jet(c, pt({1, 2}), 1) == 0.0);
  auto ex = [](const Point &p) { return std::exp(p[0]); };
  CHECK(std::abs(partial_jet(ex, pt({0}), 0, {1e-3, 2, false}) - 1.0) < 1e-6);
  CHECK(std::abs(partial_jet(ex, pt({0}), 0, {1e-3, 4, false}) - 1.0) < 1e-11);
}

TEST_CASE("exterior derivative of 2-forms") {
  const TwoFormField flat = constant_field(standard_omega_R(1));
  CHECK(exterior_derivative_2form(flat, pt({0.3, -0.2, 0.1, 0.5})).max_abs() == 0.0);

  // w = y1 dx1^dx2 on (x1, x2, y1, y2)
  const TwoFormField w{[](const Point &p) {
    Mat m = Mat::Zero(4, 4);
    m(0, 1) = p[2];
    m(1, 0) = -p[2];
    return m;
  }};
  const ThreeForm d = exterior_derivative_2form(w, pt({0.4, 0.1, -0.7, 0.2}));
  CHECK(d.at(0, 1, 2) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d.at(2, 0, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(d.at(1, 0, 2) == doctest::Approx(-1.0).epsilon(1e-9));
  int nonzero = 0;
  for (double v : d.value) nonzero += std::abs(v) > 1e-9;
  CHECK(nonzero == 1);
}

TEST_CASE("d Omega_I of the proper example is e^{x1} dx1^dx2^dy1") {
  const PhhsModel m = build_proper_phhs("1", "exp(x1)", "-y1").model;
  const TwoFormField WI = omega_I_from(m.omega_R, m.J);
  for (const Point &p : {pt({0, 0, 0, 0}), pt({0.5, -0.3, 0.2, 0.1}), pt({-0.4, 0.2, -0.6, 0.3})}) {
    const ThreeForm d = exterior_derivative_2form(WI, p);
    CHECK(d.at(0, 1, 2) == doctest::Approx(std::exp(p[0])).epsilon(1e-7));
    for (size_t k = 0; k < d.index.size(); ++k)
      if (d.index[k] != std::array<int, 3>{0, 1, 2}) CHECK(std::abs(d.value[k]) < 1e-7);
  }
}

TEST_CASE("lie bracket") {
  const Point p = pt({0.3, -0.4, 0.5, 0.2});
  CHECK(max_abs(lie_bracket(const_vec(pt({1, 2, 0, 0})), const_vec(pt({0, 0, 3, 1})), p)) == 0.0);
  const VectorField V{[](const Point &q) { return pt({0, q[0], 0, 0}); }};
  const Vec b = lie_bracket(V, const_vec(pt({1, 0, 0, 0})), p);
  CHECK(b[1] == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(std::abs(b[0]) + std::abs(b[2]) + std::abs(b[3]) < 1e-12);
}

TEST_CASE("X and JX commute for the standard HHS") {
  const PhhsModel m = build_standard_hhs(1, "z2");
  const HamiltonianFields f = assemble_phhs(m);
  for (const Point &p : m.samples) CHECK(max_abs(lie_bracket(f.X, f.JX, p)) < 1e-8);
}

TEST_CASE("lie derivative of J_g") {
  const PhhsModel m = build_proper_phhs("1", "exp(x1)", "-y1").model;
  CHECK(max_abs(lie_derivative_J(const_vec(pt({1, 0, 0, 0})), constant_field(standard_J(2)), pt({0.1, 0.2, 0.3, 0.4}))) == 0.0);
  const VectorField X = const_vec(pt({0, 0, 0, -1}));
  const VectorField JX{[](const Point &q) { return pt({0, std::exp(-q[0]), 0, 0}); }};
  for (const Point &p : {pt({0, 0, 0, 0}), pt({0.3, -0.2, 0.5, 0.1})}) {
    CHECK(max_abs(lie_derivative_J(X, m.J, p)) < 1e-8);
    CHECK(max_abs(lie_derivative_J(JX, m.J, p)) > 0.1);
  }
}

TEST_CASE("nijenhuis") {
  CHECK(nijenhuis(constant_field(standard_J(2)), pt({0.1, 0.2, 0.3, 0.4})).max_abs() == 0.0);
  CHECK(nijenhuis_rank(constant_field(standard_J(2)), pt({0.1, 0.2, 0.3, 0.4})) == 0);
  const PhhsModel m = build_proper_phhs("1", "exp(x1)", "-y1").model;
  CHECK(nijenhuis(m.J, Point::Zero(4)).max_abs() > 0.1);
}

TEST_CASE("nijenhuis is bilinear and antisymmetric") {
  const PhhsModel m = build_proper_phhs("1", "exp(x1)", "-y1").model;
  const Point p = pt({0.2, 0.1, -0.3, 0.4});
  const Nijenhuis N = nijenhuis(m.J, p);
  const Vec u = pt({1, 2, 0, -1}), w = pt({0, 1, 3, 1});
  CHECK(max_abs(Vec(N.apply(u, w) + N.apply(w, u))) < 1e-12);
  CHECK(max_abs(Vec(N.apply(u, u))) < 1e-12);
  // N(Ju, w) = -J N(u, w)
  const Mat J = m.J(p);
  CHECK(max_abs(Vec(N.apply(J * u, w) + J * N.apply(u, w))) < 1e-6);
}

TEST_CASE("structure residuals") {
  const Mat J = standard_J(2), W = standard_omega_R(1);
  CHECK(check_acs(J) == 0.0);
  CHECK(check_anticompat(W, J) == 0.0);

  Mat noisy = J;
  noisy(0, 1) += 1e-3;
  const double r = check_acs(noisy);
  CHECK(r > 5e-4);
  CHECK(r < 3e-3);

  const PhhsModel m = build_proper_phhs("1 + 0.3*x2^2", "exp(x1)", "-y1").model;
  for (const Point &p : m.samples) {
    CHECK(check_acs(m.J, p) < 1e-12);
    CHECK(check_anticompat(m.omega_R, m.J, p) < 1e-12);
  }
}

TEST_CASE("project_10") {
  const Mat J = standard_J(1);
  const CVec v = project_10(J, pt({1, 0}));
  CHECK(std::abs(v[0] - cplx(0.5, 0)) < 1e-15);
  CHECK(std::abs(v[1] - cplx(0, -0.5)) < 1e-15);

  const Vec w = pt({0.3, -1.2});
  CHECK((project_10(J, Vec(J * w)) - cplx(0, 1) * project_10(J, w)).norm() < 1e-15);

  const PhhsModel m = build_proper_phhs("1", "exp(x1)", "-y1").model;
  const Point p = pt({0.4, 0, 0, 0});
  const CVec e = project_10(m.J, pt({0, 0, 0, -1}), p);
  CHECK((m.J(p).cast<cplx>() * e - cplx(0, 1) * e).norm() < 1e-14);
}

TEST_CASE("gram-schmidt on a standard form returns the identity frame") {
  using CM = Eigen::MatrixXcd;
  const CM S = standard_pairing<cplx>(2);
  const auto frame = symplectic_gram_schmidt<cplx>(S, CM::Identity(4, 4));
  CHECK((frame.vectors - CM::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("gram-schmidt in a rotated basis") {
  using CM = Eigen::MatrixXcd;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  CM B(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) B(i, j) = {g(rng), g(rng)};
  // dz2 ^ dz1 written in the basis B
  const CM W = B.transpose() * standard_pairing<cplx>(2) * B;
  const auto frame = symplectic_gram_schmidt<cplx>(W, CM::Identity(4, 4));
  const CM pairing = frame.vectors.transpose() * W * frame.vectors;
  CHECK((pairing - standard_pairing<cplx>(2)).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((frame.covectors * frame.vectors - CM::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("gram-schmidt rejects odd and degenerate input") {
  using CM = Eigen::MatrixXcd;
  CHECK_THROWS_AS(symplectic_gram_schmidt<cplx>(CM::Zero(1, 1), CM::Identity(1, 1)), DimensionError);
  CHECK_THROWS_AS(symplectic_gram_schmidt<cplx>(CM::Zero(2, 2), CM::Identity(2, 2)), DegenerateForm);
}

TEST_CASE("gram-schmidt on real forms") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  Mat A(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) A(i, j) = g(rng);
  const Mat W = A - A.transpose();
  const auto frame = symplectic_gram_schmidt<double>(W, Mat::Identity(6, 6));
  CHECK(max_abs(Mat(frame.vectors.transpose() * W * frame.vectors - standard_pairing<double>(3))) < 1e-10);
}

}
