#include <doctest.h>

#include "phhs/action.hpp"
#include "phhs/models.hpp"
#include "phhs/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace phhs;

namespace {

constexpr double pi = std::numbers::pi;

struct Standard {
  PhhsModel model;
  HamiltonianFields fields;
  ActionContext ctx;
  explicit Standard(const std::string &H)
      : model(build_standard_hhs(1, H)), fields(assemble_phhs(model)), ctx(make_action_context(model, fields)) {}
};

Point qp(cplx Q, cplx P) { return from_complex(CVec::Map(std::array<cplx, 2>{Q, P}.data(), 2)); }

// affine holomorphic curve z -> Z0 + z V
CurveFn affine(cplx Q0, cplx P0, cplx VQ, cplx VP) {
  return [=](cplx z) { return qp(Q0 + z * VQ, P0 + z * VP); };
}

CurveFn constant(const Point &x) {
  return [x](cplx) { return x; };
}

// real 1-dof system with omega = dp ^ dq, Lambda = p dq, H = pi (q^2 + p^2) / T
ActionContext circle_system(double T) {
  PhhsModel m;
  m.m = 1;
  m.J = constant_field(standard_J(1));
  Mat W(2, 2);
  W << 0, -1, 1, 0;
  m.omega_R = constant_field(W);
  m.H_R = {[T](const Point &p) { return pi * p.squaredNorm() / T; }};
  m.lambda_R = {[](const Point &p) -> Vec {
    Vec l(2);
    l << p[1], 0;
    return l;
  }};
  HamiltonianFields f;
  f.m = 1;
  f.H_I = constant_field(0.0);
  return make_action_context(m, f, ActionMode::Real);
}

}  // namespace

TEST_SUITE("action") {

TEST_CASE("segment: constant curve with H = 0") {
  const Standard s("0");
  const std::vector<Point> nodes(9, qp(0.3, cplx(0.1, 0.2)));
  CHECK(std::abs(segment_action(s.ctx, nodes, 0, 1, 0.3)) == 0.0);
}

TEST_CASE("segment: periodic circle orbit has zero action") {
  const double T = 2.0, rho = 0.7;
  const ActionContext ctx = circle_system(T);
  const int n = 400;
  std::vector<Point> nodes;
  for (int k = 0; k <= n; ++k) {
    const double t = T * k / n;
    Point p(2);
    p << rho * std::cos(2 * pi * t / T), -rho * std::sin(2 * pi * t / T);
    nodes.push_back(p);
  }
  // midpoint chords: O(h^2)
  CHECK(std::abs(segment_action(ctx, nodes, 0, T, 0)) < 1e-4);
  // the p dq term alone is the enclosed area
  const ActionContext zeroH = [&] {
    ActionContext c = ctx;
    c.model.H_R = constant_field(0.0);
    return c;
  }();
  CHECK(segment_action(zeroH, nodes, 0, T, 0).real() == doctest::Approx(pi * rho * rho).epsilon(1e-4));
}

TEST_CASE("segment: alpha and alpha + pi flip the H term") {
  const Standard s("P^2/2 + Q");
  std::vector<Point> nodes;
  for (int k = 0; k <= 8; ++k) nodes.push_back(qp(cplx(0.1 * k, 0.05), cplx(0.2, -0.03 * k)));
  const cplx a = segment_action(s.ctx, nodes, 0, 1, 0.4), b = segment_action(s.ctx, nodes, 0, 1, 0.4 + pi);
  // a = L - e^{i 0.4} H, b = L + e^{i 0.4} H
  const cplx H_term = (b - a) / 2.0;
  const cplx L = (a + b) / 2.0;
  const Standard zero("0");
  CHECK(std::abs(L - segment_action(zero.ctx, nodes, 0, 1, 0)) < 1e-14);
  CHECK(std::abs(H_term) > 0.01);
}

TEST_CASE("parallelogram: constant curve") {
  const Standard s("P^2/2 + Q");
  const Point x0 = qp(cplx(0.4, 0.1), cplx(-0.2, 0.3));
  for (double alpha : {pi / 2, pi / 3}) {
    ParallelogramGrid g{0, 1, 0, 1, alpha, 9, 9};
    const cplx A = parallelogram_action(s.ctx, g, sample_parallelogram(constant(x0), g));
    CHECK(std::abs(A + s.ctx.H(x0) * std::sin(alpha)) < 1e-14);
  }
}

TEST_CASE("parallelogram: affine trajectory of H = P^2/2") {
  const Standard s("P^2/2");
  const cplx Q0(0.1, 0.2), P0(0.6, -0.3);
  // Q' = P0, P' = 0; integrand P Q' - H = P0^2 / 2
  ParallelogramGrid g{0, 1, 0, 1, pi / 2, 9, 9};
  const cplx A = parallelogram_action(s.ctx, g, sample_parallelogram(affine(Q0, P0, P0, 0), g));
  CHECK(std::abs(A - 0.5 * P0 * P0) < 1e-14);
}

TEST_CASE("parallelogram: second-order refinement") {
  const Standard s("P^2/2 + Q^3/3");
  const Point x0 = qp(cplx(0.2, 0.1), cplx(0.3, -0.2));
  auto value = [&](int n) {
    const GridSpec spec{0, 0.5, 0, 0.5, n, n};
    const GridCurve gc = trajectory_grid(s.model, s.fields, x0, 0.0, spec, {.dt = 1e-4});
    return parallelogram_action(s.ctx, parallelogram_of(spec), gc.values);
  };
  const cplx a = value(5), b = value(9), c = value(17);
  const double ratio = std::abs(a - b) / std::abs(b - c);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("disk A1 vanishes on holomorphic curves") {
  const Standard s("P^2/2 + Q^3/3");
  const PolarGrid g = disk_grid(cplx(0.1, -0.2), 0.8, 32, 64);
  const auto nodes = sample_polar(affine(cplx(1, 0.2), cplx(0.5, -0.3), cplx(0.3, 0.2), cplx(-0.1, 0.4)), g);
  CHECK(std::abs(disk_action_1(s.ctx, g, nodes)) < 1e-13);
}

TEST_CASE("disk A1 on an integrated trajectory") {
  const Standard s("P^2/2 + Q^3/3");
  const PolarGrid g = disk_grid(0.0, 0.3, 32, 64);
  const auto nodes = polar_trajectory(s.fields, qp(cplx(0.2, 0.1), cplx(0.3, -0.2)), g);
  CHECK(std::abs(disk_action_1(s.ctx, g, nodes)) < 1e-6);
}

TEST_CASE("constant curves") {
  const Standard s("P^2/2 + Q^3/3");
  const Point x0 = qp(cplx(0.4, 0.1), cplx(-0.2, 0.3));
  const PolarGrid g = disk_grid(0.0, 1.0, 8, 32);
  const auto nodes = sample_polar(constant(x0), g);
  CHECK(std::abs(disk_action_1(s.ctx, g, nodes)) < 1e-14);
  CHECK(std::abs(disk_action_2(s.ctx, g, nodes) - s.ctx.H(x0)) < 1e-12);

  const Standard zero("0");
  CHECK(std::abs(disk_action_2(zero.ctx, g, nodes)) == 0.0);
}

TEST_CASE("A2 does not vanish at a critical point of H") {
  // H = P^2/2 + Q^3/3 + 1 is critical at Q = P = 0 with H = 1; the trajectory there is constant
  const Standard s("P^2/2 + Q^3/3 + 1");
  const Point x0 = qp(0.0, 0.0);
  const PolarGrid g = disk_grid(0.0, 0.5, 8, 32);
  const auto nodes = polar_trajectory(s.fields, x0, g);
  CHECK(std::abs(disk_action_1(s.ctx, g, nodes)) < 1e-14);
  CHECK(std::abs(disk_action_2(s.ctx, g, nodes) - 1.0) < 1e-12);
}

TEST_CASE("star with constant radius equals the disk") {
  const Standard s("P^2/2 + Q^3/3");
  const auto curve = affine(cplx(0.3, 0.1), cplx(0.2, 0.4), cplx(0.5, -0.1), cplx(0.2, 0.2));
  const PolarGrid disk = disk_grid(cplx(0.1, 0.1), 0.7, 16, 32);
  PolarGrid star = disk;
  star.R = [](double a) { return 0.7 + 0 * a; };
  for (int v : {1, 2}) {
    const cplx a = star_action(s.ctx, star, sample_polar(curve, star), v);
    const cplx b = v == 1 ? disk_action_1(s.ctx, disk, sample_polar(curve, disk))
                          : disk_action_2(s.ctx, disk, sample_polar(curve, disk));
    CHECK(std::abs(a - b) < 1e-10);
  }
}

TEST_CASE("normalization of a disk") {
  const PolarGrid g = disk_grid(0.0, 0.7, 4, 64);
  // (i/4) * (-4i R / ... ) reduces to R for a disk
  CHECK(std::abs(normalization_hat_R(g) - cplx(0.7, 0)) < 1e-6);
}

TEST_CASE("ellipse star domain") {
  const Standard s("P^2/2 + Q^3/3");
  PolarGrid g;
  g.z0 = 0;
  g.nr = 64;
  g.na = 256;
  // ellipse with semi-axes 0.8 and 0.4
  g.R = [](double a) { return 0.8 * 0.4 / std::hypot(0.4 * std::cos(a), 0.8 * std::sin(a)); };
  const Point x0 = qp(cplx(0.4, 0.1), cplx(-0.2, 0.3));
  CHECK(std::abs(star_action(s.ctx, g, sample_polar(constant(x0), g), 2) - s.ctx.H(x0)) < 1e-12);

  // A1 of a holomorphic curve is (1/2pi) int [F(b(a)) - F(z0)] da with F' = Lambda(gamma') - H,
  // which only vanishes on disks
  const cplx Q0(1, 0.2), P0(0.5, -0.3), VQ(0.3, 0.2), VP(-0.1, 0.4);
  auto f = [&](cplx z) {
    const cplx Q = Q0 + z * VQ, P = P0 + z * VP;
    return P * VQ - (P * P / 2.0 + Q * Q * Q / 3.0);
  };
  const quad::GaussLegendre rule(16);
  const int na = 512;
  cplx oracle = 0;
  for (int l = 0; l < na; ++l) {
    const double a = 2 * pi * l / na;
    const cplx e = std::polar(1.0, a);
    oracle += e * quad::gauss([&](double r) { return f(r * e); }, 0.0, g.R(a), rule);
  }
  oracle /= double(na);
  const cplx got = star_action(s.ctx, g, sample_polar(affine(Q0, P0, VQ, VP), g), 1);
  CHECK(std::abs(oracle) > 1e-2);
  CHECK(std::abs(got - oracle) < 1e-4);
}

TEST_CASE("quadrature estimate bounds A1 of a holomorphic curve") {
  const Standard s("Q*P");
  const auto curve = affine(cplx(1, 0.2), cplx(0.5, -0.3), cplx(0.3, 0.2), cplx(-0.1, 0.4));
  const QuadratureEstimate q = star_action_estimate(s.ctx, curve, disk_grid(0.0, 1.0, 32, 128), 1);
  CHECK(std::abs(q.value) <= 2 * q.error);
  CHECK(q.error < 1e-11);
}

TEST_CASE("cartesian form agrees with the polar form") {
  const Standard s("P^2/2 + Q^3/3");
  const auto curve = [](cplx z) { return qp(0.3 + 0.5 * z + 0.2 * z * std::conj(z), cplx(0.2, 0.1) + 0.3 * z * z); };
  const PolarGrid g = disk_grid(0.0, 0.6, 128, 256);
  const cplx polar = disk_action_2(s.ctx, g, sample_polar(curve, g));
  const cplx cart = cartesian_disk_action(s.ctx, curve, 0.0, 0.6, 2, 400);
  CHECK(std::abs(polar - cart) < 2e-2 * std::max(1.0, std::abs(polar)));
}

TEST_CASE("variational gradient") {
  const Standard s("P^2/2 + Q^3/3");
  const Point x0 = qp(cplx(0.2, 0.1), cplx(0.3, -0.2));
  const GridSpec spec{0, 0.5, 0, 0.5, 9, 9};
  const GridCurve gc = trajectory_grid(s.model, s.fields, x0, 0.0, spec);
  const ParallelogramGrid pg = parallelogram_of(spec);
  const double critical = variational_gradient(parallelogram_cells(s.ctx, pg, gc.values)).max_norm();
  CHECK(critical <= 1e-4);
  auto bent = gc.values;
  bent[4 * 9 + 4][0] += 0.1;
  const double displaced = variational_gradient(parallelogram_cells(s.ctx, pg, bent)).max_norm();
  CHECK(displaced >= 10 * critical);

  // constants are not trajectories where dH != 0
  const std::vector<Point> flat(81, x0);
  CHECK(variational_gradient(parallelogram_cells(s.ctx, pg, flat)).max_norm() > 1e-3);
}

TEST_CASE("gradient is zero on fixed nodes") {
  const Standard s("P^2/2");
  const PolarGrid g = disk_grid(0.0, 0.5, 4, 8);
  const CellAction a = star_cells(s.ctx, g, sample_polar(constant(qp(0.1, 0.2)), g), 1);
  const VariationalGradient vg = variational_gradient(a);
  CHECK(vg.re[0].norm() == 0.0);
  CHECK(vg.re[g.node(g.nr, 3)].norm() == 0.0);
}

TEST_CASE("missing primitive and proper models") {
  PhhsModel m = build_standard_hhs(1, "P");
  const HamiltonianFields f = assemble_phhs(m);
  m.lambda_R = {};
  CHECK_THROWS_AS(make_action_context(m, f), MissingPrimitive);
  const PhhsModel p = build_proper_phhs("1", "exp(x1)", "-y1").model;
  const HamiltonianFields fp = assemble_phhs(p);
  CHECK_THROWS_AS(make_action_context(p, fp, ActionMode::Complex), MissingPrimitive);
  CHECK_NOTHROW(make_action_context(p, fp, ActionMode::Real));
}

TEST_CASE("grid validation") {
  const Standard s("P");
  const PolarGrid g = disk_grid(0.0, 0.5, 4, 6);
  CHECK_THROWS_AS(star_cells(s.ctx, g, sample_polar(constant(qp(0, 0)), g), 2), ConfigError);
  CHECK_THROWS_AS(star_cells(s.ctx, g, sample_polar(constant(qp(0, 0)), g), 3), ConfigError);
  CHECK_THROWS_AS(disk_grid(0.0, 0.0, 4, 8), ConfigError);
  CHECK_THROWS_AS(segment_action(s.ctx, {qp(0, 0)}, 0, 1, 0), ConfigError);
}

}
