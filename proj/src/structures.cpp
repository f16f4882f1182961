#include "phhs/structures.hpp"

#include "phhs/quadrature.hpp"

#include <random>

namespace phhs {

namespace {

const quad::GaussLegendre &segment_rule() {
  static const quad::GaussLegendre rule(20);
  return rule;
}

Vec solve_form(const Mat &omega, const Vec &rhs) {
  Eigen::FullPivLU<Mat> lu(omega);
  if (!lu.isInvertible()) throw SingularForm("two-form is degenerate at the evaluation point");
  return lu.solve(rhs);
}

}  // namespace

double Diagnostics::worst() const {
  return std::max({acs, anticompat, omega_R_closed, lambda_primitive, defining, hi_primitive, bracket_XJX,
                   pseudo_holo, cr_HI, cr_HR, poisson, energy_X});
}

TwoFormField omega_I_from(const TwoFormField &omega_R, const MatrixField &J) {
  return {[omega_R, J](const Point &p) -> Mat { return -J(p).transpose() * omega_R(p); }, omega_R.fd};
}

VectorField hamiltonian_vector_field(const TwoFormField &omega, const ScalarField &H) {
  return {[omega, H](const Point &p) -> Vec { return solve_form(omega(p), gradient(H, p)); }, H.fd};
}

CovectorField contract_form(const TwoFormField &omega, const VectorField &V) {
  return {[omega, V](const Point &p) -> Vec { return omega(p).transpose() * V(p); }, V.fd};
}

double line_integral(const CovectorField &alpha, const Point &base, const Point &p, double tol) {
  const Vec d = p - base;
  if (d.norm() == 0) return 0;
  auto f = [&](double u) { return alpha(Point(base + u * d)).dot(d); };
  if (tol <= 0) {
    // fixed two-panel Gauss rule: smooth in p, used inside derived fields
    return quad::gauss(f, 0.0, 0.5, segment_rule()) + quad::gauss(f, 0.5, 1.0, segment_rule());
  }
  return quad::adaptive_gk<double>(f, 0.0, 1.0, tol, [](double v) { return std::abs(v); });
}

double closedness_residual(const CovectorField &alpha, const Point &p, const PrimitiveOptions &opt) {
  const int n = int(p.size());
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double d = 0.5 * opt.triangle_size;
  double worst = 0;
  for (int k = 0; k < opt.triangles; ++k) {
    Vec u(n), w(n);
    double sine = 0;
    do {
      for (int i = 0; i < n; ++i) u[i] = gauss(rng), w[i] = gauss(rng);
      u.normalize();
      w.normalize();
      const double c = u.dot(w);
      sine = std::sqrt(std::max(0.0, 1 - c * c));
    } while (sine < 0.3);
    const Point a = p, b = p + d * u, c = p + d * w;
    const double loop = line_integral(alpha, a, b, -1) + line_integral(alpha, b, c, -1) +
                        line_integral(alpha, c, a, -1);
    const double area = 0.5 * d * d * sine;
    worst = std::max(worst, std::abs(loop) / area);
  }
  return worst;
}

double primitive_scalar(const CovectorField &alpha, const Point &base, const Point &p, const PrimitiveOptions &opt) {
  const double r = closedness_residual(alpha, p, opt);
  if (r > opt.loop_tol)
    throw NonClosedForm("1-form is not closed near the query point (loop residual " + std::to_string(r) + ")");
  return line_integral(alpha, base, p, opt.tol);
}

double poisson_bracket(const ScalarField &F, const ScalarField &G, const TwoFormField &omega, const Point &p) {
  const Vec XF = hamiltonian_vector_field(omega, F)(p);
  const Vec XG = hamiltonian_vector_field(omega, G)(p);
  return XF.dot(omega(p) * XG);
}

Diagnostics diagnose(const PhhsModel &model, const HamiltonianFields &f, const Point &p) {
  Diagnostics d;
  const Mat J = model.J(p);
  const Mat W = model.omega_R(p);
  d.acs = check_acs(J);
  d.anticompat = check_anticompat(W, J);
  d.omega_R_closed = exterior_derivative_2form(model.omega_R, p).max_abs();
  if (model.lambda_R) d.lambda_primitive = max_abs(Mat(exterior_derivative_1form(model.lambda_R, p) - W));

  const Vec X = f.X(p), JX = f.JX(p);
  const Vec gR = gradient(model.H_R, p), gI = gradient(f.H_I, p);
  d.defining = max_abs(Vec(W * X - gR));
  d.hi_primitive = max_abs(Vec(W.transpose() * JX - gI));
  d.bracket_XJX = max_abs(lie_bracket(f.X, f.JX, p));
  // dH o J = i dH  <=>  dH_R o J = -dH_I and dH_I o J = dH_R
  d.pseudo_holo = std::max(max_abs(Vec(J.transpose() * gR + gI)), max_abs(Vec(J.transpose() * gI - gR)));
  d.cr_HI = max_abs(Vec(hamiltonian_vector_field(f.omega_I, f.H_I)(p) - X));
  d.cr_HR = max_abs(Vec(hamiltonian_vector_field(f.omega_I, model.H_R)(p) - JX));
  d.poisson = std::abs(poisson_bracket(model.H_R, f.H_I, model.omega_R, p));
  d.energy_X = std::abs(gR.dot(X)) + std::abs(gI.dot(X));
  return d;
}

HamiltonianFields assemble_phhs(const PhhsModel &model, const AssembleOptions &opt) {
  if (!model.J || !model.omega_R || !model.H_R) throw InvalidModel("model needs J, omega_R and H_R");
  for (const auto &p : model.samples) {
    if (p.size() != 2 * model.m) throw DimensionError("sample point has the wrong dimension");
    const Mat J = model.J(p);
    const double acs = check_acs(J), anti = check_anticompat(model.omega_R(p), J);
    if (acs > opt.tol.exact) throw InvalidModel("J is not an almost complex structure (residual " + std::to_string(acs) + ")");
    if (anti > opt.tol.exact) throw InvalidModel("J is not omega_R-anticompatible (residual " + std::to_string(anti) + ")");
  }

  HamiltonianFields f;
  f.m = model.m;
  f.X = hamiltonian_vector_field(model.omega_R, model.H_R);
  {
    const auto J = model.J;
    const auto X = f.X;
    f.JX = {[J, X](const Point &p) -> Vec { return J(p) * X(p); }, X.fd};
  }
  f.omega_I = omega_I_from(model.omega_R, model.J);

  if (model.H_I) {
    f.H_I = model.H_I;
  } else {
    const CovectorField alpha = contract_form(model.omega_R, f.JX);
    for (const auto &p : model.samples) {
      const double r = closedness_residual(alpha, p, opt.primitive);
      if (r > opt.primitive.loop_tol)
        throw NonClosedForm("W_R(JX, .) is not closed (loop residual " + std::to_string(r) + "); no H_I exists");
    }
    const Point base = model.base_point.size() ? model.base_point : Point(Point::Zero(2 * model.m));
    f.H_I = {[alpha, base](const Point &p) { return line_integral(alpha, base, p, -1); }, model.H_R.fd};
  }

  if (opt.run_diagnostics) {
    for (const auto &p : model.samples) {
      const Diagnostics d = diagnose(model, f, p);
      auto &D = f.diagnostics;
      D.acs = std::max(D.acs, d.acs);
      D.anticompat = std::max(D.anticompat, d.anticompat);
      D.omega_R_closed = std::max(D.omega_R_closed, d.omega_R_closed);
      D.lambda_primitive = std::max(D.lambda_primitive, d.lambda_primitive);
      D.defining = std::max(D.defining, d.defining);
      D.hi_primitive = std::max(D.hi_primitive, d.hi_primitive);
      D.bracket_XJX = std::max(D.bracket_XJX, d.bracket_XJX);
      D.pseudo_holo = std::max(D.pseudo_holo, d.pseudo_holo);
      D.cr_HI = std::max(D.cr_HI, d.cr_HI);
      D.cr_HR = std::max(D.cr_HR, d.cr_HR);
      D.poisson = std::max(D.poisson, d.poisson);
      D.energy_X = std::max(D.energy_X, d.energy_X);
    }
  }
  f.passed = f.diagnostics.worst() <= opt.tol.derived;
  return f;
}

IntegrabilityReport integrability_report(const PhhsModel &model, const std::vector<Point> &grid, double threshold) {
  const TwoFormField omega_I = omega_I_from(model.omega_R, model.J);
  IntegrabilityReport rep;
  rep.threshold = threshold;
  rep.samples.resize(grid.size());
  parallel_for(int(grid.size()), [&](int i) {
    auto &s = rep.samples[i];
    s.p = grid[i];
    s.nijenhuis = nijenhuis(model.J, grid[i]).max_abs();
    s.d_omega_I = exterior_derivative_2form(omega_I, grid[i]).max_abs();
  });
  for (const auto &s : rep.samples) {
    rep.max_nijenhuis = std::max(rep.max_nijenhuis, s.nijenhuis);
    rep.max_d_omega_I = std::max(rep.max_d_omega_I, s.d_omega_I);
  }
  rep.integrable = rep.max_nijenhuis <= threshold && rep.max_d_omega_I <= threshold;
  return rep;
}

JPreservingReport j_preserving_check(const VectorField &V, const PhhsModel &model, const std::vector<Point> &grid) {
  const TwoFormField omega_I = omega_I_from(model.omega_R, model.J);
  JPreservingReport rep;
  rep.samples.resize(grid.size());
  parallel_for(int(grid.size()), [&](int i) {
    auto &s = rep.samples[i];
    s.p = grid[i];
    s.lie = max_abs(lie_derivative_J(V, model.J, grid[i]));
    s.contract = max_abs(exterior_derivative_2form(omega_I, grid[i]).contract(V(grid[i])));
  });
  for (const auto &s : rep.samples) {
    rep.max_lie = std::max(rep.max_lie, s.lie);
    rep.max_contract = std::max(rep.max_contract, s.contract);
  }
  return rep;
}

std::vector<Point> cube_grid(int dim, double lo, double hi, int per_axis) {
  std::vector<Point> out;
  if (per_axis < 1 || dim < 1) return out;
  std::vector<int> idx(dim, 0);
  const double step = per_axis > 1 ? (hi - lo) / (per_axis - 1) : 0.0;
  for (;;) {
    Point p(dim);
    for (int a = 0; a < dim; ++a) p[a] = per_axis > 1 ? lo + step * idx[a] : 0.5 * (lo + hi);
    out.push_back(p);
    int a = 0;
    while (a < dim && ++idx[a] == per_axis) idx[a++] = 0;
    if (a == dim) break;
  }
  return out;
}

}  // namespace phhs
