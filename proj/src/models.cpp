#include "phhs/models.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace phhs {

std::vector<Point> default_samples(int dim, double radius) {
  std::vector<Point> s;
  s.push_back(Point::Zero(dim));
  for (int a = 0; a < dim; ++a)
    for (double sign : {-0.5, 0.5}) {
      Point p = Point::Zero(dim);
      p[a] = sign * radius;
      s.push_back(p);
    }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-radius, radius);
  for (int k = 0; k < 8; ++k) {
    Point p(dim);
    for (int a = 0; a < dim; ++a) p[a] = u(rng);
    s.push_back(p);
  }
  return s;
}

Mat standard_omega_R(int n) {
  const int m = 2 * n;
  Mat W = Mat::Zero(2 * m, 2 * m);
  for (int j = 0; j < n; ++j) {
    const int qx = j, px = n + j, qy = m + j, py = m + n + j;
    W(px, qx) = 1;
    W(qx, px) = -1;
    W(py, qy) = -1;
    W(qy, py) = 1;
  }
  return W;
}

Vec standard_lambda_R(int n, const Point &p) {
  const int m = 2 * n;
  Vec L = Vec::Zero(2 * m);
  for (int j = 0; j < n; ++j) {
    L[j] = p[n + j];           // Px dQx
    L[m + j] = -p[m + n + j];  // -Py dQy
  }
  return L;
}

double holomorphy_residual(const Expression &H, const ComplexVariables &vars, int m, const std::vector<Point> &samples) {
  const ScalarField re{[H, vars](const Point &p) { return eval_complex(H, vars, p).real(); }};
  const ScalarField im{[H, vars](const Point &p) { return eval_complex(H, vars, p).imag(); }};
  const Mat J = standard_J(m);
  double worst = 0;
  for (const auto &p : samples) {
    const Vec gR = gradient(re, p), gI = gradient(im, p);
    worst = std::max({worst, max_abs(Vec(J.transpose() * gR + gI)), max_abs(Vec(J.transpose() * gI - gR))});
  }
  return worst;
}

namespace {

PhhsModel standard_model(int n, const std::string &H, const std::vector<Point> &samples, double holo_tol) {
  const int m = 2 * n;
  const ComplexVariables vars = complex_variables(m, true);
  const Expression e = Expression::parse(H, vars.names);
  const double res = holomorphy_residual(e, vars, m, samples);
  if (!(res <= holo_tol))
    throw NotHolomorphic("H fails dH o J = i dH (residual " + std::to_string(res) + ")");

  PhhsModel model;
  model.name = "standard";
  model.m = m;
  model.holomorphic = true;
  model.J = constant_field(standard_J(m));
  model.omega_R = constant_field(standard_omega_R(n));
  model.lambda_R = {[n](const Point &p) { return standard_lambda_R(n, p); }};
  model.H_R = {[e, vars](const Point &p) { return eval_complex(e, vars, p).real(); }};
  model.H_I = {[e, vars](const Point &p) { return eval_complex(e, vars, p).imag(); }};
  model.base_point = Point::Zero(2 * m);
  model.samples = samples;
  return model;
}

}  // namespace

PhhsModel build_standard_hhs(int n, const std::string &H, double holo_tol) {
  if (n < 1) throw DimensionError("standard HHS needs n >= 1");
  return standard_model(n, H, default_samples(4 * n), holo_tol);
}

namespace central {

cplx energy(cplx Q0, cplx P0) { return P0 * P0 / 2.0 - 1.0 / (8.0 * Q0 * Q0); }

std::pair<cplx, cplx> closed_form(cplx Q0, cplx P0, const std::vector<cplx> &path, double max_step) {
  const cplx E0 = energy(Q0, P0);
  auto square = [&](cplx z) { return Q0 * Q0 + 2.0 * Q0 * P0 * z + 2.0 * E0 * z * z; };
  cplx Q = Q0, z = path.empty() ? cplx(0) : path.front();
  for (size_t k = 1; k < path.size(); ++k) {
    const cplx a = path[k - 1], b = path[k];
    const int steps = std::max(1, int(std::ceil(std::abs(b - a) / max_step)));
    for (int i = 1; i <= steps; ++i) {
      z = a + (b - a) * (double(i) / steps);
      const cplx r = std::sqrt(square(z));
      Q = (std::abs(r - Q) <= std::abs(r + Q)) ? r : -r;
    }
  }
  const cplx P = (Q0 * P0 + 2.0 * E0 * z) / Q;
  return {Q, P};
}

std::pair<cplx, cplx> closed_form(cplx Q0, cplx P0, cplx z, double max_step) {
  return closed_form(Q0, P0, std::vector<cplx>{0.0, z}, max_step);
}

Point to_point(cplx Q, cplx P) {
  Point p(4);
  p << Q.real(), P.real(), Q.imag(), P.imag();
  return p;
}

std::pair<cplx, cplx> from_point(const Point &p) { return {{p[0], p[2]}, {p[1], p[3]}}; }

}  // namespace central

PhhsModel build_central_problem() {
  std::vector<Point> samples;
  for (double dq : {-0.3, 0.0, 0.3})
    for (double dp : {-0.3, 0.3})
      for (double iy : {-0.2, 0.2}) samples.push_back(central::to_point({1 + dq, iy}, {0.5 + dp, -iy}));
  PhhsModel model = standard_model(1, "P^2/2 - 1/(8*Q^2)", samples, 1e-6);
  model.name = "central";
  model.base_point = central::to_point(1.0, 0.5);
  model.closed_form = [](const Point &x0, const std::vector<cplx> &path) {
    auto [Q0, P0] = central::from_point(x0);
    auto [Q, P] = central::closed_form(Q0, P0, path);
    return central::to_point(Q, P);
  };
  return model;
}

Lattice gaussian_lattice(int n) { return {Mat::Identity(2 * n, 2 * n)}; }

double torus_distance(const Lattice &L, const CVec &a, const CVec &b, int reach) {
  const Vec d = from_complex(CVec(a - b));
  // reduce by the nearest lattice vector, then scan small corrections
  const Vec k0 = L.generators.fullPivLu().solve(d).array().round().matrix();
  const int dim = int(k0.size());
  double best = (d - L.generators * k0).norm();
  std::vector<int> off(dim, -reach);
  for (;;) {
    Vec k = k0;
    for (int i = 0; i < dim; ++i) k[i] += off[i];
    best = std::min(best, (d - L.generators * k).norm());
    int i = 0;
    while (i < dim && ++off[i] > reach) off[i++] = -reach;
    if (i == dim) break;
  }
  return best;
}

PhhsModel build_torus_model(const Lattice &L, const std::string &H) {
  const int n = L.n();
  if (Eigen::FullPivLU<Mat>(L.generators).rank() != 2 * n) throw InvalidModel("lattice generators are dependent");
  std::string expr = H;
  if (expr.empty()) {
    for (int j = 1; j <= n; ++j) expr += (j > 1 ? " + " : "") + std::string("P") + std::to_string(j) + "^2/2";
  }
  PhhsModel model = standard_model(n, expr, default_samples(4 * n), 1e-6);
  model.name = "torus";
  // H may only depend on P
  const int m = 2 * n;
  double worst = 0;
  for (const auto &p : model.samples) {
    const Vec g = gradient(model.H_R, p);
    for (int j = 0; j < n; ++j) worst = std::max({worst, std::abs(g[j]), std::abs(g[m + j])});
  }
  if (worst > 1e-6) throw QDependence("torus Hamiltonian depends on Q (|dH/dQ| = " + std::to_string(worst) + ")");
  if (H.empty()) {
    // straight lines Q + z P, reduced modulo L only by the caller
    model.closed_form = [n](const Point &x0, const std::vector<cplx> &path) {
      CVec z = to_complex(x0);
      const cplx w = path.empty() ? cplx(0) : path.back();
      for (int j = 0; j < n; ++j) z[j] += w * z[n + j];
      return from_complex(z);
    };
  }
  return model;
}

std::string OrbitClass::name(Kind k) {
  switch (k) {
    case Constant: return "constant";
    case Aperiodic: return "aperiodic*";
    case Cylinder: return "cylinder";
    case Torus: return "torus";
  }
  return "?";
}

OrbitClass classify_torus_orbit(const CVec &P0, const Lattice &L, int search_radius,
                                const std::optional<CVec> &velocity) {
  OrbitClass oc;
  const CVec w = velocity ? *velocity : P0;
  if (w.norm() == 0) {
    oc.kind = OrbitClass::Constant;
    return oc;
  }
  const int dim = int(L.generators.cols());
  const double ww = w.squaredNorm();
  std::vector<cplx> periods;
  std::vector<int> k(dim, -search_radius);
  for (;;) {
    bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    if (!zero) {
      Vec kv(dim);
      for (int i = 0; i < dim; ++i) kv[i] = k[i];
      const CVec g = to_complex(L.generators * kv);
      const cplx z = w.dot(g) / ww;  // least squares for z w = g
      if ((z * w - g).norm() <= 1e-9 * std::max(1.0, g.norm())) periods.push_back(z);
    }
    int i = 0;
    while (i < dim && ++k[i] > search_radius) k[i++] = -search_radius;
    if (i == dim) break;
  }
  auto key = [](cplx z) {
    double a = std::arg(z);
    if (a < -1e-12) a += 2 * std::numbers::pi;
    return std::make_pair(std::abs(z), a);
  };
  std::sort(periods.begin(), periods.end(), [&](cplx a, cplx b) { return key(a) < key(b); });

  for (cplx z : periods) {
    if (oc.generators_found.size() == 2) break;
    if (oc.generators_found.empty()) {
      oc.generators_found.push_back(z);
    } else {
      const cplx a = oc.generators_found[0];
      const double cross = a.real() * z.imag() - a.imag() * z.real();
      if (std::abs(cross) > 1e-9 * std::abs(a) * std::abs(z)) oc.generators_found.push_back(z);
    }
  }
  oc.rank = int(oc.generators_found.size());
  oc.kind = oc.rank == 2 ? OrbitClass::Torus : oc.rank == 1 ? OrbitClass::Cylinder : OrbitClass::Aperiodic;
  oc.caveat = oc.rank < 2;
  return oc;
}

namespace {

Mat I_matrix(double f, double h) {
  Mat I = Mat::Zero(4, 4);
  I(1, 0) = f;
  I(0, 1) = -1 / f;
  I(3, 2) = -h;
  I(2, 3) = 1 / h;
  return I;
}

}  // namespace

ProperPhhs build_proper_phhs(const std::string &f, const std::string &h, const std::string &H_R) {
  const auto vars = real_variables(2);
  const Expression fe = Expression::parse(f, vars), he = Expression::parse(h, vars), He = Expression::parse(H_R, vars);
  ProperPhhs out;
  out.I_g = {[fe, he](const Point &p) { return I_matrix(fe(p), he(p)); }};
  const auto I = out.I_g;
  const Mat J0 = standard_J(2);
  PhhsModel &model = out.model;
  model.name = "proper";
  model.m = 2;
  model.J = {[I, J0](const Point &p) -> Mat {
    const Mat Ip = I(p);
    return Ip * J0 * Ip;
  }};
  model.omega_R = constant_field(standard_omega_R(1));
  model.lambda_R = {[](const Point &p) { return standard_lambda_R(1, p); }};
  model.H_R = {[He](const Point &p) { return He(p); }};
  model.base_point = Point::Zero(4);
  model.samples = default_samples(4);

  const Mat W = standard_omega_R(1);
  for (const auto &p : model.samples) {
    const double fv = fe(p), hv = he(p);
    if (!(std::abs(fv) > 1e-12) || !(std::abs(hv) > 1e-12)) throw ZeroDenominator("f or h vanishes on the samples");
    const Mat Ip = I(p);
    if (check_acs(Ip) > 1e-9) throw InvalidModel("I_g is not an almost complex structure");
    if (max_abs(Mat(Ip.transpose() * W * Ip - W)) > 1e-9) throw InvalidModel("I_g is not omega_R-compatible");
    if (check_anticompat(W, model.J(p)) > 1e-9) throw InvalidModel("J_g is not omega_R-anticompatible");
  }
  return out;
}

MatrixField rotation_J(const Expression &phi) {
  return {[phi](const Point &p) -> Mat {
    const double c = std::cos(phi(p)), s = std::sin(phi(p));
    Mat J = Mat::Zero(4, 4);
    J(2, 0) = c, J(3, 0) = -s;  // dx1 -> cos dy1 - sin dy2
    J(2, 1) = s, J(3, 1) = c;   // dx2 -> sin dy1 + cos dy2
    J(0, 2) = -c, J(1, 2) = -s; // dy1 -> -cos dx1 - sin dx2
    J(0, 3) = s, J(1, 3) = -c;  // dy2 -> sin dx1 - cos dx2
    return J;
  }};
}

PhhsModel build_rotation_family(const std::string &phi) {
  const Expression e = Expression::parse(phi, real_variables(2));
  PhhsModel model;
  model.name = "rotation";
  model.m = 2;
  model.J = rotation_J(e);
  model.omega_R = constant_field(standard_omega_R(1));
  model.lambda_R = {[](const Point &p) { return standard_lambda_R(1, p); }};
  model.H_R = constant_field(0.0);
  model.base_point = Point::Zero(4);
  model.samples = default_samples(4);
  for (const auto &p : model.samples)
    if (check_anticompat(model.omega_R(p), model.J(p)) > 1e-9) throw InvalidModel("J_phi is not anticompatible");
  return model;
}

ScalarField bump(const Point &center, double radius) {
  return {[center, radius](const Point &p) {
    const double q = (p - center).squaredNorm() / (radius * radius);
    return q < 1 ? std::exp(1 - 1 / (1 - q)) : 0.0;
  }};
}

Deformation build_deformation(double eps, const ScalarField &f, int n, bool constant_H) {
  if (n < 1) throw DimensionError("deformation needs n >= 1");
  if (n == 1 && !constant_H) throw DimensionError("H = z_{2n} needs n > 1; use a constant H for n = 1");
  Deformation d;
  d.f = f;
  d.eps = eps;
  d.n = n;
  const int m = 2 * n;
  const Mat J0 = standard_J(m);
  PhhsModel &model = d.model;
  model.name = "deformation";
  model.m = m;
  model.J = {[f, eps, n, m, J0](const Point &p) -> Mat {
    const double r = 1 + eps * eps * f(p);
    Mat J = J0;
    J(m, 0) = r;           // dx1 -> r dy1
    J(0, m) = -1 / r;      // dy1 -> -dx1 / r
    J(m + n, n) = 1 / r;   // dx_{n+1} -> dy_{n+1} / r
    J(n, m + n) = -r;      // dy_{n+1} -> -r dx_{n+1}
    return J;
  }};
  model.omega_R = constant_field(standard_omega_R(n));
  model.lambda_R = {[n](const Point &p) { return standard_lambda_R(n, p); }};
  if (constant_H) {
    model.H_R = constant_field(0.0);
  } else {
    model.H_R = {[m](const Point &p) { return p[m - 1]; }};
  }
  model.base_point = Point::Zero(2 * m);
  model.samples = default_samples(2 * m);
  return d;
}

double Deformation::expected_d_omega_I(const Point &p, int a, int b, int c) const {
  const int m = 2 * n;
  const double r = 1 + eps * eps * f(p);
  const Vec df = gradient(f, p);
  Mat beta = Mat::Zero(2 * m, 2 * m);
  beta(m + n, 0) = 1;  // dy_{n+1} ^ dx_1
  beta(0, m + n) = -1;
  beta(n, m) = -1 / (r * r);  // -r^{-2} dx_{n+1} ^ dy_1
  beta(m, n) = 1 / (r * r);
  return eps * eps * (df[a] * beta(b, c) - df[b] * beta(a, c) + df[c] * beta(a, b));
}

HyperkahlerReport hyperkahler_check(double f, double h) {
  const Mat I = I_matrix(f, h), J = standard_J(2);
  HyperkahlerReport r;
  r.anticommutator = max_abs(Mat(I * J + J * I));
  r.J_delta_minus_J = max_abs(Mat(I * J * I - J));
  r.I_square = check_acs(I);
  return r;
}

}  // namespace phhs
