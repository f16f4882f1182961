#include "phhs/flow.hpp"

#include <cmath>
#include <numbers>

namespace phhs {

namespace {

void guard(const Point &x, const FlowConfig &cfg) {
  for (int i = 0; i < x.size(); ++i)
    if (!std::isfinite(x[i]) || std::abs(x[i]) > cfg.blowup)
      throw NonFiniteState("state left the finite region (coordinate " + std::to_string(i) + ")");
}

Point rk4(const VectorField &V, Point x, double t, long n, const FlowConfig &cfg) {
  const double h = t / double(n);
  for (long k = 0; k < n; ++k) {
    const Vec k1 = V(x);
    const Vec k2 = V(Point(x + 0.5 * h * k1));
    const Vec k3 = V(Point(x + 0.5 * h * k2));
    const Vec k4 = V(Point(x + h * k3));
    x += (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    guard(x, cfg);
  }
  return x;
}

VectorField combine(const HamiltonianFields &f, double a, double b) {
  const auto X = f.X, JX = f.JX;
  if (b == 0) return {[X, a](const Point &p) -> Vec { return a * X(p); }, X.fd};
  if (a == 0) return {[JX, b](const Point &p) -> Vec { return b * JX(p); }, X.fd};
  return {[X, JX, a, b](const Point &p) -> Vec { return a * X(p) + b * JX(p); }, X.fd};
}

}  // namespace

FlowResult flow_ex(const VectorField &V, const Point &x0, double t, const FlowConfig &cfg) {
  FlowResult r;
  r.x = x0;
  if (t == 0) return r;
  const long n = std::max(1L, long(std::ceil(std::abs(t) / cfg.dt - 1e-9)));
  if (n > cfg.max_step_count || (cfg.richardson && 2 * n > cfg.max_step_count))
    throw StepBudgetExceeded("flow needs " + std::to_string(n) + " steps");
  r.x = rk4(V, x0, t, n, cfg);
  r.steps = n;
  if (cfg.richardson) {
    const Point fine = rk4(V, x0, t, 2 * n, cfg);
    r.error_estimate = (fine - r.x).norm() * 16 / 15;  // error of the returned (full-step) value
    r.steps += 2 * n;
  }
  return r;
}

GridCurve trajectory_grid(const PhhsModel &model, const HamiltonianFields &fields, const Point &x0, cplx z0,
                          const GridSpec &spec, const FlowConfig &cfg) {
  GridCurve g;
  g.spec = spec;
  g.z0 = z0;
  g.x0 = x0;
  g.values.assign(size_t(spec.nt) * spec.ns, x0);
  auto nearest = [](double v, double lo, double hi, int n) {
    if (n <= 1) return 0;
    return int(std::lround((v - lo) / (hi - lo) * (n - 1)));
  };
  g.i0 = nearest(z0.real(), spec.t0, spec.t1, spec.nt);
  g.j0 = nearest(z0.imag(), spec.s0, spec.s1, spec.ns);
  if (g.i0 < 0 || g.i0 >= spec.nt || g.j0 < 0 || g.j0 >= spec.ns ||
      std::abs(spec.z(g.i0, g.j0) - z0) > 1e-12 * std::max(1.0, std::abs(z0)))
    throw ConfigError("anchor time is not a grid node");

  const auto &X = fields.X;
  const auto &JX = fields.JX;
  // anchor row along X
  g.at(g.i0, g.j0) = x0;
  for (int i = g.i0 + 1; i < spec.nt; ++i) g.at(i, g.j0) = flow(X, g.at(i - 1, g.j0), spec.t(i) - spec.t(i - 1), cfg);
  for (int i = g.i0 - 1; i >= 0; --i) g.at(i, g.j0) = flow(X, g.at(i + 1, g.j0), spec.t(i) - spec.t(i + 1), cfg);
  // columns along JX, independent per column
  parallel_for(spec.nt, [&](int i) {
    for (int j = g.j0 + 1; j < spec.ns; ++j) g.at(i, j) = flow(JX, g.at(i, j - 1), spec.s(j) - spec.s(j - 1), cfg);
    for (int j = g.j0 - 1; j >= 0; --j) g.at(i, j) = flow(JX, g.at(i, j + 1), spec.s(j) - spec.s(j + 1), cfg);
  });

  // swap defect at the corner farthest from the anchor
  const int ic = (g.i0 < spec.nt - 1 - g.i0) ? spec.nt - 1 : 0;
  const int jc = (g.j0 < spec.ns - 1 - g.j0) ? spec.ns - 1 : 0;
  {
    const Point a = flow(JX, x0, spec.s(jc) - spec.s(g.j0), cfg);
    const Point b = flow(X, a, spec.t(ic) - spec.t(g.i0), cfg);
    g.swap_defect = (b - g.at(ic, jc)).norm();
  }

  const double hr0 = model.H_R(x0), hi0 = fields.H_I(x0);
  for (const auto &p : g.values) {
    g.drift_R = std::max(g.drift_R, std::abs(model.H_R(p) - hr0));
    g.drift_I = std::max(g.drift_I, std::abs(fields.H_I(p) - hi0));
  }

  // Cauchy-Riemann residual by grid differences (second-order one-sided at edges)
  auto diff = [](const Point &m2, const Point &m1, const Point &c, const Point &p1, const Point &p2, int pos, int n,
                 double h) -> Vec {
    if (pos == 0) return (-3 * c + 4 * p1 - p2) / (2 * h);
    if (pos == n - 1) return (3 * c - 4 * m1 + m2) / (2 * h);
    return (p1 - m1) / (2 * h);
  };
  g.node_cr.assign(g.values.size(), 0);
  if (spec.nt >= 3 && spec.ns >= 3) {
    const double ht = (spec.t1 - spec.t0) / (spec.nt - 1), hs = (spec.s1 - spec.s0) / (spec.ns - 1);
    for (int i = 0; i < spec.nt; ++i)
      for (int j = 0; j < spec.ns; ++j) {
        auto T = [&](int k) -> const Point & { return g.at(std::clamp(k, 0, spec.nt - 1), j); };
        auto S = [&](int k) -> const Point & { return g.at(i, std::clamp(k, 0, spec.ns - 1)); };
        const Vec dt = diff(T(i - 2), T(i - 1), T(i), T(i + 1), T(i + 2), i, spec.nt, ht);
        const Vec ds = diff(S(j - 2), S(j - 1), S(j), S(j + 1), S(j + 2), j, spec.ns, hs);
        const double r = max_abs(Vec(ds - model.J(g.at(i, j)) * dt));
        g.node_cr[size_t(i) * spec.ns + j] = r;
        g.cr_residual = std::max(g.cr_residual, r);
      }
  }
  return g;
}

Point tilted_flow(const HamiltonianFields &fields, const Point &x0, double alpha, double r, const FlowConfig &cfg) {
  return flow(combine(fields, std::cos(alpha), std::sin(alpha)), x0, r, cfg);
}

Point flow_word(const HamiltonianFields &fields, const Point &x0, const std::vector<std::pair<double, double>> &word,
                const FlowConfig &cfg) {
  Point x = x0;
  for (auto it = word.rbegin(); it != word.rend(); ++it) {
    x = flow(fields.JX, x, it->second, cfg);
    x = flow(fields.X, x, it->first, cfg);
  }
  return x;
}

Point continue_along_path(const HamiltonianFields &fields, const Point &x0, const std::vector<cplx> &path,
                          const FlowConfig &cfg) {
  Point x = x0;
  for (size_t k = 1; k < path.size(); ++k) {
    const cplx dz = path[k] - path[k - 1];
    if (dz == cplx(0)) throw ConfigError("time path has repeated nodes");
    const double len = std::abs(dz);
    x = flow(combine(fields, dz.real() / len, dz.imag() / len), x, len, cfg);
  }
  return x;
}

double commutation_defect(const HamiltonianFields &fields, const Point &x0, double t, double s, const FlowConfig &cfg) {
  const Point a = flow(fields.X, flow(fields.JX, x0, s, cfg), t, cfg);
  const Point b = flow(fields.JX, flow(fields.X, x0, t, cfg), s, cfg);
  return (a - b).norm();
}

std::vector<cplx> circle_path(cplx center, double r, int turns, int segments_per_turn, double phase) {
  std::vector<cplx> path;
  const int n = turns * segments_per_turn;
  for (int k = 0; k <= n; ++k)
    path.push_back(center + std::polar(r, phase + 2 * std::numbers::pi * k / segments_per_turn));
  path.back() = path.front();
  return path;
}

}  // namespace phhs
