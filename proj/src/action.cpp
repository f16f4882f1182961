#include "phhs/action.hpp"

#include "phhs/quadrature.hpp"

#include <cmath>
#include <limits>

namespace phhs {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<Point> gather(const CellAction &a, int c) {
  std::vector<Point> corners;
  corners.reserve(a.cells[c].size());
  for (int n : a.cells[c]) corners.push_back(a.nodes[n]);
  return corners;
}

cplx finish(const ActionContext &ctx, cplx v) { return ctx.mode == ActionMode::Real ? cplx(v.real(), 0) : v; }

// Simpson weights on M intervals of [0, pi]; M even.
std::vector<double> half_turn_weights(int M) {
  if (M < 2 || M % 2) throw ConfigError("variant 2 needs na divisible by 4");
  return quad::simpson_weights(M, kPi / M);
}

}  // namespace

cplx ActionContext::lambda(const Point &x, const Vec &v) const {
  const Vec L = model.lambda_R(x);
  if (mode == ActionMode::Real) return {L.dot(v), 0};
  return {L.dot(v), -L.dot(model.J(x) * v)};
}

cplx ActionContext::lambda_R(const Point &x, const Vec &a, const Vec &b) const {
  const Vec L = model.lambda_R(x);
  return {L.dot(a), L.dot(b)};
}

ActionContext make_action_context(const PhhsModel &model, const HamiltonianFields &fields, ActionMode mode) {
  if (!model.lambda_R) throw MissingPrimitive("model has no Liouville primitive lambda_R");
  if (mode == ActionMode::Complex && !model.holomorphic)
    throw MissingPrimitive("Lambda_I is undefined for a proper PHHS; use the real-valued functionals");
  return {model, fields, mode};
}

cplx CellAction::value() const { return value_and_magnitude().first; }

std::pair<cplx, double> CellAction::value_and_magnitude() const {
  cplx sum = 0;
  double mag = 0;
  for (int c = 0; c < int(cells.size()); ++c) {
    const auto corners = gather(*this, c);
    const cplx v = eval(c, corners);
    sum += v;
    mag += magnitude ? magnitude(c, corners) : std::abs(v);
  }
  return {sum, mag};
}

CellAction segment_cells(const ActionContext &ctx, const std::vector<Point> &nodes, double r0, double r1,
                         double alpha) {
  if (nodes.size() < 2 || !(r1 > r0)) throw ConfigError("segment needs >= 2 nodes and r1 > r0");
  CellAction a;
  a.nodes = nodes;
  const int n = int(nodes.size()) - 1;
  for (int k = 0; k < n; ++k) a.cells.push_back({k, k + 1});
  a.fixed.assign(nodes.size(), false);
  a.fixed.front() = a.fixed.back() = true;
  const double h = (r1 - r0) / n;
  const cplx e = std::polar(1.0, alpha);
  a.eval = [ctx, h, e](int, const std::vector<Point> &c) {
    const Point mid = 0.5 * (c[0] + c[1]);
    return finish(ctx, ctx.lambda(mid, c[1] - c[0]) - e * ctx.H(mid) * h);
  };
  return a;
}

cplx segment_action(const ActionContext &ctx, const std::vector<Point> &nodes, double r0, double r1, double alpha) {
  return segment_cells(ctx, nodes, r0, r1, alpha).value();
}

cplx ParallelogramGrid::z(int i, int j) const {
  const double t = nt > 1 ? t0 + (t1 - t0) * i / (nt - 1) : t0;
  const double r = nr > 1 ? r0 + (r1 - r0) * j / (nr - 1) : r0;
  return t + std::polar(r, alpha);
}

ParallelogramGrid parallelogram_of(const GridSpec &spec) {
  ParallelogramGrid g;
  g.t0 = spec.t0, g.t1 = spec.t1, g.r0 = spec.s0, g.r1 = spec.s1;
  g.nt = spec.nt, g.nr = spec.ns;
  g.alpha = kPi / 2;
  return g;
}

CellAction parallelogram_cells(const ActionContext &ctx, const ParallelogramGrid &grid,
                               const std::vector<Point> &nodes) {
  const double sa = std::sin(grid.alpha), ca = std::cos(grid.alpha);
  if (std::abs(sa) < 1e-12) throw ConfigError("parallelogram angle must not be a multiple of pi");
  if (grid.nt < 2 || grid.nr < 2 || !(grid.t1 > grid.t0) || !(grid.r1 > grid.r0))
    throw ConfigError("parallelogram grid is degenerate");
  if (int(nodes.size()) != grid.nt * grid.nr) throw DimensionError("node count does not match the grid");
  CellAction a;
  a.nodes = nodes;
  const int nr = grid.nr;
  for (int i = 0; i + 1 < grid.nt; ++i)
    for (int j = 0; j + 1 < nr; ++j)
      a.cells.push_back({i * nr + j, (i + 1) * nr + j, i * nr + j + 1, (i + 1) * nr + j + 1});
  a.fixed.assign(nodes.size(), false);
  for (int i = 0; i < grid.nt; ++i)
    for (int j = 0; j < nr; ++j)
      if (i == 0 || j == 0 || i == grid.nt - 1 || j == nr - 1) a.fixed[i * nr + j] = true;
  const double ht = (grid.t1 - grid.t0) / (grid.nt - 1), hr = (grid.r1 - grid.r0) / (nr - 1);
  // box scheme: edge-averaged differences at the cell centre
  a.eval = [ctx, ht, hr, sa, ca](int, const std::vector<Point> &c) {
    const Point mid = 0.25 * (c[0] + c[1] + c[2] + c[3]);
    const Vec dt = ((c[1] + c[3]) - (c[0] + c[2])) / (2 * ht);
    const Vec dr = ((c[2] + c[3]) - (c[0] + c[1])) / (2 * hr);
    const Vec ds = (dr - ca * dt) / sa;
    return (ctx.lambda_R(mid, dt, Vec(-ds)) - ctx.H(mid)) * (sa * ht * hr);
  };
  return a;
}

cplx parallelogram_action(const ActionContext &ctx, const ParallelogramGrid &grid, const std::vector<Point> &nodes) {
  return parallelogram_cells(ctx, grid, nodes).value();
}

double PolarGrid::alpha(int l) const { return 2 * kPi * l / na; }

int PolarGrid::node(int k, int l) const {
  if (k == 0) return 0;
  const int lm = ((l % na) + na) % na;
  return 1 + lm * nr + (k - 1);
}

cplx PolarGrid::z(int k, int l) const { return z0 + std::polar(radius(l) * k / nr, alpha(l)); }

PolarGrid disk_grid(cplx z0, double R, int nr, int na) {
  if (!(R > 0)) throw ConfigError("disk radius must be positive");
  PolarGrid g;
  g.z0 = z0;
  g.R = [R](double) { return R; };
  g.nr = nr;
  g.na = na;
  return g;
}

std::vector<Point> sample_polar(const CurveFn &gamma, const PolarGrid &grid) {
  std::vector<Point> nodes(grid.size());
  nodes[0] = gamma(grid.z0);
  for (int l = 0; l < grid.na; ++l)
    for (int k = 1; k <= grid.nr; ++k) nodes[grid.node(k, l)] = gamma(grid.z(k, l));
  return nodes;
}

std::vector<Point> sample_parallelogram(const CurveFn &gamma, const ParallelogramGrid &grid) {
  std::vector<Point> nodes(size_t(grid.nt) * grid.nr);
  for (int i = 0; i < grid.nt; ++i)
    for (int j = 0; j < grid.nr; ++j) nodes[size_t(i) * grid.nr + j] = gamma(grid.z(i, j));
  return nodes;
}

std::vector<Point> polar_trajectory(const HamiltonianFields &fields, const Point &x0, const PolarGrid &grid,
                                    const FlowConfig &cfg) {
  std::vector<Point> nodes(grid.size(), x0);
  parallel_for(grid.na, [&](int l) {
    Point x = x0;
    const double h = grid.radius(l) / grid.nr;
    for (int k = 1; k <= grid.nr; ++k) nodes[grid.node(k, l)] = x = tilted_flow(fields, x, grid.alpha(l), h, cfg);
  });
  return nodes;
}

cplx normalization_hat_R(const PolarGrid &grid) {
  const int M = grid.na / 2;
  const auto w = half_turn_weights(M);
  cplx s = 0;
  for (int l = 0; l <= M; ++l) s += w[l] * std::polar(1.0, grid.alpha(l)) * (grid.radius(l) + grid.radius(l + M));
  return cplx(0, -0.25) * s;
}

CellAction star_cells(const ActionContext &ctx, const PolarGrid &grid, const std::vector<Point> &nodes, int variant) {
  if (variant != 1 && variant != 2) throw ConfigError("action variant must be 1 or 2");
  if (grid.nr < 1 || grid.na < 4) throw ConfigError("polar grid is too coarse");
  if (int(nodes.size()) != grid.size()) throw DimensionError("node count does not match the polar grid");
  for (int l = 0; l < grid.na; ++l)
    if (!(grid.radius(l) > 0)) throw ConfigError("boundary radius must be positive");

  CellAction a;
  a.nodes = nodes;
  a.fixed.assign(nodes.size(), false);
  for (int l = 0; l < grid.na; ++l) a.fixed[grid.node(grid.nr, l)] = true;

  // per cell: oriented segment with weight, angle and radial length
  struct Seg {
    double weight, alpha, dr;
  };
  std::vector<Seg> segs;
  cplx scale = 1;
  if (variant == 1) {
    a.fixed[0] = true;
    for (int l = 0; l < grid.na; ++l)
      for (int k = 0; k < grid.nr; ++k) {
        a.cells.push_back({grid.node(k, l), grid.node(k + 1, l)});
        segs.push_back({1.0 / grid.na, grid.alpha(l), grid.radius(l) / grid.nr});
      }
  } else {
    const int M = grid.na / 2;
    const auto w = half_turn_weights(M);
    for (int l = 0; l <= M; ++l) {
      const double al = grid.alpha(l);
      // r from -R(alpha - pi) to 0 along the opposite ray, then 0 to R(alpha)
      for (int k = grid.nr; k > 0; --k) {
        a.cells.push_back({grid.node(k, l + M), grid.node(k - 1, l + M)});
        segs.push_back({w[l], al, grid.radius(l + M) / grid.nr});
      }
      for (int k = 0; k < grid.nr; ++k) {
        a.cells.push_back({grid.node(k, l), grid.node(k + 1, l)});
        segs.push_back({w[l], al, grid.radius(l) / grid.nr});
      }
    }
    if (ctx.mode == ActionMode::Complex) scale = cplx(0, 1) / (4.0 * normalization_hat_R(grid));
  }
  a.eval = [ctx, segs, scale](int c, const std::vector<Point> &p) {
    const Seg &s = segs[c];
    const Point mid = 0.5 * (p[0] + p[1]);
    const cplx v = ctx.lambda(mid, p[1] - p[0]) - std::polar(1.0, s.alpha) * ctx.H(mid) * s.dr;
    return finish(ctx, scale * s.weight * v);
  };
  a.magnitude = [ctx, segs, scale](int c, const std::vector<Point> &p) {
    const Seg &s = segs[c];
    const Point mid = 0.5 * (p[0] + p[1]);
    const double lam = ctx.model.lambda_R(mid).cwiseAbs().dot((p[0].cwiseAbs() + p[1].cwiseAbs()));
    return std::abs(scale) * s.weight * (2 * lam + std::abs(ctx.H(mid)) * s.dr);
  };
  return a;
}

cplx star_action(const ActionContext &ctx, const PolarGrid &grid, const std::vector<Point> &nodes, int variant) {
  return star_cells(ctx, grid, nodes, variant).value();
}

cplx disk_action_1(const ActionContext &ctx, const PolarGrid &grid, const std::vector<Point> &nodes) {
  return star_action(ctx, grid, nodes, 1);
}

cplx disk_action_2(const ActionContext &ctx, const PolarGrid &grid, const std::vector<Point> &nodes) {
  return star_action(ctx, grid, nodes, 2);
}

QuadratureEstimate star_action_estimate(const ActionContext &ctx, const CurveFn &gamma, const PolarGrid &grid,
                                        int variant) {
  PolarGrid coarse = grid;
  coarse.nr = grid.nr / 2;
  coarse.na = grid.na / 2;
  if (coarse.nr < 1 || coarse.na < 4 || grid.nr % 2 || grid.na % 2) throw ConfigError("grid cannot be halved");
  const auto [fine, mag] = star_cells(ctx, grid, sample_polar(gamma, grid), variant).value_and_magnitude();
  const cplx crude = star_action(ctx, coarse, sample_polar(gamma, coarse), variant);
  QuadratureEstimate q;
  q.value = fine;
  q.truncation = std::abs(fine - crude) / 3;  // second order: error(h) ~ (A_2h - A_h)/3
  q.rounding = 8 * std::numeric_limits<double>::epsilon() * mag;
  q.error = q.truncation + q.rounding;
  return q;
}

cplx cartesian_disk_action(const ActionContext &ctx, const CurveFn &gamma, cplx z0, double R, int variant, int n) {
  if (variant != 1 && variant != 2) throw ConfigError("action variant must be 1 or 2");
  if (n < 2 || n % 2) throw ConfigError("cartesian grid needs an even cell count");
  const double h = 2 * R / n, d = 1e-5 * std::max(1.0, R);
  const cplx I(0, 1);
  auto lam = [&](const Point &x, const Vec &a, const Vec &b) { return ctx.lambda(x, a) + I * ctx.lambda(x, b); };
  cplx plus = 0, minus = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const cplx w(-R + (i + 0.5) * h, -R + (j + 0.5) * h);
      if (std::abs(w) > R) continue;
      const cplx z = z0 + w;
      const Point x = gamma(z);
      const Vec gt = (gamma(z + d) - gamma(z - d)) / (2 * d);
      const Vec gs = (gamma(z + I * d) - gamma(z - I * d)) / (2 * d);
      // d_z = (d_t - i d_s)/2, d_zbar = (d_t + i d_s)/2
      const cplx f = lam(x, 0.5 * gt, -0.5 * gs) - ctx.H(x);
      const cplx g = lam(x, 0.5 * gt, 0.5 * gs);
      const cplx v = (f / std::conj(w) + g / w) * (h * h);
      (w.imag() >= 0 ? plus : minus) += v;
    }
  cplx out;
  if (variant == 1) {
    out = (plus + minus) / (2 * kPi);
  } else {
    out = plus - minus;
    if (ctx.mode == ActionMode::Complex) out *= I / (4 * R);
  }
  return finish(ctx, out);
}

VariationalGradient variational_gradient(const CellAction &action, double h) {
  const int N = int(action.nodes.size());
  std::vector<std::vector<int>> touching(N);
  for (int c = 0; c < int(action.cells.size()); ++c)
    for (int n : action.cells[c]) touching[n].push_back(c);

  VariationalGradient g;
  const int dim = N ? int(action.nodes[0].size()) : 0;
  g.re.assign(N, Vec::Zero(dim));
  g.im.assign(N, Vec::Zero(dim));
  parallel_for(N, [&](int n) {
    if (action.fixed[n]) return;
    for (int a = 0; a < dim; ++a) {
      cplx diff = 0;
      for (int c : touching[n]) {
        auto corners = gather(action, c);
        const auto &ids = action.cells[c];
        for (double sign : {1.0, -1.0}) {
          for (size_t q = 0; q < ids.size(); ++q)
            if (ids[q] == n) corners[q][a] = action.nodes[n][a] + sign * h;
          diff += sign * action.eval(c, corners);
        }
      }
      g.re[n][a] = diff.real() / (2 * h);
      g.im[n][a] = diff.imag() / (2 * h);
    }
  });
  for (int n = 0; n < N; ++n) {
    g.max_re = std::max(g.max_re, max_abs(g.re[n]));
    g.max_im = std::max(g.max_im, max_abs(g.im[n]));
  }
  return g;
}

}  // namespace phhs
