#include "phhs/connection.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>

namespace phhs {

namespace {

Mat checked_inverse(const Mat &g) {
  Eigen::FullPivLU<Mat> lu(g);
  const double scale = std::max(1.0, max_abs(g));
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12 * std::pow(scale, g.rows()))
    throw SingularMetric("metric is not invertible at the evaluation point");
  return lu.inverse();
}

// A(j, k) = Gamma^j_{kl} v^l
Mat connection_matrix(const Christoffel &G, const Vec &v) {
  const int n = int(v.size());
  Mat A(n, n);
  for (int j = 0; j < n; ++j) A.row(j) = (G[j] * v).transpose();
  return A;
}

// d(g v)/dx: B(i, k) = d_k g_il v^l
Mat metric_drift(const MetricField &g, const Point &q, const Vec &v) {
  const auto dg = matrix_jet(g, q);
  const int n = int(q.size());
  Mat B(n, n);
  for (int k = 0; k < n; ++k) B.col(k) = dg[k] * v;
  return B;
}

}  // namespace

Christoffel christoffel(const MetricField &g, const Point &x) {
  const int n = int(x.size());
  const Mat gi = checked_inverse(g(x));
  const auto dg = matrix_jet(g, x);
  Christoffel G(n, Mat::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int l = k; l < n; ++l) {
        double s = 0;
        for (int m = 0; m < n; ++m) s += gi(i, m) * (dg[k](m, l) + dg[l](m, k) - dg[m](k, l));
        G[i](k, l) = G[i](l, k) = 0.5 * s;
      }
  return G;
}

std::pair<int, int> signature(const Mat &g, double tol) {
  const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (g + g.transpose()));
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  int s = 0, t = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double e = es.eigenvalues()[i];
    if (std::abs(e) <= tol * scale) throw SingularMetric("form has a zero eigenvalue");
    (e > 0 ? s : t)++;
  }
  return {s, t};
}

double Riemann::max_abs() const {
  double m = 0;
  for (double v : data) m = std::max(m, std::abs(v));
  return m;
}

Riemann riemann_curvature(const MetricField &g, const Point &x, const FdConfig &outer) {
  const int n = int(x.size());
  const Christoffel G = christoffel(g, x);
  std::vector<Christoffel> dG;  // dG[k][i](l, j) = d_k Gamma^i_{lj}
  for (int k = 0; k < n; ++k) {
    auto f = [&](const Point &q) {
      const Christoffel c = christoffel(g, q);
      Mat flat(n, n * n);
      for (int i = 0; i < n; ++i) flat.middleCols(i * n, n) = c[i];
      return flat;
    };
    const Mat d = partial_jet(f, x, k, outer);
    Christoffel ck(n);
    for (int i = 0; i < n; ++i) ck[i] = d.middleCols(i * n, n);
    dG.push_back(ck);
  }
  Riemann R;
  R.n = n;
  R.data.assign(size_t(n) * n * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          double v = dG[k][i](l, j) - dG[l][i](k, j);
          for (int m = 0; m < n; ++m) v += G[i](k, m) * G[m](l, j) - G[i](l, m) * G[m](k, j);
          R.data[((size_t(i) * n + j) * n + k) * n + l] = v;
        }
  return R;
}

Mat j_tangent(const MetricField &g, const Point &x, const Vec &v) {
  const int n = int(x.size());
  const Mat A = connection_matrix(christoffel(g, x), v);
  const Mat I = Mat::Identity(n, n);
  Mat J(2 * n, 2 * n);
  J << A, I, -I - A * A, -A;
  return J;
}

MatrixField j_tangent_field(const MetricField &g) {
  return {[g](const Point &w) -> Mat {
            const int n = int(w.size() / 2);
            return j_tangent(g, w.head(n), w.tail(n));
          },
          {1e-3, 4, true}};
}

Mat j_cotangent(const MetricField &g, const Point &q, const Vec &p) {
  const int n = int(q.size());
  const Mat gq = g(q);
  const Mat gi = checked_inverse(gq);
  const Vec v = gi * p;
  const Mat B = metric_drift(g, q, v);
  const Mat I = Mat::Identity(n, n), Z = Mat::Zero(n, n);
  Mat dG(2 * n, 2 * n), dGi(2 * n, 2 * n);
  dG << I, Z, B, gq;
  dGi << I, Z, -gi * B, gi;
  return dG * j_tangent(g, q, v) * dGi;
}

MatrixField j_cotangent_field(const MetricField &g) {
  return {[g](const Point &w) -> Mat {
            const int n = int(w.size() / 2);
            return j_cotangent(g, w.head(n), w.tail(n));
          },
          {1e-3, 4, true}};
}

Mat omega_can(int n) {
  Mat W = Mat::Zero(2 * n, 2 * n);
  W.topRightCorner(n, n) = -Mat::Identity(n, n);
  W.bottomLeftCorner(n, n) = Mat::Identity(n, n);
  return W;
}

CompatibilityReport cotangent_compatibility(const MetricField &g, const Point &q, const Vec &p) {
  const int n = int(q.size());
  const Mat J = j_cotangent(g, q, p);
  const Mat m = omega_can(n) * J;
  CompatibilityReport r;
  r.square = max_abs(Mat(J * J + Mat::Identity(2 * n, 2 * n)));
  r.asymmetry = max_abs(Mat(m - m.transpose()));
  r.signature = signature(m, 1e-10);
  return r;
}

FlatnessReport flatness_vs_integrability(const MetricField &g, const std::vector<Point> &grid) {
  FlatnessReport rep;
  rep.samples.resize(grid.size());
  const MatrixField J = j_cotangent_field(g);
  parallel_for(int(grid.size()), [&](int i) {
    const Point &w = grid[i];
    const int n = int(w.size() / 2);
    rep.samples[i] = {w, riemann_curvature(g, w.head(n)).max_abs(), nijenhuis(J, w).max_abs()};
  });
  for (const auto &s : rep.samples) {
    rep.max_curvature = std::max(rep.max_curvature, s.curvature);
    rep.max_nijenhuis = std::max(rep.max_nijenhuis, s.nijenhuis);
  }
  return rep;
}

CMat HoloMetric::at(const Point &p) const {
  CMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = eval_complex(h[size_t(i) * n + j], vars, p);
  return m;
}

MetricField HoloMetric::real_part(const FdConfig &fd) const {
  const HoloMetric self = *this;
  return {[self](const Point &p) -> Mat {
            const CMat c = self.at(p);
            Mat g(2 * self.n, 2 * self.n);
            g << c.real(), -c.imag(), -c.imag(), -c.real();
            return g;
          },
          fd};
}

MetricField HoloMetric::imag_part(const FdConfig &fd) const {
  const HoloMetric self = *this;
  return {[self](const Point &p) -> Mat {
            const CMat c = self.at(p);
            Mat g(2 * self.n, 2 * self.n);
            g << c.imag(), c.real(), c.real(), -c.imag();
            return g;
          },
          fd};
}

HoloMetric parse_holo_metric(const std::vector<std::string> &components, int n, const std::vector<Point> &samples,
                             double tol) {
  if (n < 1 || int(components.size()) != n * n) throw DimensionError("holomorphic metric needs n*n components");
  HoloMetric h;
  h.n = n;
  h.vars = complex_variables(n, false);
  for (const auto &c : components) h.h.push_back(Expression::parse(c, h.vars.names));

  for (const auto &p : samples) {
    if (p.size() != 2 * n) throw DimensionError("sample point has the wrong dimension");
    const CMat m = h.at(p);
    if (max_abs(Mat((m - m.transpose()).cwiseAbs())) > tol) throw InvalidModel("holomorphic metric is not symmetric");
    if (std::abs(m.determinant()) < 1e-10) throw SingularMetric("holomorphic metric degenerates at a sample");
    for (size_t c = 0; c < h.h.size(); ++c) {
      auto f = [&](const Point &q) { return eval_complex(h.h[c], h.vars, q); };
      for (int j = 0; j < n; ++j) {
        // Cauchy-Riemann: d_y f = i d_x f
        const cplx fx = partial_jet(f, p, j), fy = partial_jet(f, p, n + j);
        if (std::abs(fy - cplx(0, 1) * fx) > tol)
          throw NotHolomorphic("metric component " + std::to_string(c) + " fails the Cauchy-Riemann equations");
      }
    }
  }
  return h;
}

HoloLcReport holo_metric_lc_check(const HoloMetric &h, const std::vector<Point> &grid, double fd_step) {
  const FdConfig fd{fd_step, 4, false};
  const MetricField gR = h.real_part(fd), gI = h.imag_part(fd);
  std::vector<double> diff(grid.size()), scale(grid.size());
  parallel_for(int(grid.size()), [&](int s) {
    const Christoffel a = christoffel(gR, grid[s]), b = christoffel(gI, grid[s]);
    for (size_t i = 0; i < a.size(); ++i) {
      diff[s] = std::max(diff[s], max_abs(Mat(a[i] - b[i])));
      scale[s] = std::max(scale[s], max_abs(a[i]));
    }
  });
  HoloLcReport r;
  for (size_t s = 0; s < grid.size(); ++s) {
    if (diff[s] >= r.max_difference) r.worst = grid[s];
    r.max_difference = std::max(r.max_difference, diff[s]);
    r.max_christoffel = std::max(r.max_christoffel, scale[s]);
  }
  return r;
}

MetricField curved_test_metric() {
  return {[](const Point &x) -> Mat {
    Mat g = Mat::Identity(2, 2);
    g(1, 1) = 1 + x[0] * x[0];
    return g;
  }};
}

MetricField polar_metric() {
  return {[](const Point &x) -> Mat {
    Mat g = Mat::Identity(2, 2);
    g(1, 1) = x[0] * x[0];
    return g;
  }};
}

MetricField euclidean_metric(int n) { return constant_field(Mat(Mat::Identity(n, n))); }

}  // namespace phhs
