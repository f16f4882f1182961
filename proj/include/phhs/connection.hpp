#pragma once

#include "phhs/expr.hpp"
#include "phhs/tensor.hpp"

namespace phhs {

/// Symmetric invertible metric on R^n; derivatives use `fd`.
using MetricField = MatrixField;

/// G[i](k, l) = Gamma^i_{kl}.
using Christoffel = std::vector<Mat>;

Christoffel christoffel(const MetricField &g, const Point &x);

/// (s, t) from eigenvalue signs; throws SingularMetric if an eigenvalue is ~0.
std::pair<int, int> signature(const Mat &g, double tol = 1e-12);

struct Riemann {
  int n = 0;
  std::vector<double> data;  ///< R^i_{jkl} at ((i*n + j)*n + k)*n + l
  double at(int i, int j, int k, int l) const { return data[((size_t(i) * n + j) * n + k) * n + l]; }
  double max_abs() const;
};

/// R^i_{jkl} = d_k G^i_{lj} - d_l G^i_{kj} + G^i_{km} G^m_{lj} - G^i_{lm} G^m_{kj};
/// the outer derivative uses `outer` spacing.
Riemann riemann_curvature(const MetricField &g, const Point &x, const FdConfig &outer = {1e-3, 4, true});

/// J_nabla on TM in (xhat, v) ordering: J(d_v) = horizontal lift, J(horizontal) = -d_v.
Mat j_tangent(const MetricField &g, const Point &x, const Vec &v);
MatrixField j_tangent_field(const MetricField &g);

/// J* = dG J_nabla dG^{-1} at (q, p), with v = g^{-1} p and dG = [[I, 0], [d_k g_il v^l, g]].
Mat j_cotangent(const MetricField &g, const Point &q, const Vec &p);
MatrixField j_cotangent_field(const MetricField &g);

/// Canonical form sum dp ^ dq as a matrix in (q, p) ordering.
Mat omega_can(int n);

struct CompatibilityReport {
  double square = 0;       ///< |J*^2 + I|
  double asymmetry = 0;    ///< |m - m^T| for m = omega_can(., J* .)
  std::pair<int, int> signature{0, 0};
};
CompatibilityReport cotangent_compatibility(const MetricField &g, const Point &q, const Vec &p);

struct FlatnessSample {
  Point point;  ///< (q, p)
  double curvature = 0, nijenhuis = 0;
};
struct FlatnessReport {
  std::vector<FlatnessSample> samples;
  double max_curvature = 0, max_nijenhuis = 0;
};
/// Pairs (|R(q)|, |N_{J*}(q, p)|) over cotangent sample points.
FlatnessReport flatness_vs_integrability(const MetricField &g, const std::vector<Point> &grid);

/// Holomorphic metric h = sum h_ij(z) dz_i dz_j on C^n, real coordinates (x1..xn, y1..yn).
struct HoloMetric {
  int n = 0;
  std::vector<Expression> h;  ///< row-major n x n
  ComplexVariables vars;

  CMat at(const Point &p) const;
  /// h_R = Re(A^T h A), h_I = Im(A^T h A) with dz = A dX, A = [I, iI].
  MetricField real_part(const FdConfig &fd = {}) const;
  MetricField imag_part(const FdConfig &fd = {}) const;
};

/// Components in z1..zn; throws NotHolomorphic or InvalidModel on validation failure at `samples`.
HoloMetric parse_holo_metric(const std::vector<std::string> &components, int n, const std::vector<Point> &samples,
                             double tol = 1e-6);

struct HoloLcReport {
  double max_difference = 0;  ///< max |Gamma(h_R) - Gamma(h_I)|
  double max_christoffel = 0; ///< max |Gamma(h_R)|, for scale
  Point worst;
};
HoloLcReport holo_metric_lc_check(const HoloMetric &h, const std::vector<Point> &grid, double fd_step = 1e-4);

/// g = diag(1, 1 + x1^2) on R^2: genuinely curved test metric.
MetricField curved_test_metric();
/// g = diag(1, x1^2): flat metric in polar-like coordinates (x1 > 0).
MetricField polar_metric();
MetricField euclidean_metric(int n);

}  // namespace phhs
