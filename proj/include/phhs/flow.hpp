#pragma once

#include "phhs/structures.hpp"

namespace phhs {

struct FlowConfig {
  double dt = 1e-3;
  long max_step_count = 10'000'000;
  bool richardson = false;
  double blowup = 1e8;  ///< coordinate magnitude treated as a singularity
};

struct FlowResult {
  Point x;
  double error_estimate = 0;  ///< Richardson estimate when requested
  long steps = 0;
};

/// Fixed-step RK4 for time t (sign allowed).
FlowResult flow_ex(const VectorField &V, const Point &x0, double t, const FlowConfig &cfg = {});

inline Point flow(const VectorField &V, const Point &x0, double t, const FlowConfig &cfg = {}) {
  return flow_ex(V, x0, t, cfg).x;
}

struct GridSpec {
  double t0 = 0, t1 = 1, s0 = 0, s1 = 1;
  int nt = 33, ns = 33;

  double t(int i) const { return nt > 1 ? t0 + (t1 - t0) * i / (nt - 1) : t0; }
  double s(int j) const { return ns > 1 ? s0 + (s1 - s0) * j / (ns - 1) : s0; }
  cplx z(int i, int j) const { return {t(i), s(j)}; }
};

struct GridCurve {
  GridSpec spec;
  std::vector<Point> values;  ///< nt*ns, index i*ns + j
  int i0 = 0, j0 = 0;         ///< anchor node
  cplx z0;
  Point x0;

  const Point &at(int i, int j) const { return values[size_t(i) * spec.ns + j]; }
  Point &at(int i, int j) { return values[size_t(i) * spec.ns + j]; }

  double swap_defect = 0;   ///< far corner: t-then-s versus s-then-t
  double drift_R = 0;       ///< max |H_R - H_R(x0)|
  double drift_I = 0;       ///< max |H_I - H_I(x0)|
  double cr_residual = 0;   ///< max |d_s g - J d_t g|
  std::vector<double> node_cr;  ///< per-node Cauchy-Riemann residual
};

/// gamma(t + is) = phi^{JX}_{s - s0} o phi^X_{t - t0}(x0), z0 must be a grid node.
GridCurve trajectory_grid(const PhhsModel &model, const HamiltonianFields &fields, const Point &x0, cplx z0,
                          const GridSpec &spec, const FlowConfig &cfg = {});

/// Flow of cos(a) X + sin(a) JX for parameter r.
Point tilted_flow(const HamiltonianFields &fields, const Point &x0, double alpha, double r, const FlowConfig &cfg = {});

/// phi^X_{t1} o phi^{JX}_{s1} o ... o phi^X_{tn} o phi^{JX}_{sn}(x0); the last factor acts first.
Point flow_word(const HamiltonianFields &fields, const Point &x0, const std::vector<std::pair<double, double>> &word,
                const FlowConfig &cfg = {});

/// Integrates d gamma/du = Re(zdot) X + Im(zdot) JX along a polyline in the time plane.
Point continue_along_path(const HamiltonianFields &fields, const Point &x0, const std::vector<cplx> &path,
                          const FlowConfig &cfg = {});

/// |phi^X_t o phi^{JX}_s(x0) - phi^{JX}_s o phi^X_t(x0)|.
double commutation_defect(const HamiltonianFields &fields, const Point &x0, double t, double s,
                          const FlowConfig &cfg = {});

/// Closed polygon around center with radius r, starting at center + r e^{i phase}, `turns` times.
std::vector<cplx> circle_path(cplx center, double r, int turns, int segments_per_turn, double phase = 0);

}  // namespace phhs
