#pragma once

#include "phhs/flow.hpp"

#include <functional>
#include <numbers>

namespace phhs {

/// Complex: Lambda = Lambda_R - i Lambda_R(J .) (holomorphic models only).
/// Real: only Lambda_R; disk/star functionals return their real-valued variants.
enum class ActionMode { Complex, Real };

struct ActionContext {
  PhhsModel model;
  HamiltonianFields fields;
  ActionMode mode = ActionMode::Complex;

  cplx lambda(const Point &x, const Vec &v) const;
  /// Lambda_R extended complex-linearly: Lambda_R(a) + i Lambda_R(b).
  cplx lambda_R(const Point &x, const Vec &a, const Vec &b) const;
  cplx H(const Point &x) const { return {model.H_R(x), fields.H_I(x)}; }
};

/// Throws MissingPrimitive without lambda_R, or for Complex mode on a non-holomorphic model.
ActionContext make_action_context(const PhhsModel &model, const HamiltonianFields &fields,
                                  ActionMode mode = ActionMode::Complex);

/// Action written as a sum over local cells; each cell sees only its own corner nodes.
struct CellAction {
  std::vector<Point> nodes;
  std::vector<std::vector<int>> cells;
  std::function<cplx(int cell, const std::vector<Point> &corners)> eval;
  /// first-order size of the cell's floating-point terms, for rounding bounds (optional)
  std::function<double(int cell, const std::vector<Point> &corners)> magnitude;
  std::vector<bool> fixed;  ///< nodes held fixed under variations

  cplx value() const;
  /// value plus the summed per-cell magnitude (|value| when no magnitude is given)
  std::pair<cplx, double> value_and_magnitude() const;
};

/// Segment [r0, r1] sampled at n+1 uniform nodes; integrand Lambda(gamma') - e^{i alpha} H.
CellAction segment_cells(const ActionContext &ctx, const std::vector<Point> &nodes, double r0, double r1, double alpha);
cplx segment_action(const ActionContext &ctx, const std::vector<Point> &nodes, double r0, double r1, double alpha);

/// Parallelogram [t0,t1] + e^{i alpha}[r0,r1]; nodes index i*nr + j at z = t_i + r_j e^{i alpha}.
struct ParallelogramGrid {
  double t0 = 0, t1 = 1, r0 = 0, r1 = 1, alpha = std::numbers::pi / 2;
  int nt = 33, nr = 33;
  cplx z(int i, int j) const;
};

CellAction parallelogram_cells(const ActionContext &ctx, const ParallelogramGrid &grid, const std::vector<Point> &nodes);
cplx parallelogram_action(const ActionContext &ctx, const ParallelogramGrid &grid, const std::vector<Point> &nodes);
/// GridCurve from trajectory_grid as a parallelogram with alpha = pi/2.
ParallelogramGrid parallelogram_of(const GridSpec &spec);

/// Star-shaped polar grid around z0: node 0 is the center, then ray-major
/// node 1 + l*nr + (k-1) at z0 + (k/nr) R(alpha_l) e^{i alpha_l}, alpha_l = 2 pi l / na.
struct PolarGrid {
  cplx z0 = 0;
  std::function<double(double)> R = [](double) { return 1.0; };
  int nr = 64, na = 256;  ///< na must be a multiple of 4 for variant 2

  double alpha(int l) const;
  double radius(int l) const { return R(alpha(l)); }
  int node(int k, int l) const;  ///< k in [0, nr]; ray index taken mod na
  int size() const { return 1 + nr * na; }
  cplx z(int k, int l) const;
};

PolarGrid disk_grid(cplx z0, double R, int nr, int na);

using CurveFn = std::function<Point(cplx)>;
std::vector<Point> sample_polar(const CurveFn &gamma, const PolarGrid &grid);
std::vector<Point> sample_parallelogram(const CurveFn &gamma, const ParallelogramGrid &grid);

/// gamma(z0 + r e^{i alpha}) = flow of cos(alpha) X + sin(alpha) JX from x0, per ray.
std::vector<Point> polar_trajectory(const HamiltonianFields &fields, const Point &x0, const PolarGrid &grid,
                                    const FlowConfig &cfg = {});

/// Variant 1: (1/2pi) int int [Lambda(d gamma/dr) - e^{i alpha} H] dr d alpha, center and boundary fixed.
/// Variant 2: (i/4 R^) int_0^pi int_{-R(alpha-pi)}^{R(alpha)} [...] dr d alpha, boundary fixed.
/// Real mode returns Re(A1) and Re(-4 i R^ A2) respectively.
CellAction star_cells(const ActionContext &ctx, const PolarGrid &grid, const std::vector<Point> &nodes, int variant);
cplx star_action(const ActionContext &ctx, const PolarGrid &grid, const std::vector<Point> &nodes, int variant);
cplx disk_action_1(const ActionContext &ctx, const PolarGrid &grid, const std::vector<Point> &nodes);
cplx disk_action_2(const ActionContext &ctx, const PolarGrid &grid, const std::vector<Point> &nodes);

/// R^ = (i/4)[int_pi^2pi R e^{i a} - int_0^pi R e^{i a}] with the angular rule used by variant 2.
cplx normalization_hat_R(const PolarGrid &grid);

struct QuadratureEstimate {
  cplx value;
  double error = 0;     ///< truncation (refinement) plus rounding bound
  double truncation = 0;
  double rounding = 0;
};

/// Evaluates on (nr, na) and (nr/2, na/2) grids sampled from the same curve.
QuadratureEstimate star_action_estimate(const ActionContext &ctx, const CurveFn &gamma, const PolarGrid &grid,
                                        int variant);

/// Cartesian form with f = Lambda(d_z gamma) - H, g = Lambda(d_zbar gamma); midpoint cells on an n x n
/// box around the disk, cells whose centre lies outside are dropped. Cross-check only.
cplx cartesian_disk_action(const ActionContext &ctx, const CurveFn &gamma, cplx z0, double R, int variant, int n);

struct VariationalGradient {
  std::vector<Vec> re, im;  ///< per node, zero at fixed nodes
  double max_re = 0, max_im = 0;
  double max_norm() const { return std::max(max_re, max_im); }
};

/// Central differences of each free node coordinate (step `h`), recomputing only the touched cells.
VariationalGradient variational_gradient(const CellAction &action, double h = 1e-5);

}  // namespace phhs
