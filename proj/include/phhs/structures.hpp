#pragma once

#include "phhs/tensor.hpp"

#include <optional>

namespace phhs {

/// Exact holomorphic trajectory through x0 at z = 0, continued along a polyline that starts at 0.
using ClosedForm = std::function<Point(const Point &x0, const std::vector<cplx> &path)>;

struct PhhsModel {
  std::string name;
  int m = 0;  ///< complex dimension; points live in R^{2m}
  MatrixField J;
  TwoFormField omega_R;
  ScalarField H_R;
  CovectorField lambda_R;  ///< optional primitive of omega_R
  ScalarField H_I;         ///< optional, supplied by holomorphic models
  bool holomorphic = false;
  Point base_point;
  ClosedForm closed_form;
  std::vector<Point> samples;  ///< validation points
};

struct Tolerances {
  double exact = 1e-6;    ///< analytic fields
  double derived = 1e-3;  ///< doubly differentiated quantities
};

/// (W_I)_ab = -(W_R)_cb J^c_a.
TwoFormField omega_I_from(const TwoFormField &omega_R, const MatrixField &J);

/// Solves i_X w = -dH, i.e. w X = grad H.
VectorField hamiltonian_vector_field(const TwoFormField &omega, const ScalarField &H);

/// Covector W(V, .).
CovectorField contract_form(const TwoFormField &omega, const VectorField &V);

struct PrimitiveOptions {
  double tol = 1e-11;          ///< quadrature tolerance
  double loop_tol = 1e-4;      ///< closedness residual per unit area
  double triangle_size = 0.2;  ///< diameter of test triangles
  int triangles = 8;
  unsigned seed = 12345;
};

/// Line integral of alpha along the segment base -> p.
double line_integral(const CovectorField &alpha, const Point &base, const Point &p, double tol = 1e-11);

/// Largest loop residual / area over random small triangles through p.
double closedness_residual(const CovectorField &alpha, const Point &p, const PrimitiveOptions &opt = {});

/// Primitive with value 0 at base; NonClosedForm if the loop test fails at p.
double primitive_scalar(const CovectorField &alpha, const Point &base, const Point &p,
                        const PrimitiveOptions &opt = {});

/// W(X_F, X_G).
double poisson_bracket(const ScalarField &F, const ScalarField &G, const TwoFormField &omega, const Point &p);

struct Diagnostics {
  double acs = 0;              ///< |J^2 + I|
  double anticompat = 0;       ///< |J^T W_R J + W_R|
  double omega_R_closed = 0;   ///< |d W_R|
  double lambda_primitive = 0; ///< |d Lambda_R - W_R|
  double defining = 0;         ///< |W_R X - grad H_R|
  double hi_primitive = 0;     ///< |W_R(JX, .) - dH_I|
  double bracket_XJX = 0;      ///< |[X, JX]|
  double pseudo_holo = 0;      ///< |dH o J - i dH|
  double cr_HI = 0;            ///< |X^{W_I}_{H_I} - X|
  double cr_HR = 0;            ///< |X^{W_I}_{H_R} - JX|
  double poisson = 0;          ///< |{H_R, H_I}|
  double energy_X = 0;         ///< |dH_R(X)| + |dH_I(X)|

  double worst() const;
};

struct HamiltonianFields {
  int m = 0;
  VectorField X;
  VectorField JX;
  ScalarField H_I;
  TwoFormField omega_I;
  Diagnostics diagnostics;
  bool passed = false;
};

struct AssembleOptions {
  Tolerances tol;
  PrimitiveOptions primitive;
  bool run_diagnostics = true;
};

/// Builds X, JX, W_I, H_I and records the diagnostic suite over model.samples.
/// InvalidModel if J fails the structural checks; NonClosedForm if H_I has no primitive.
HamiltonianFields assemble_phhs(const PhhsModel &model, const AssembleOptions &opt = {});

/// Diagnostics at one point.
Diagnostics diagnose(const PhhsModel &model, const HamiltonianFields &fields, const Point &p);

struct IntegrabilitySample {
  Point p;
  double nijenhuis = 0;
  double d_omega_I = 0;
};

struct IntegrabilityReport {
  std::vector<IntegrabilitySample> samples;
  double max_nijenhuis = 0;
  double max_d_omega_I = 0;
  double threshold = 0;
  bool integrable = false;
  /// true when both maxima sit on the same side of the threshold
  bool consistent() const { return (max_nijenhuis <= threshold) == (max_d_omega_I <= threshold); }
};

IntegrabilityReport integrability_report(const PhhsModel &model, const std::vector<Point> &grid,
                                         double threshold = 1e-3);

struct JPreservingSample {
  Point p;
  double lie = 0;       ///< |L_V J|
  double contract = 0;  ///< |i_V dW_I|
};

struct JPreservingReport {
  std::vector<JPreservingSample> samples;
  double max_lie = 0;
  double max_contract = 0;
};

JPreservingReport j_preserving_check(const VectorField &V, const PhhsModel &model, const std::vector<Point> &grid);

/// Tensor grid with `per_axis` nodes on [lo, hi] in every coordinate.
std::vector<Point> cube_grid(int dim, double lo, double hi, int per_axis);

}  // namespace phhs
