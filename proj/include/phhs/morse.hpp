#pragma once

#include "phhs/flow.hpp"

namespace phhs {

/// Planar RHS after Morse normalization: omega = v dx^dy, H = x^2 + y^2 unless given.
struct PlanarSystem {
  ScalarField v;
  ScalarField H = {[](const Point &p) { return p.squaredNorm(); }};
  double T = 0;  ///< target period
  int angular_nodes = 256;
};

/// Morse index of H at p (negative Hessian eigenvalues, folded to min(k, 2-k)).
int morse_index(const ScalarField &H, const Point &p);

/// That(r) = 1/2 int_0^{2pi} v(r cos phi, r sin phi) dphi, periodic trapezoid.
double period_function(const PlanarSystem &sys, double r);

/// psi_L(s) = (1/T) int_0^s That(sqrt|s'|) ds', integrated in u = sqrt|s'|.
double rescaling_chart(const PlanarSystem &sys, double s);
/// psi_L'(s) = That(sqrt|s|) / T.
double rescaling_derivative(const PlanarSystem &sys, double s);

/// Hamiltonian field of psi_L o H (or H itself) for omega = v dx^dy, i_X omega = -dH.
VectorField planar_field(const PlanarSystem &sys, bool rescaled);

struct PeriodMeasurement {
  double period = 0;
  long steps = 0;
  double radius_drift = 0;  ///< max |r - r0| along the orbit
};

/// Integrates from (r0, 0) and returns the time at which the unwrapped angle first reaches 2 pi.
PeriodMeasurement verify_T_periodic(const PlanarSystem &sys, double r0, const FlowConfig &cfg = {},
                                    bool rescaled = true);

struct AreaLaw {
  double area = 0, TE = 0, residual = 0;
};

/// Area of {psi_L o H <= E} under omega against T_compare * E (T_compare defaults to sys.T).
AreaLaw area_law_check(const PlanarSystem &sys, double E, double T_compare = 0, bool rescaled = true);

}  // namespace phhs
