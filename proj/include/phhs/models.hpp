#pragma once

#include "phhs/expr.hpp"
#include "phhs/structures.hpp"

namespace phhs {

/// Re(sum_j dP_j ^ dQ_j) on C^{2n}, coordinates z = (Q_1..Q_n, P_1..P_n).
Mat standard_omega_R(int n);
/// Re(sum_j P_j dQ_j).
Vec standard_lambda_R(int n, const Point &p);

/// Max |dH o J - i dH| over the samples.
double holomorphy_residual(const Expression &H, const ComplexVariables &vars, int m, const std::vector<Point> &samples);

/// Standard HHS on C^{2n} with a holomorphic H in z1..z2n / Q1..Qn, P1..Pn.
PhhsModel build_standard_hhs(int n, const std::string &H, double holo_tol = 1e-6);

/// H(Q,P) = P^2/2 - 1/(8Q^2) on C^x x C, real coordinates (Qx, Px, Qy, Py).
PhhsModel build_central_problem();

namespace central {
/// Energy at (Q0, P0).
cplx energy(cplx Q0, cplx P0);
/// Q(z) = sqrt(Q0^2 + 2 Q0 P0 z + 2 E0 z^2) and P = Q'; the branch follows `path`
/// (polyline starting at 0, refined to steps <= max_step) from sqrt(Q0^2) = Q0.
std::pair<cplx, cplx> closed_form(cplx Q0, cplx P0, const std::vector<cplx> &path, double max_step = 0.05);
/// Straight path 0 -> z.
std::pair<cplx, cplx> closed_form(cplx Q0, cplx P0, cplx z, double max_step = 0.05);
Point to_point(cplx Q, cplx P);
std::pair<cplx, cplx> from_point(const Point &p);
}  // namespace central

/// Generators of a lattice in C^n = R^{2n}: columns in (x, y) ordering.
struct Lattice {
  Mat generators;
  int n() const { return int(generators.rows() / 2); }
};

Lattice gaussian_lattice(int n);

/// Distance between Q-parts modulo the lattice (nearest image among small shifts).
double torus_distance(const Lattice &L, const CVec &a, const CVec &b, int reach = 2);

/// Natural Hamiltonian on the torus C^n / L, depends on P only.
PhhsModel build_torus_model(const Lattice &L, const std::string &H = "");

struct OrbitClass {
  enum Kind { Constant, Aperiodic, Cylinder, Torus } kind = Aperiodic;
  std::vector<cplx> generators_found;
  bool caveat = false;
  int rank = 0;
  static std::string name(Kind k);
};

/// Periods z with z * w in L, |k_j| <= search_radius, w the velocity at P0 (defaults to P0).
OrbitClass classify_torus_orbit(const CVec &P0, const Lattice &L, int search_radius,
                                const std::optional<CVec> &velocity = std::nullopt);

/// J_g = I_g o J o I_g with I_g(dx1) = f dx2, I_g(dx2) = -dx1/f, I_g(dy1) = -h dy2, I_g(dy2) = dy1/h.
struct ProperPhhs {
  PhhsModel model;
  MatrixField I_g;
};
ProperPhhs build_proper_phhs(const std::string &f, const std::string &h, const std::string &H_R);

MatrixField rotation_J(const Expression &phi);
/// PHSM (J_phi, Re(dz2 ^ dz1)) carried by a model with H_R = 0.
PhhsModel build_rotation_family(const std::string &phi);

/// Smooth bump exp(1 - 1/(1 - |x-c|^2/rho^2)) inside the ball, 0 outside; peak value 1.
ScalarField bump(const Point &center, double radius);

/// J^eps on C^{2n} with r = 1 + eps^2 f; H = Re z_{2n} (n > 1) or constant.
struct Deformation {
  PhhsModel model;
  ScalarField f;
  double eps = 0;
  int n = 0;
  /// eps^2 df ^ (dy_{n+1} ^ dx_1 - r^{-2} dx_{n+1} ^ dy_1)
  double expected_d_omega_I(const Point &p, int a, int b, int c) const;
};
Deformation build_deformation(double eps, const ScalarField &f, int n, bool constant_H);

struct HyperkahlerReport {
  double anticommutator = 0;  ///< |I J + J I|
  double J_delta_minus_J = 0; ///< |I J I - J|
  double I_square = 0;        ///< |I^2 + 1|
};
HyperkahlerReport hyperkahler_check(double f = 1, double h = 1);

/// Samples around the origin used by builders.
std::vector<Point> default_samples(int dim, double radius = 0.6);

}  // namespace phhs
