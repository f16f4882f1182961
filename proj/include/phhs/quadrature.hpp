#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace phhs::quad {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendre {
  std::vector<double> x, w;
  explicit GaussLegendre(int n);
};

/// Integral of f over [a, b] with an n-point Gauss-Legendre rule.
template <class F>
auto gauss(const F &f, double a, double b, const GaussLegendre &rule) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  auto acc = f(c + h * rule.x[0]) * rule.w[0];
  for (size_t k = 1; k < rule.x.size(); ++k) acc = acc + f(c + h * rule.x[k]) * rule.w[k];
  return acc * h;
}

/// Adaptive Gauss-Kronrod (7/15) with absolute tolerance; T needs +, * double, and abs().
template <class T, class F, class Norm>
T adaptive_gk(const F &f, double a, double b, double tol, const Norm &norm, int depth = 30) {
  static const double xk[8] = {0.991455371120812639, 0.949107912342758525, 0.864864423359769073,
                               0.741531185599394440, 0.586087235467691130, 0.405845151377397167,
                               0.207784955007898468, 0.0};
  static const double wk[8] = {0.022935322010529225, 0.063092092629978553, 0.104790010322250184,
                               0.140653259715525919, 0.169004726639267903, 0.190350578064785410,
                               0.204432940075298892, 0.209482141084727828};
  static const double wg[4] = {0.129484966168869693, 0.279705391489276668, 0.381830050505118945,
                               0.417959183673469388};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  T center = f(c);
  T kron = center * wk[7];
  T gs = center * wg[3];
  for (int j = 0; j < 7; ++j) {
    T s = f(c - h * xk[j]) + f(c + h * xk[j]);
    kron = kron + s * wk[j];
    if (j % 2 == 1) gs = gs + s * wg[j / 2];
  }
  kron = kron * h;
  gs = gs * h;
  if (depth <= 0 || norm(kron - gs) <= tol) return kron;
  return adaptive_gk<T>(f, a, c, 0.5 * tol, norm, depth - 1) +
         adaptive_gk<T>(f, c, b, 0.5 * tol, norm, depth - 1);
}

/// Composite Simpson weights for n (even) intervals of width h.
std::vector<double> simpson_weights(int n, double h);

/// Composite trapezoid weights for n intervals of width h.
std::vector<double> trapezoid_weights(int n, double h);

}  // namespace phhs::quad
