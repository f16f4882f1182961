#include "phhs/morse.hpp"

#include "phhs/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace phhs {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

void require_positive_T(const PlanarSystem &sys) {
  if (!(sys.T > 0)) throw ConfigError("target period T must be positive");
}

Point polar_point(double r, double phi) {
  Point p(2);
  p << r * std::cos(phi), r * std::sin(phi);
  return p;
}

// Smallest rho in (0, rho_max] with F(rho) = E, F increasing from F(0) < E.
double radial_root(const std::function<double(double)> &F, double E, double rho_max) {
  double lo = 0, hi = rho_max / 16;
  while (F(hi) < E) {
    lo = hi;
    hi *= 2;
    if (hi > rho_max) throw NoReturn("sublevel set leaves the working disk");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (F(mid) < E ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

int morse_index(const ScalarField &H, const Point &p) {
  const Mat hess = jacobian(VectorField{[H](const Point &q) -> Vec { return gradient(H, q); }, H.fd}, p);
  const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (hess + hess.transpose()));
  int k = 0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) k += es.eigenvalues()[i] < 0;
  return std::min(k, int(p.size()) - k);
}

double period_function(const PlanarSystem &sys, double r) {
  const int n = sys.angular_nodes;
  double s = 0;
  for (int k = 0; k < n; ++k) s += sys.v(polar_point(r, kTwoPi * k / n));
  return 0.5 * s * kTwoPi / n;
}

double rescaling_derivative(const PlanarSystem &sys, double s) {
  require_positive_T(sys);
  return period_function(sys, std::sqrt(std::abs(s))) / sys.T;
}

double rescaling_chart(const PlanarSystem &sys, double s) {
  require_positive_T(sys);
  if (s == 0) return 0;
  // s' = +-u^2 removes the square-root kink at 0
  const double u1 = std::sqrt(std::abs(s));
  auto integrand = [&](double u) { return period_function(sys, u) * 2 * u; };
  const double I = quad::adaptive_gk<double>(integrand, 0.0, u1, 1e-13 * std::max(1.0, u1),
                                             [](double v) { return std::abs(v); });
  return (s > 0 ? I : -I) / sys.T;
}

VectorField planar_field(const PlanarSystem &sys, bool rescaled) {
  if (rescaled) require_positive_T(sys);
  return {[sys, rescaled](const Point &p) -> Vec {
    const double v = sys.v(p);
    if (!(v > 0)) throw InvalidModel("conformal factor v must be positive");
    const Vec g = gradient(sys.H, p);
    const double scale = rescaled ? rescaling_derivative(sys, sys.H(p)) : 1.0;
    Vec X(2);
    X << -g[1] / v, g[0] / v;
    return scale * X;
  }};
}

PeriodMeasurement verify_T_periodic(const PlanarSystem &sys, double r0, const FlowConfig &cfg, bool rescaled) {
  if (!(r0 > 0)) throw ConfigError("r0 must be positive");
  const VectorField X = planar_field(sys, rescaled);
  Point x(2);
  x << r0, 0;
  double theta = 0, t = 0;
  const double h = cfg.dt;
  PeriodMeasurement out;
  for (long k = 0; k < cfg.max_step_count; ++k) {
    const Vec k1 = X(x);
    const Vec k2 = X(Point(x + 0.5 * h * k1));
    const Vec k3 = X(Point(x + 0.5 * h * k2));
    const Vec k4 = X(Point(x + h * k3));
    const Point next = x + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
    if (!next.allFinite()) throw NonFiniteState("planar flow left the finite region");
    double dtheta = std::atan2(next[1], next[0]) - std::atan2(x[1], x[0]);
    if (dtheta < -std::numbers::pi) dtheta += kTwoPi;
    if (dtheta > std::numbers::pi) dtheta -= kTwoPi;
    const double next_theta = theta + dtheta;
    out.radius_drift = std::max(out.radius_drift, std::abs(next.norm() - r0));
    out.steps = k + 1;
    if (next_theta >= kTwoPi) {
      out.period = t + h * (kTwoPi - theta) / dtheta;
      return out;
    }
    theta = next_theta;
    t += h;
    x = next;
  }
  throw NoReturn("angle did not advance 2 pi within the step budget");
}

AreaLaw area_law_check(const PlanarSystem &sys, double E, double T_compare, bool rescaled) {
  if (!(E > 0)) throw ConfigError("energy must be positive");
  if (rescaled) require_positive_T(sys);
  // psi_L is increasing, so {psi_L o H <= E} = {H <= psi_L^{-1}(E)}
  double level = E;
  if (rescaled) {
    double lo = 0, hi = E;
    while (rescaling_chart(sys, hi) < E) {
      lo = hi;
      hi *= 2;
      if (hi > 1e6) throw NoReturn("rescaled energy level is out of range");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (rescaling_chart(sys, mid) < E ? lo : hi) = mid;
    }
    level = 0.5 * (lo + hi);
  }
  const int n = sys.angular_nodes;
  static const quad::GaussLegendre rule(24);
  double area = 0;
  for (int k = 0; k < n; ++k) {
    const double phi = kTwoPi * k / n;
    const double rho = radial_root([&](double r) { return sys.H(polar_point(r, phi)); }, level, 1e3);
    area += quad::gauss([&](double r) { return sys.v(polar_point(r, phi)) * r; }, 0.0, rho, rule);
  }
  AreaLaw out;
  out.area = area * kTwoPi / n;
  out.TE = (T_compare > 0 ? T_compare : sys.T) * E;
  out.residual = std::abs(out.area - out.TE);
  return out;
}

}  // namespace phhs
