#include "phhs/quadrature.hpp"

#include <numbers>
#include <stdexcept>

namespace phhs::quad {

GaussLegendre::GaussLegendre(int n) : x(n), w(n) {
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (z * p1 - p0) / (z * z - 1);
      double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = z;
    w[i] = 2 / ((1 - z * z) * dp * dp);
  }
}

std::vector<double> simpson_weights(int n, double h) {
  if (n < 2 || n % 2) throw std::invalid_argument("simpson needs an even interval count");
  std::vector<double> w(n + 1);
  for (int k = 0; k <= n; ++k) w[k] = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
  for (auto &v : w) v *= h / 3;
  return w;
}

std::vector<double> trapezoid_weights(int n, double h) {
  std::vector<double> w(n + 1, h);
  w.front() = w.back() = 0.5 * h;
  return w;
}

}  // namespace phhs::quad
