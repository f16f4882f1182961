#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace phhs {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;

/// Coordinates (x_1..x_m, y_1..y_m), z_j = x_j + i y_j.
using Point = Vec;

// ---------------------------------------------------------------------------
// errors

/// Base of every library error; name() is the stable identifier reported by the CLI.
class Error : public std::runtime_error {
public:
  Error(std::string name, const std::string &what)
      : std::runtime_error(what), name_(std::move(name)) {}
  const std::string &name() const { return name_; }

private:
  std::string name_;
};

#define PHHS_ERROR(Type)                                                      \
  struct Type : Error {                                                       \
    explicit Type(const std::string &what) : Error(#Type, what) {}           \
  }

PHHS_ERROR(DegenerateForm);
PHHS_ERROR(DimensionError);
PHHS_ERROR(SingularForm);
PHHS_ERROR(NonClosedForm);
PHHS_ERROR(StepBudgetExceeded);
PHHS_ERROR(NonFiniteState);
PHHS_ERROR(MissingPrimitive);
PHHS_ERROR(NotHolomorphic);
PHHS_ERROR(QDependence);
PHHS_ERROR(ZeroDenominator);
PHHS_ERROR(InvalidModel);
PHHS_ERROR(NoReturn);
PHHS_ERROR(SingularMetric);
PHHS_ERROR(ConfigError);

#undef PHHS_ERROR

// ---------------------------------------------------------------------------
// finite differences

struct FdConfig {
  double step = 1e-5;  ///< base spacing
  int order = 4;       ///< 2 or 4
  bool scaled = true;  ///< spacing is step * max(1, |p|)

  double spacing(const Point &p) const {
    return scaled ? step * std::max(1.0, p.norm()) : step;
  }
};

/// Central-difference derivative of f along one coordinate axis.
template <class F>
auto partial_jet(const F &f, const Point &p, int axis, const FdConfig &fd = {}) {
  using R = std::decay_t<decltype(f(p))>;
  const double h = fd.spacing(p);
  Point q = p;
  auto at = [&](double off) -> R {
    q[axis] = p[axis] + off;
    return f(q);
  };
  if (fd.order == 2) {
    R fp = at(h), fm = at(-h);
    return R((fp - fm) / (2 * h));
  }
  R f1 = at(h), f2 = at(2 * h), m1 = at(-h), m2 = at(-2 * h);
  return R((8.0 * (f1 - m1) - (f2 - m2)) / (12 * h));
}

// ---------------------------------------------------------------------------
// fields

template <class T>
struct Field {
  std::function<T(const Point &)> eval;
  FdConfig fd{};

  T operator()(const Point &p) const { return eval(p); }
  explicit operator bool() const { return bool(eval); }
};

using ScalarField = Field<double>;
using VectorField = Field<Vec>;
using MatrixField = Field<Mat>;
/// Antisymmetric matrix w_ab = w(e_a, e_b).
using TwoFormField = Field<Mat>;
/// Covector components a_b = a(e_b).
using CovectorField = Field<Vec>;

inline Vec gradient(const ScalarField &f, const Point &p) {
  Vec g(p.size());
  for (int a = 0; a < p.size(); ++a) g[a] = partial_jet(f.eval, p, a, f.fd);
  return g;
}

/// J^a_b = dV^a / dx^b.
inline Mat jacobian(const VectorField &v, const Point &p) {
  const int n = int(p.size());
  Mat J(n, n);
  for (int b = 0; b < n; ++b) J.col(b) = partial_jet(v.eval, p, b, v.fd);
  return J;
}

/// Derivatives of a matrix field along every axis.
inline std::vector<Mat> matrix_jet(const MatrixField &M, const Point &p) {
  std::vector<Mat> d;
  d.reserve(p.size());
  for (int a = 0; a < p.size(); ++a) d.push_back(partial_jet(M.eval, p, a, M.fd));
  return d;
}

template <class T>
Field<T> constant_field(T value) {
  return {[value](const Point &) { return value; }};
}

// ---------------------------------------------------------------------------
// small helpers

inline double max_abs(const Mat &m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }
inline double max_abs(const Vec &v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

/// Standard complex structure on R^{2m}: J(dx_j) = dy_j, J(dy_j) = -dx_j.
inline Mat standard_J(int m) {
  Mat J = Mat::Zero(2 * m, 2 * m);
  for (int j = 0; j < m; ++j) {
    J(m + j, j) = 1;
    J(j, m + j) = -1;
  }
  return J;
}

/// Pack complex coordinates z_j into (x, y).
inline Point from_complex(const CVec &z) {
  const int m = int(z.size());
  Point p(2 * m);
  for (int j = 0; j < m; ++j) {
    p[j] = z[j].real();
    p[m + j] = z[j].imag();
  }
  return p;
}

inline CVec to_complex(const Point &p) {
  const int m = int(p.size() / 2);
  CVec z(m);
  for (int j = 0; j < m; ++j) z[j] = {p[j], p[m + j]};
  return z;
}

/// Worker count from PHHS_THREADS (default 1).
int thread_count();

/// Runs body(i) for i in [0, n); each index writes only its own slot.
void parallel_for(int n, const std::function<void(int)> &body);

}  // namespace phhs
