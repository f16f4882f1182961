#include "phhs/tensor.hpp"

namespace phhs {

double ThreeForm::max_abs() const {
  double m = 0;
  for (double v : value) m = std::max(m, std::abs(v));
  return m;
}

double ThreeForm::at(int a, int b, int c) const {
  if (a == b || b == c || a == c) return 0;
  int idx[3] = {a, b, c};
  int sign = 1;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 2 - i; ++j)
      if (idx[j] > idx[j + 1]) {
        std::swap(idx[j], idx[j + 1]);
        sign = -sign;
      }
  for (size_t k = 0; k < index.size(); ++k)
    if (index[k][0] == idx[0] && index[k][1] == idx[1] && index[k][2] == idx[2]) return sign * value[k];
  return 0;
}

Mat ThreeForm::contract(const Vec &V) const {
  Mat out = Mat::Zero(dim, dim);
  for (int b = 0; b < dim; ++b)
    for (int c = 0; c < dim; ++c)
      for (int a = 0; a < dim; ++a) out(b, c) += V[a] * at(a, b, c);
  return out;
}

ThreeForm exterior_derivative_2form(const TwoFormField &omega, const Point &p) {
  const int n = int(p.size());
  auto d = matrix_jet(omega, p);
  ThreeForm out;
  out.dim = n;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c) {
        out.index.push_back({a, b, c});
        out.value.push_back(d[a](b, c) - d[b](a, c) + d[c](a, b));
      }
  return out;
}

Mat exterior_derivative_1form(const CovectorField &alpha, const Point &p) {
  Mat D = jacobian(alpha, p);  // D(c, b) = d_b a_c
  return D.transpose() - D;
}

Vec lie_bracket(const VectorField &V, const VectorField &W, const Point &p) {
  return jacobian(W, p) * V(p) - jacobian(V, p) * W(p);
}

Mat lie_derivative_J(const VectorField &V, const MatrixField &J, const Point &p) {
  const int n = int(p.size());
  const Vec v = V(p);
  const Mat Jp = J(p);
  const Mat DV = jacobian(V, p);  // DV(a, c) = d_c V^a
  auto dJ = matrix_jet(J, p);
  Mat out = Mat::Zero(n, n);
  for (int c = 0; c < n; ++c) out += v[c] * dJ[c];
  out += -DV * Jp + Jp * DV;
  return out;
}

double Nijenhuis::max_abs() const {
  double m = 0;
  for (const auto &v : N) m = std::max(m, phhs::max_abs(v));
  return m;
}

Vec Nijenhuis::apply(const Vec &u, const Vec &w) const {
  Vec out = Vec::Zero(dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b)
      if (a != b) out += u[a] * w[b] * at(a, b);
  return out;
}

Nijenhuis nijenhuis(const MatrixField &J, const Point &p) {
  const int n = int(p.size());
  const Mat Jp = J(p);
  auto dJ = matrix_jet(J, p);
  Nijenhuis out;
  out.dim = n;
  out.N.assign(n * n, Vec::Zero(n));
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Vec v = Vec::Zero(n);
      for (int d = 0; d < n; ++d) v += Jp(d, a) * dJ[d].col(b) - Jp(d, b) * dJ[d].col(a);
      v -= Jp * (dJ[a].col(b) - dJ[b].col(a));
      out.N[a * n + b] = v;
      out.N[b * n + a] = -v;
    }
  return out;
}

int nijenhuis_rank(const MatrixField &J, const Point &p, const RankOptions &opt) {
  const Nijenhuis N = nijenhuis(J, p);
  const int n = N.dim;
  Mat span(n, n * (n - 1) / 2);
  int k = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) span.col(k++) = N.at(a, b);
  Eigen::JacobiSVD<Mat> svd(span);
  const Vec s = svd.singularValues();
  if (s.size() == 0 || s[0] <= opt.absolute) return 0;
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > opt.relative * s[0]) ++rank;
  return rank;
}

double check_acs(const Mat &J) {
  return max_abs(Mat(J * J + Mat::Identity(J.rows(), J.cols())));
}

double check_anticompat(const Mat &omega_R, const Mat &J) {
  return max_abs(Mat(J.transpose() * omega_R * J + omega_R));
}

CVec project_10(const Mat &J, const Vec &v) {
  const cplx I(0, 1);
  return 0.5 * (v.cast<cplx>() - I * (J * v).cast<cplx>());
}

}  // namespace phhs
