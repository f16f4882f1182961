#pragma once

#include "phhs/core.hpp"

#include <array>

namespace phhs {

/// Independent components (a<b<c) of a 3-form.
struct ThreeForm {
  int dim = 0;
  std::vector<std::array<int, 3>> index;
  std::vector<double> value;

  double max_abs() const;
  /// Component for any (a, b, c) with the antisymmetric sign applied.
  double at(int a, int b, int c) const;
  /// (i_V w)_{bc} = V^a w_{abc}.
  Mat contract(const Vec &V) const;
};

/// (dw)_abc = d_a w_bc - d_b w_ac + d_c w_ab.
ThreeForm exterior_derivative_2form(const TwoFormField &omega, const Point &p);

/// (d a)_bc = d_b a_c - d_c a_b.
Mat exterior_derivative_1form(const CovectorField &alpha, const Point &p);

/// [V,W]^a = V^b d_b W^a - W^b d_b V^a.
Vec lie_bracket(const VectorField &V, const VectorField &W, const Point &p);

/// (L_V J)^a_b = V^c d_c J^a_b - J^c_b d_c V^a + J^a_c d_b V^c.
Mat lie_derivative_J(const VectorField &V, const MatrixField &J, const Point &p);

/// N(e_a, e_b) for a < b, stored as N[a][b] (and N[b][a] = -N[a][b]).
struct Nijenhuis {
  int dim = 0;
  std::vector<Vec> N;  // dim*dim entries, row-major over (a, b)

  const Vec &at(int a, int b) const { return N[a * dim + b]; }
  double max_abs() const;
  /// N(u, w) by bilinearity.
  Vec apply(const Vec &u, const Vec &w) const;
};

Nijenhuis nijenhuis(const MatrixField &J, const Point &p);

struct RankOptions {
  double relative = 1e-7;  ///< singular values below relative * largest are dropped
  double absolute = 1e-6;  ///< largest singular value below this means rank 0
};

/// Rank of span{N(e_a, e_b)}.
int nijenhuis_rank(const MatrixField &J, const Point &p, const RankOptions &opt = {});

/// max |J^2 + I|.
double check_acs(const Mat &J);
/// max |J^T W J + W|.
double check_anticompat(const Mat &omega_R, const Mat &J);

inline double check_acs(const MatrixField &J, const Point &p) { return check_acs(J(p)); }
inline double check_anticompat(const TwoFormField &W, const MatrixField &J, const Point &p) {
  return check_anticompat(W(p), J(p));
}

/// (v - iJv)/2; satisfies J out = i out.
CVec project_10(const Mat &J, const Vec &v);
inline CVec project_10(const MatrixField &J, const Vec &v, const Point &p) {
  return project_10(J(p), v);
}

/// Frame e^Q_1..e^Q_n, e^P_1..e^P_n as columns (coefficients in the input basis).
template <class Scalar>
struct SymplecticFrame {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  M vectors;    ///< columns ordered (Q_1..Q_n, P_1..P_n)
  M covectors;  ///< rows dual to the columns of vectors
  int pairs() const { return int(vectors.cols() / 2); }
};

/// Target pairing in (Q, P) ordering: W(e^P_i, e^Q_j) = delta_ij, others zero.
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> standard_pairing(int n) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> S =
      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    S(n + j, j) = Scalar(1);
    S(j, n + j) = Scalar(-1);
  }
  return S;
}

/// Inductive symplectic Gram-Schmidt: v_1 becomes e^Q and its partner w of largest |W(w, v_1)|
/// (at least threshold) becomes e^P; the rest is orthogonalized and the step repeats.
template <class Scalar>
SymplecticFrame<Scalar> symplectic_gram_schmidt(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &W,
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> &seed, double threshold = 1e-8) {
  using M = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using V = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const int m = int(W.rows());
  if (m % 2) throw DimensionError("symplectic frame needs an even dimension, got " + std::to_string(m));
  auto form = [&](const V &a, const V &b) -> Scalar { return a.transpose() * W * b; };

  std::vector<V> pool;
  for (int k = 0; k < seed.cols(); ++k) pool.push_back(seed.col(k));
  const int n = m / 2;
  M out(m, m);
  for (int j = 0; j < n; ++j) {
    if (pool.empty()) throw DegenerateForm("seed frame exhausted");
    V eQ = pool.front();
    pool.erase(pool.begin());
    // largest pairing as pivot
    int partner = -1;
    double best = threshold;
    for (size_t k = 0; k < pool.size(); ++k) {
      const double a = std::abs(form(pool[k], eQ));
      if (a >= best) best = a, partner = int(k);
    }
    if (partner < 0) throw DegenerateForm("no partner for pair " + std::to_string(j + 1));
    V eP = pool[partner];
    pool.erase(pool.begin() + partner);
    eP /= form(eP, eQ);
    // two sweeps keep the pairing at round-off level
    for (int sweep = 0; sweep < 2; ++sweep) {
      for (auto &v : pool) {
        const Scalar cq = form(v, eQ), cp = form(v, eP);
        v = v - cq * eP + cp * eQ;
      }
    }
    out.col(j) = eQ;
    out.col(n + j) = eP;
  }
  SymplecticFrame<Scalar> frame;
  frame.vectors = out;
  frame.covectors = out.inverse();
  return frame;
}

}  // namespace phhs
