#ifndef DPP_NNP_HPP
#define DPP_NNP_HPP

#include "dpp/linalg.hpp"

namespace dpp {

// Nonnegative pair (L, V): L conditionally PSD with respect to V. Caches the
// orthonormal basis Q of span V, Ltilde = (I - QQ^T) L (I - QQ^T), and the
// truncated spectrum (Utilde, Lambdatilde) of Ltilde.
struct NNP {
  SymMatrix L;
  Matrix V;             // n x p, full column rank
  Matrix Q;             // n x p orthonormal
  SymMatrix Ltilde;
  Matrix Utilde;        // n x q
  Vector Lambdatilde;   // q positive eigenvalues, descending
  int n = 0;
  int p = 0;
  int q = 0;
  double tol = 0.0;     // CPD tolerance used at construction
};

inline NNP make_nnp(const SymMatrix& l, const Matrix& v, double tol = -1.0) {
  NNP out;
  out.n = static_cast<int>(l.n());
  out.p = static_cast<int>(v.cols());
  if (v.rows() != l.n()) throw ValidationError("make_nnp: V row count mismatch");
  out.L = l;
  out.V = v;
  out.Q = orthonormal_basis(v);
  if (out.p > 0) {
    Matrix proj = Matrix::Identity(out.n, out.n) - out.Q * out.Q.transpose();
    out.Ltilde = SymMatrix(proj * l.mat() * proj);
  } else {
    out.Ltilde = l;
  }
  out.tol = tol >= 0.0 ? tol : 1e-8 * l.mat().norm();
  Spectrum sp = sym_eig(out.Ltilde);
  double top = 0.0;
  if (sp.eigenvalues.size())
    top = std::max(std::abs(sp.eigenvalues(0)),
                   std::abs(sp.eigenvalues(sp.eigenvalues.size() - 1)));
  if (sp.eigenvalues.size() && sp.eigenvalues(sp.eigenvalues.size() - 1) < -out.tol)
    throw ValidationError("make_nnp: L is not conditionally PSD with respect to V");
  // floor at the projection roundoff scale so a numerically zero Ltilde
  // keeps rank zero
  double rank_thresh = std::max(kRankRelTol * top,
                                64.0 * std::numeric_limits<double>::epsilon() *
                                    l.mat().norm());
  int q = 0;
  while (q < out.n && sp.eigenvalues(q) > rank_thresh) ++q;
  out.q = q;
  out.Utilde = sp.eigenvectors.leftCols(q);
  out.Lambdatilde = sp.eigenvalues.head(q);
  return out;
}

// (-1)^p det [[L_X, V_X], [V_X^T, 0]]; exact zero outside p <= |X| <= p + q
inline LogDet pmf_unnorm(const NNP& nnp, const Sample& x) {
  int m = static_cast<int>(x.size());
  if (m < nnp.p || m > nnp.p + nnp.q) return LogDet::zero();
  Matrix vx(m, nnp.p);
  for (int a = 0; a < m; ++a) {
    if (x[a] < 0 || x[a] >= nnp.n) throw ValidationError("pmf_unnorm: index out of range");
    vx.row(a) = nnp.V.row(x[a]);
  }
  LogDet d = saddle_point_det(nnp.L.minor(x), vx);
  if (nnp.p % 2 == 1) d.sign = -d.sign;
  return d;
}

inline double gram_det(const Matrix& v) {
  if (v.cols() == 0) return 1.0;
  return log_det(SymMatrix(Matrix(v.transpose() * v))).value();
}

// normalization constant: fixed size m gives e_{m-p}(Lambdatilde) det(V^T V);
// no m gives det(I + Ltilde) det(V^T V)
inline double normalization(const NNP& nnp, std::optional<int> m = std::nullopt) {
  double gram = gram_det(nnp.V);
  if (!m.has_value()) {
    double det_ipl = 1.0;
    for (int i = 0; i < nnp.q; ++i) det_ipl *= 1.0 + nnp.Lambdatilde(i);
    return det_ipl * gram;
  }
  if (*m < nnp.p || *m > nnp.n)
    throw ValidationError("normalization: m outside [p, n]");
  return elementary_symmetric(nnp.Lambdatilde, *m - nnp.p) * gram;
}

// K = Q Q^T + Ltilde (I + Ltilde)^{-1}
inline SymMatrix marginal_kernel(const NNP& nnp) {
  Matrix k = Matrix::Zero(nnp.n, nnp.n);
  if (nnp.p > 0) k += nnp.Q * nnp.Q.transpose();
  for (int i = 0; i < nnp.q; ++i) {
    double lam = nnp.Lambdatilde(i);
    k += (lam / (1.0 + lam)) * nnp.Utilde.col(i) * nnp.Utilde.col(i).transpose();
  }
  return SymMatrix(k);
}

// V = unit-eigenvalue eigenvectors of K, L = K (I - K)^dagger
inline NNP nnp_from_kernel(const SymMatrix& k, double tol = 1e-8) {
  Spectrum sp = sym_eig(k);
  int n = static_cast<int>(k.n());
  std::vector<int> unit, mid;
  for (int i = 0; i < n; ++i) {
    double lam = sp.eigenvalues(i);
    if (lam < -tol || lam > 1.0 + tol)
      throw ValidationError("nnp_from_kernel: eigenvalue outside [0, 1]");
    if (lam >= 1.0 - tol) unit.push_back(i);
    else if (lam > tol) mid.push_back(i);
  }
  Matrix v(n, unit.size());
  for (std::size_t j = 0; j < unit.size(); ++j) v.col(j) = sp.eigenvectors.col(unit[j]);
  Matrix l = Matrix::Zero(n, n);
  for (int i : mid) {
    double lam = sp.eigenvalues(i);
    l += (lam / (1.0 - lam)) * sp.eigenvectors.col(i) * sp.eigenvectors.col(i).transpose();
  }
  return make_nnp(SymMatrix(l), v);
}

struct SizeLaw {
  Vector probs;  // indexed by m in {0..n}
};

// P(|X|=m) = e_{m-p}(Lambdatilde) / det(I + Ltilde), zero for m < p
inline SizeLaw size_law(const NNP& nnp) {
  Vector esp = elementary_symmetric_all(nnp.Lambdatilde);
  double det_ipl = 1.0;
  for (int i = 0; i < nnp.q; ++i) det_ipl *= 1.0 + nnp.Lambdatilde(i);
  SizeLaw law;
  law.probs = Vector::Zero(nnp.n + 1);
  for (int m = nnp.p; m <= nnp.n; ++m) {
    int k = m - nnp.p;
    if (k <= nnp.q) law.probs(m) = esp(k) / det_ipl;
  }
  return law;
}

// complement process: NNP(Ltilde^dagger, Z) with Z spanning the orthogonal
// complement of span Q + span Utilde
inline NNP complement(const NNP& nnp) {
  int n = nnp.n;
  Matrix ldag = Matrix::Zero(n, n);
  for (int i = 0; i < nnp.q; ++i)
    ldag += (1.0 / nnp.Lambdatilde(i)) * nnp.Utilde.col(i) * nnp.Utilde.col(i).transpose();
  int used = nnp.p + nnp.q;
  Matrix z(n, n - used);
  if (used < n) {
    Matrix span(n, used);
    span.leftCols(nnp.p) = nnp.Q;
    span.rightCols(nnp.q) = nnp.Utilde;
    if (used == 0) {
      z = Matrix::Identity(n, n);
    } else {
      Eigen::HouseholderQR<Matrix> qr(span);
      Matrix qfull = qr.householderQ() * Matrix::Identity(n, n);
      z = qfull.rightCols(n - used);
    }
  }
  return make_nnp(SymMatrix(ldag), z, nnp.tol);
}

// (L + V Xm^T + Ym V^T, V R); preserves the normalized pmf, R invertible
inline NNP apply_invariances(const NNP& nnp, const Matrix& r, const Matrix& xm,
                             const Matrix& ym) {
  if (r.rows() != nnp.p || r.cols() != nnp.p)
    throw ValidationError("apply_invariances: R has wrong shape");
  if (xm.rows() != nnp.n || xm.cols() != nnp.p || ym.rows() != nnp.n || ym.cols() != nnp.p)
    throw ValidationError("apply_invariances: Xm/Ym have wrong shape");
  if (nnp.p > 0 && log_det(r).is_zero())
    throw ValidationError("apply_invariances: R is singular");
  // the symmetrized update is V ((Xm+Ym)/2)^T + ((Xm+Ym)/2) V^T, which leaves
  // every saddle-point determinant unchanged
  Matrix shift = 0.5 * (xm + ym);
  Matrix l = nnp.L.mat() + nnp.V * shift.transpose() + shift * nnp.V.transpose();
  return make_nnp(SymMatrix(l), Matrix(nnp.V * r), nnp.tol);
}

}  // namespace dpp

#endif
