#ifndef DPP_LINALG_HPP
#define DPP_LINALG_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "dpp/common.hpp"

namespace dpp {

constexpr double kRankRelTol = 1e-10;  // eigenvalue below this times max|lambda| counts as zero

// Symmetric matrix wrapper. Symmetrizes on construction so that
// entries(i,j) == entries(j,i) holds exactly.
class SymMatrix {
public:
  SymMatrix() = default;

  explicit SymMatrix(const Matrix& a) {
    if (a.rows() != a.cols())
      throw ValidationError("SymMatrix: input is not square");
    m_ = 0.5 * (a + a.transpose());
  }

  Eigen::Index n() const { return m_.rows(); }
  const Matrix& mat() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  SymMatrix minor(const Sample& idx) const {
    Matrix sub(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
      for (std::size_t b = 0; b < idx.size(); ++b)
        sub(a, b) = m_(idx[a], idx[b]);
    return SymMatrix(sub);
  }

private:
  Matrix m_;
};

struct Spectrum {
  Vector eigenvalues;   // sorted descending
  Matrix eigenvectors;  // orthonormal columns, same order
};

// sign in {-1, 0, +1}; sign == 0 iff log_abs == -infinity
struct LogDet {
  int sign = 1;
  double log_abs = 0.0;

  static LogDet zero() { return {0, -std::numeric_limits<double>::infinity()}; }
  static LogDet one() { return {1, 0.0}; }

  bool is_zero() const { return sign == 0; }
  double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

  LogDet operator*(const LogDet& o) const {
    if (sign == 0 || o.sign == 0) return zero();
    return {sign * o.sign, log_abs + o.log_abs};
  }
};

// largest-magnitude entry of each column made positive (ties: lowest row wins)
inline void canonicalize_column_signs(Matrix& u) {
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
      double a = std::abs(u(i, j));
      if (a > best) { best = a; imax = i; }
    }
    if (u(imax, j) < 0.0) u.col(j) = -u.col(j);
  }
}

inline Spectrum sym_eig(const SymMatrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(s.mat());
  if (es.info() != Eigen::Success)
    throw NumericalError("sym_eig: eigensolver did not converge");
  Spectrum sp;
  sp.eigenvalues = es.eigenvalues().reverse();
  sp.eigenvectors = es.eigenvectors().rowwise().reverse();
  canonicalize_column_signs(sp.eigenvectors);
  return sp;
}

// Orthonormal basis of span(V) via column-pivoted QR. Throws if V is
// rank-deficient.
inline Matrix orthonormal_basis(const Matrix& v) {
  Eigen::Index n = v.rows(), p = v.cols();
  if (p == 0) return Matrix(n, 0);
  if (p > n) throw ValidationError("orthonormal_basis: more columns than rows");
  Eigen::ColPivHouseholderQR<Matrix> qr(v);
  if (qr.rank() < p)
    throw ValidationError("orthonormal_basis: rank-deficient input");
  Matrix q = qr.householderQ() * Matrix::Identity(n, p);
  canonicalize_column_signs(q);
  return q;
}

// log-determinant of a general square matrix by full-pivot LU; exact zero
// pivots (and only those) produce sign 0
inline LogDet log_det(const Matrix& a) {
  if (a.rows() != a.cols()) throw ValidationError("log_det: not square");
  Eigen::Index n = a.rows();
  if (n == 0) return LogDet::one();
  Eigen::FullPivLU<Matrix> lu(a);
  int sign = lu.permutationP().determinant() * lu.permutationQ().determinant();
  double logsum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double piv = lu.matrixLU()(i, i);
    if (piv == 0.0) return LogDet::zero();
    if (piv < 0.0) sign = -sign;
    logsum += std::log(std::abs(piv));
  }
  return {sign, logsum};
}

inline LogDet log_det(const SymMatrix& s) { return log_det(s.mat()); }

// principal minor det(S_X); empty X returns 1 by convention
inline LogDet det_minor(const SymMatrix& s, const Sample& x) {
  if (x.empty()) return LogDet::one();
  for (int i : x)
    if (i < 0 || i >= s.n()) throw ValidationError("det_minor: index out of range");
  return log_det(s.minor(x));
}

// det of [[L, V], [V^T, 0]]. Rank-deficient V makes the determinant a
// structural zero, returned as sign 0 rather than trusting tiny pivots.
inline LogDet saddle_point_det(const SymMatrix& l, const Matrix& v) {
  Eigen::Index m = l.n(), p = v.cols();
  if (v.rows() != m) throw ValidationError("saddle_point_det: row mismatch");
  if (p > m) throw ValidationError("saddle_point_det: p exceeds m");
  if (p == 0) return log_det(l);
  Eigen::ColPivHouseholderQR<Matrix> qr(v);
  if (qr.rank() < p) return LogDet::zero();
  Matrix big = Matrix::Zero(m + p, m + p);
  big.topLeftCorner(m, m) = l.mat();
  big.topRightCorner(m, p) = v;
  big.bottomLeftCorner(p, m) = v.transpose();
  return log_det(big);
}

// [t^p] det(L + t V V^T), the signed saddle-point determinant
inline LogDet coeff_tp_det(const SymMatrix& l, const Matrix& v) {
  Eigen::Index p = v.cols();
  if (p > l.n()) return LogDet::zero();
  LogDet d = saddle_point_det(l, v);
  if (p % 2 == 1) d.sign = -d.sign;
  return d;
}

// det(A + U W U^T) = det(A) det(W) det(W^{-1} + U^T A^{-1} U)
inline LogDet det_update(const SymMatrix& a, const Matrix& u, const SymMatrix& w) {
  Eigen::Index n = a.n(), m = w.n();
  if (u.rows() != n || u.cols() != m)
    throw ValidationError("det_update: U has wrong shape");
  Eigen::FullPivLU<Matrix> lua(a.mat());
  Eigen::FullPivLU<Matrix> luw(w.mat());
  LogDet da = log_det(a), dw = log_det(w);
  if (da.is_zero()) throw NumericalError("det_update: singular A");
  if (dw.is_zero()) throw NumericalError("det_update: singular W");
  Matrix inner = luw.solve(Matrix::Identity(m, m)) + u.transpose() * lua.solve(u);
  return da * dw * log_det(SymMatrix(inner));
}

// L_{x,x} - L_{x,Y} L_Y^{-1} L_{Y,x}
inline double schur_conditional(const SymMatrix& l, const Sample& y, int x) {
  if (x < 0 || x >= l.n()) throw ValidationError("schur_conditional: index out of range");
  for (int i : y)
    if (i == x) throw ValidationError("schur_conditional: x belongs to Y");
  if (y.empty()) return l(x, x);
  Matrix ly = l.minor(y).mat();
  Vector lyx(y.size());
  for (std::size_t a = 0; a < y.size(); ++a) lyx(a) = l(y[a], x);
  Eigen::FullPivLU<Matrix> lu(ly);
  if (!lu.isInvertible()) throw NumericalError("schur_conditional: singular L_Y");
  return l(x, x) - lyx.dot(lu.solve(lyx));
}

// e_m of the given values by the Newton triangle recurrence; e_0 = 1,
// m > n returns 0
inline double elementary_symmetric(const Vector& lambdas, int m) {
  int n = static_cast<int>(lambdas.size());
  if (m < 0) throw ValidationError("elementary_symmetric: negative order");
  if (m > n) return 0.0;
  std::vector<double> e(m + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < n; ++i)
    for (int k = std::min(m, i + 1); k >= 1; --k)
      e[k] += lambdas(i) * e[k - 1];
  return e[m];
}

// all of e_0..e_n in one pass
inline Vector elementary_symmetric_all(const Vector& lambdas) {
  int n = static_cast<int>(lambdas.size());
  Vector e = Vector::Zero(n + 1);
  e(0) = 1.0;
  for (int i = 0; i < n; ++i)
    for (int k = i + 1; k >= 1; --k)
      e(k) += lambdas(i) * e(k - 1);
  return e;
}

struct PencilBasis {
  Matrix u0;       // n x p, eigenvectors of A0's nonzero eigenvalues
  Matrix u1tilde;  // n x (n-p), limiting eigenvectors in orth(U0)
  Vector lambda1;  // eigenvalues of (I - U0 U0^T) A1 (I - U0 U0^T) on orth(U0)
};

// Limiting eigenbasis of A0 + eps A1 as eps -> 0, with first-order
// eigenvalues on the null space of A0.
inline PencilBasis pencil_limit_basis(const SymMatrix& a0, const SymMatrix& a1,
                                      double rank_tol = kRankRelTol) {
  Eigen::Index n = a0.n();
  if (a1.n() != n) throw ValidationError("pencil_limit_basis: size mismatch");
  Spectrum s0 = sym_eig(a0);
  double top = s0.eigenvalues.size() ? std::abs(s0.eigenvalues(0)) : 0.0;
  double thresh = rank_tol * top;
  if (s0.eigenvalues.size() && s0.eigenvalues(s0.eigenvalues.size() - 1) < -thresh)
    throw ValidationError("pencil_limit_basis: A0 is not PSD");
  Eigen::Index p = 0;
  if (top > 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double lam = std::abs(s0.eigenvalues(i));
      if (lam >= 4.0 * thresh) ++p;
      else if (lam >= thresh)
        throw NumericalError("pencil_limit_basis: rank of A0 is ambiguous at tolerance");
    }
  }
  PencilBasis out;
  out.u0 = s0.eigenvectors.leftCols(p);
  if (p == n) {
    out.u1tilde = Matrix(n, 0);
    out.lambda1 = Vector(0);
    return out;
  }
  Matrix q1;
  if (p == 0) {
    q1 = Matrix::Identity(n, n);
  } else {
    Eigen::HouseholderQR<Matrix> qr(out.u0);
    q1 = (qr.householderQ() * Matrix::Identity(n, n)).rightCols(n - p);
  }
  Spectrum s1 = sym_eig(SymMatrix(q1.transpose() * a1.mat() * q1));
  out.u1tilde = q1 * s1.eigenvectors;
  canonicalize_column_signs(out.u1tilde);
  out.lambda1 = s1.eigenvalues;
  return out;
}

}  // namespace dpp

#endif
