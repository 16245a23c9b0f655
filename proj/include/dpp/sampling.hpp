#ifndef DPP_SAMPLING_HPP
#define DPP_SAMPLING_HPP

#include "dpp/nnp.hpp"

namespace dpp {

// independent inclusion with probability lambda_i / (1 + lambda_i)
inline Sample sample_bernoulli_diag(const Vector& lambdas, RngState& rng) {
  Sample out;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    double lam = lambdas(i);
    if (lam < 0.0) throw ValidationError("sample_bernoulli_diag: negative weight");
    if (rng.uniform() < lam / (1.0 + lam)) out.push_back(static_cast<int>(i));
  }
  return out;
}

// P(Y) proportional to prod_{i in Y} lambda_i over |Y| = m, by the esp
// recurrence: include i with probability lambda_i e_{k-1}(tail) / e_k(tail)
inline Sample sample_fixed_diag(const Vector& lambdas, int m, RngState& rng) {
  int n = static_cast<int>(lambdas.size());
  if (m < 0 || m > n) throw ValidationError("sample_fixed_diag: m out of range");
  int positive = 0;
  for (int i = 0; i < n; ++i) {
    if (lambdas(i) < 0.0) throw ValidationError("sample_fixed_diag: negative weight");
    if (lambdas(i) > 0.0) ++positive;
  }
  if (m > positive) throw ValidationError("sample_fixed_diag: m exceeds the number of positive weights");
  // esp[i][k] = e_k(lambda_i .. lambda_{n-1})
  std::vector<std::vector<double>> esp(n + 1, std::vector<double>(m + 1, 0.0));
  esp[n][0] = 1.0;
  for (int i = n - 1; i >= 0; --i) {
    esp[i][0] = 1.0;
    for (int k = 1; k <= m; ++k)
      esp[i][k] = esp[i + 1][k] + lambdas(i) * esp[i + 1][k - 1];
  }
  Sample out;
  int k = m;
  for (int i = 0; i < n && k > 0; ++i) {
    double denom = esp[i][k];
    if (denom <= 0.0) throw NumericalError("sample_fixed_diag: vanishing symmetric polynomial");
    double inc = lambdas(i) * esp[i + 1][k - 1] / denom;
    if (rng.uniform() < inc) {
      out.push_back(i);
      --k;
    }
  }
  if (k > 0) throw NumericalError("sample_fixed_diag: ran out of indices");
  return out;
}

// chain rule over the residual projection kernel diag; always returns
// exactly m = #cols(U) indices
inline Sample sample_projection(const Matrix& u, RngState& rng) {
  int n = static_cast<int>(u.rows());
  int m = static_cast<int>(u.cols());
  if (m > n) throw ValidationError("sample_projection: more columns than rows");
  if (m == 0) return {};
  if ((u.transpose() * u - Matrix::Identity(m, m)).cwiseAbs().maxCoeff() > 1e-8)
    throw ValidationError("sample_projection: basis is not orthonormal");
  Matrix b = u;
  Vector d(n);
  for (int i = 0; i < n; ++i) d(i) = b.row(i).squaredNorm();
  std::vector<bool> picked(n, false);
  Sample out;
  for (int step = 0; step < m; ++step) {
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      if (!picked[i]) total += d(i);
    if (total <= 0.0) throw NumericalError("sample_projection: residual diagonal vanished");
    double target = rng.uniform() * total;
    int j = -1;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (picked[i]) continue;
      acc += d(i);
      if (target < acc) { j = i; break; }
    }
    if (j < 0) {
      for (int i = n - 1; i >= 0; --i)
        if (!picked[i]) { j = i; break; }
    }
    out.push_back(j);
    picked[j] = true;
    Eigen::RowVectorXd vhat = b.row(j) / std::sqrt(d(j));
    Vector coeff = b * vhat.transpose();
    b -= coeff * vhat;
    for (int i = 0; i < n; ++i) {
      if (picked[i]) { d(i) = 0.0; continue; }
      d(i) -= coeff(i) * coeff(i);
      if (d(i) < 0.0) {
        if (d(i) < -1e-10) throw NumericalError("sample_projection: negative residual diagonal");
        d(i) = 0.0;
      }
    }
    b.row(j).setZero();
  }
  std::sort(out.begin(), out.end());
  return out;
}

// mixture representation, varying size: Y ~ Bernoulli(Lambdatilde), then a
// projection DPP on [Q, Utilde_Y]
inline Sample sample_dpp(const NNP& nnp, RngState& rng) {
  Sample y = sample_bernoulli_diag(nnp.Lambdatilde, rng);
  Matrix w(nnp.n, nnp.p + y.size());
  w.leftCols(nnp.p) = nnp.Q;
  for (std::size_t j = 0; j < y.size(); ++j)
    w.col(nnp.p + j) = nnp.Utilde.col(y[j]);
  return sample_projection(w, rng);
}

// mixture representation, fixed size m: Y ~ fixed-size diagonal of size m - p
inline Sample sample_fixed_dpp(const NNP& nnp, int m, RngState& rng) {
  if (m < nnp.p || m > nnp.p + nnp.q)
    throw ValidationError("sample_fixed_dpp: m outside [p, p+q]");
  Sample y = sample_fixed_diag(nnp.Lambdatilde, m - nnp.p, rng);
  Matrix w(nnp.n, nnp.p + y.size());
  w.leftCols(nnp.p) = nnp.Q;
  for (std::size_t j = 0; j < y.size(); ++j)
    w.col(nnp.p + j) = nnp.Utilde.col(y[j]);
  return sample_projection(w, rng);
}

}  // namespace dpp

#endif
