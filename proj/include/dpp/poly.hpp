#ifndef DPP_POLY_HPP
#define DPP_POLY_HPP

#include <numeric>

#include "dpp/kernels.hpp"

namespace dpp {

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Multi-indices of total degree <= k in d variables, ordered by total degree
// with graded lexicographic tie-breaking: within a degree block the exponent
// of the first variable decreases first.
struct MonomialBasis {
  int d = 1;
  int k = 0;
  std::vector<std::vector<int>> exponents;
};

namespace detail {

inline void fill_degree_block(int d, int deg, std::vector<int>& cur, int pos,
                              std::vector<std::vector<int>>& out) {
  if (pos == d - 1) {
    cur[pos] = deg;
    out.push_back(cur);
    return;
  }
  for (int e = deg; e >= 0; --e) {
    cur[pos] = e;
    fill_degree_block(d, deg - e, cur, pos + 1, out);
  }
}

}  // namespace detail

inline MonomialBasis monomial_basis(int k, int d) {
  if (d < 1) throw ValidationError("monomial_basis: d must be at least 1");
  if (k < 0) throw ValidationError("monomial_basis: k must be nonnegative");
  MonomialBasis b;
  b.d = d;
  b.k = k;
  std::vector<int> cur(d, 0);
  for (int deg = 0; deg <= k; ++deg)
    detail::fill_degree_block(d, deg, cur, 0, b.exponents);
  return b;
}

// number of monomials of degree exactly k in d variables
inline int count_degree(int k, int d) {
  return static_cast<int>(std::llround(binomial(k + d - 1, d - 1)));
}

// number of monomials of degree <= k; k = -1 gives 0 by convention
inline int count_upto(int k, int d) {
  if (k < 0) return 0;
  return static_cast<int>(std::llround(binomial(k + d, d)));
}

struct Counts {
  int h;  // degree exactly k
  int p;  // degree up to k
};

inline Counts counts(int k, int d) {
  if (k < -1) throw ValidationError("counts: k must be at least -1");
  if (k == -1) return {0, 0};
  return {count_degree(k, d), count_upto(k, d)};
}

// subset sizes with square multivariate Vandermonde matrices, up to n
inline std::vector<int> magic_numbers(int d, int n) {
  std::vector<int> out;
  for (int k = 0;; ++k) {
    int p = count_upto(k, d);
    if (p > n) break;
    out.push_back(p);
  }
  return out;
}

// n x P_{k,d} matrix of monomials evaluated at the ground set
inline Matrix vandermonde(const GroundSet& gs, int k) {
  MonomialBasis b = monomial_basis(k, gs.d());
  Matrix v(gs.n(), b.exponents.size());
  for (int i = 0; i < gs.n(); ++i)
    for (std::size_t j = 0; j < b.exponents.size(); ++j) {
      double val = 1.0;
      for (int l = 0; l < gs.d(); ++l)
        for (int rep = 0; rep < b.exponents[j][l]; ++rep) val *= gs.points(i, l);
      v(i, j) = val;
    }
  return v;
}

// scaled kernel derivatives at the origin, indexed by monomials of degree <= k
struct Wronskian {
  MonomialBasis basis;
  Matrix w;
};

// Entry for multi-indices (alpha, beta): zero unless every alpha_j + beta_j is
// even; otherwise with mu_j = (alpha_j + beta_j)/2 and m = |mu|,
//   W = f_{2m} * (m! / prod mu_j!) * prod_j C(2 mu_j, alpha_j) * (-1)^{|beta|},
// read off the expansion of sum_m f_{2m} ||x - y||^{2m}.
inline Wronskian wronskian(const KernelSpec& kernel, int k, int d) {
  if (kernel.finite_r() && k > kernel.r - 1)
    throw ValidationError("wronskian: kernel is not smooth enough for degree " +
                          std::to_string(k));
  if (2 * k >= static_cast<int>(kernel.taylor.size()))
    throw ValidationError("wronskian: taylor data too short");
  Wronskian out;
  out.basis = monomial_basis(k, d);
  std::size_t sz = out.basis.exponents.size();
  out.w = Matrix::Zero(sz, sz);
  for (std::size_t a = 0; a < sz; ++a) {
    const auto& alpha = out.basis.exponents[a];
    for (std::size_t b = 0; b < sz; ++b) {
      const auto& beta = out.basis.exponents[b];
      bool all_even = true;
      int m = 0;
      for (int l = 0; l < d; ++l) {
        int s = alpha[l] + beta[l];
        if (s % 2) { all_even = false; break; }
        m += s / 2;
      }
      if (!all_even) continue;
      double multinom = 1.0;
      int used = 0;
      double binprod = 1.0;
      int abs_beta = 0;
      for (int l = 0; l < d; ++l) {
        int mu = (alpha[l] + beta[l]) / 2;
        multinom *= binomial(used + mu, mu);
        used += mu;
        binprod *= binomial(2 * mu, alpha[l]);
        abs_beta += beta[l];
      }
      out.w(a, b) = kernel.taylor[2 * m] * multinom * binprod * (abs_beta % 2 ? -1.0 : 1.0);
    }
  }
  return out;
}

// Schur complement of the degrees <= k-1 block inside W over degrees <= k;
// result is indexed by the degree-k monomials. k = 0 returns W itself.
inline Matrix wbar_schur(const Wronskian& wr, int d) {
  int k = wr.basis.k;
  int lead = count_upto(k - 1, d);
  int trail = count_degree(k, d);
  if (lead + trail != wr.w.rows())
    throw ValidationError("wbar_schur: wronskian size does not match degree blocks");
  if (lead == 0) return wr.w;
  Matrix a = wr.w.topLeftCorner(lead, lead);
  Matrix b = wr.w.topRightCorner(lead, trail);
  Matrix c = wr.w.bottomRightCorner(trail, trail);
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible())
    throw NumericalError("wbar_schur: leading wronskian block is singular");
  Matrix s = c - b.transpose() * lu.solve(b);
  return 0.5 * (s + s.transpose());
}

}  // namespace dpp

#endif
