#ifndef DPP_FLATLIMIT_HPP
#define DPP_FLATLIMIT_HPP

#include "dpp/poly.hpp"
#include "dpp/sampling.hpp"

namespace dpp {

enum class ProcessTag {
  ProjectionDPP,
  FixedSizeLEnsemble,
  PPDPPFixed,
  PPDPPVarying,
  DeterministicFull,
};

inline const char* tag_name(ProcessTag t) {
  switch (t) {
    case ProcessTag::ProjectionDPP: return "projection_dpp";
    case ProcessTag::FixedSizeLEnsemble: return "fixed_size_l_ensemble";
    case ProcessTag::PPDPPFixed: return "ppdpp_fixed";
    case ProcessTag::PPDPPVarying: return "ppdpp_varying";
    case ProcessTag::DeterministicFull: return "deterministic_full";
  }
  return "?";
}

// tagged limiting process with its defining matrices
struct ProcessDescriptor {
  ProcessTag tag = ProcessTag::DeterministicFull;
  int n = 0;
  Matrix basis;                           // ProjectionDPP only: orthonormal columns
  std::optional<NNP> nnp;                 // the other stochastic tags
  std::optional<int> m;                   // fixed-size tags
  std::optional<double> alpha;            // varying-size scale
  std::optional<MonomialBasis> monomials; // V's column layout when kernel-derived
  std::string kernel_name;
};

namespace detail {

inline Matrix vmat_upto(const GroundSet& gs, int k) {
  if (k < 0) return Matrix(gs.n(), 0);
  return vandermonde(gs, k);
}

inline Matrix vmat_degree(const GroundSet& gs, int k) {
  Matrix all = vandermonde(gs, k);
  return all.rightCols(count_degree(k, gs.d()));
}

inline ProcessDescriptor projection_descriptor(const GroundSet& gs, int k,
                                               const std::string& kname) {
  ProcessDescriptor out;
  out.tag = ProcessTag::ProjectionDPP;
  out.n = gs.n();
  out.basis = orthonormal_basis(vmat_upto(gs, k));
  out.m = static_cast<int>(out.basis.cols());
  out.monomials = monomial_basis(k, gs.d());
  out.kernel_name = kname;
  return out;
}

}  // namespace detail

// Limiting fixed-size process of the kernel L-ensemble as eps -> 0:
// square-Vandermonde sizes with enough smoothness give a projection DPP;
// finite smoothness with m >= P_{r-1,d} gives the odd-power distance pair;
// remaining sizes give the Wronskian Schur-complement pair.
inline ProcessDescriptor fixed_limit(const KernelSpec& kernel, const GroundSet& gs, int m) {
  int n = gs.n(), d = gs.d();
  if (m < 1 || m > n) throw ValidationError("fixed_limit: m outside [1, n]");
  int kr = kernel.finite_r() ? kernel.r : -1;

  for (int k = 0;; ++k) {
    int p = count_upto(k, d);
    if (p > m) break;
    if (p == m && (!kernel.finite_r() || k <= kr - 1))
      return detail::projection_descriptor(gs, k, kernel.name);
  }

  ProcessDescriptor out;
  out.n = n;
  out.m = m;
  out.kernel_name = kernel.name;
  out.tag = ProcessTag::PPDPPFixed;
  if (kernel.finite_r() && m >= count_upto(kr - 1, d)) {
    Matrix l = distance_matrix(gs, 2 * kr - 1).mat();
    if (kr % 2 == 1) l = -l;
    out.nnp = make_nnp(SymMatrix(l), detail::vmat_upto(gs, kr - 1));
    out.monomials = monomial_basis(kr - 1, d);
  } else {
    int k = 1;
    while (count_upto(k, d) < m) ++k;
    Matrix wbar = wbar_schur(wronskian(kernel, k, d), d);
    Matrix vk = detail::vmat_degree(gs, k);
    out.nnp = make_nnp(SymMatrix(Matrix(vk * wbar * vk.transpose())),
                       detail::vmat_upto(gs, k - 1));
    out.monomials = monomial_basis(k - 1, d);
  }
  if (m > out.nnp->p + out.nnp->q)
    throw NumericalError("fixed_limit: limit process cannot reach size m (degenerate geometry)");
  return out;
}

// phase-diagram coordinates for the varying-size limit of
// alpha eps^{-scale_power} L(eps)
struct PhasePoint {
  int scale_power = 0;
  double alpha = 1.0;
  int r = KernelSpec::kInfiniteSmooth;
  int n = 0;
  int d = 1;
};

inline PhasePoint make_phase(const KernelSpec& kernel, const GroundSet& gs,
                             int scale_power, double alpha) {
  if (scale_power < 0) throw ValidationError("make_phase: scale_power must be nonnegative");
  if (alpha <= 0.0) throw ValidationError("make_phase: alpha must be positive");
  return {scale_power, alpha, kernel.r, gs.n(), gs.d()};
}

// Varying-size limit. With l = (p+1)/2 rounded down (p = scale_power):
// P_{l-1,d} >= n or r < (p+1)/2 gives the deterministic full set; p odd with
// r > (p+1)/2 gives a projection DPP of size P_{l-1,d}; p even gives the
// Wronskian Schur pair at degree l; r = (p+1)/2 gives the odd-power distance
// pair, all scaled by alpha.
inline ProcessDescriptor varying_limit(const KernelSpec& kernel, const GroundSet& gs,
                                       const PhasePoint& phase) {
  int n = gs.n(), d = gs.d();
  if (phase.n != n || phase.d != d || phase.r != kernel.r)
    throw ValidationError("varying_limit: phase point does not match kernel/ground set");
  if (phase.alpha <= 0.0) throw ValidationError("varying_limit: alpha must be positive");
  if (phase.scale_power < 0) throw ValidationError("varying_limit: negative scale power");
  int p = phase.scale_power;
  int l = (p + 1) / 2;
  double alpha = phase.alpha;

  ProcessDescriptor out;
  out.n = n;
  out.kernel_name = kernel.name;
  out.alpha = alpha;

  if (count_upto(l - 1, d) >= n ||
      (kernel.finite_r() && 2 * kernel.r < p + 1)) {
    out.tag = ProcessTag::DeterministicFull;
    return out;
  }
  if (kernel.finite_r() && 2 * kernel.r == p + 1) {
    int r = kernel.r;
    Matrix lmat = alpha * kernel.taylor[2 * r - 1] * distance_matrix(gs, 2 * r - 1).mat();
    out.tag = ProcessTag::PPDPPVarying;
    out.nnp = make_nnp(SymMatrix(lmat), detail::vmat_upto(gs, r - 1));
    out.monomials = monomial_basis(r - 1, d);
    return out;
  }
  if (p % 2 == 1) {
    out = detail::projection_descriptor(gs, l - 1, kernel.name);
    out.alpha = alpha;
    return out;
  }
  Matrix wbar = wbar_schur(wronskian(kernel, l, d), d);
  Matrix vl = detail::vmat_degree(gs, l);
  out.tag = ProcessTag::PPDPPVarying;
  out.nnp = make_nnp(SymMatrix(Matrix(alpha * vl * wbar * vl.transpose())),
                     detail::vmat_upto(gs, l - 1));
  if (l >= 1) out.monomials = monomial_basis(l - 1, d);  // l = 0: empty V, no layout
  return out;
}

// gamma of the even-power univariate case:
// 1/gamma = ((V^T V)^{-1})_{l+1,l+1} ((W_{<=l})^{-1})_{l+1,l+1};
// P(|X*| = l) = 1/(1 + alpha gamma)
inline double gamma_even_case(const KernelSpec& kernel, const GroundSet& gs, int l) {
  if (gs.d() != 1) throw ValidationError("gamma_even_case: univariate only");
  if (l < 0 || l + 1 > gs.n()) throw ValidationError("gamma_even_case: l out of range");
  Matrix v = vandermonde(gs, l);
  Matrix gram = v.transpose() * v;
  Eigen::FullPivLU<Matrix> lug(gram);
  if (!lug.isInvertible()) throw ValidationError("gamma_even_case: degenerate points");
  Matrix w = wronskian(kernel, l, 1).w;
  Eigen::FullPivLU<Matrix> luw(w);
  if (!luw.isInvertible()) throw NumericalError("gamma_even_case: singular wronskian");
  double gv = lug.inverse()(l, l);
  double gw = luw.inverse()(l, l);
  return 1.0 / (gv * gw);
}

// limiting process of eps A + V V^T at fixed size m
inline ProcessDescriptor pencil_fixed_limit(const SymMatrix& a, const Matrix& v, int m) {
  int n = static_cast<int>(a.n());
  int p = static_cast<int>(v.cols());
  if (m < 0 || m > n) throw ValidationError("pencil_fixed_limit: m outside [0, n]");
  if (log_det(a).is_zero()) throw ValidationError("pencil_fixed_limit: A is singular");
  ProcessDescriptor out;
  out.n = n;
  out.m = m;
  if (m == p) {
    out.tag = ProcessTag::ProjectionDPP;
    out.basis = orthonormal_basis(v);
    return out;
  }
  if (m < p) {
    out.tag = ProcessTag::FixedSizeLEnsemble;
    out.nnp = make_nnp(SymMatrix(Matrix(v * v.transpose())), Matrix(n, 0));
    return out;
  }
  out.tag = ProcessTag::PPDPPFixed;
  out.nnp = make_nnp(a, v);
  if (m > out.nnp->p + out.nnp->q)
    throw ValidationError("pencil_fixed_limit: m exceeds p + rank of the projected matrix");
  return out;
}

// varying-size pencil limit: DPP(V V^T) without rescaling, the extended pair
// <A, V> with eps^{-1} rescaling
inline ProcessDescriptor pencil_varying_limit(const SymMatrix& a, const Matrix& v,
                                              bool rescaled) {
  int n = static_cast<int>(a.n());
  ProcessDescriptor out;
  out.n = n;
  out.tag = ProcessTag::PPDPPVarying;
  out.alpha = 1.0;
  if (rescaled) {
    if (log_det(a).is_zero()) throw ValidationError("pencil_varying_limit: A is singular");
    out.nnp = make_nnp(a, v);
  } else {
    out.nnp = make_nnp(SymMatrix(Matrix(v * v.transpose())), Matrix(n, 0));
  }
  return out;
}

// solves sum_i beta lambda_i / (1 + beta lambda_i) = m for beta by bisection
inline double solve_scaling(const Vector& lambdas, double m, double tol = 1e-10) {
  int positive = 0;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    if (lambdas(i) < 0.0) throw ValidationError("solve_scaling: negative eigenvalue");
    if (lambdas(i) > 0.0) ++positive;
  }
  if (m <= 0.0 || m >= positive)
    throw ValidationError("solve_scaling: m outside (0, #positive eigenvalues)");
  auto s = [&](double beta) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < lambdas.size(); ++i)
      acc += beta * lambdas(i) / (1.0 + beta * lambdas(i));
    return acc;
  };
  double lo = 1.0, hi = 1.0;
  for (int it = 0; s(lo) > m && it < 4000; ++it) lo *= 0.5;
  for (int it = 0; s(hi) < m && it < 4000; ++it) hi *= 2.0;
  if (s(lo) > m || s(hi) < m) throw NumericalError("solve_scaling: bracketing failed");
  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < 500; ++it) {
    mid = 0.5 * (lo + hi);
    double val = s(mid);
    if (std::abs(val - m) < tol) return mid;
    if (val < m) lo = mid;
    else hi = mid;
  }
  throw NumericalError("solve_scaling: bisection did not converge");
}

inline Sample sample_descriptor(const ProcessDescriptor& desc, RngState& rng) {
  switch (desc.tag) {
    case ProcessTag::DeterministicFull: {
      Sample all(desc.n);
      for (int i = 0; i < desc.n; ++i) all[i] = i;
      return all;
    }
    case ProcessTag::ProjectionDPP:
      return sample_projection(desc.basis, rng);
    case ProcessTag::FixedSizeLEnsemble:
    case ProcessTag::PPDPPFixed:
      return sample_fixed_dpp(*desc.nnp, *desc.m, rng);
    case ProcessTag::PPDPPVarying:
      return sample_dpp(*desc.nnp, rng);
  }
  throw ValidationError("sample_descriptor: unknown tag");
}

// size distribution implied by the descriptor
inline Vector descriptor_size_law(const ProcessDescriptor& desc) {
  Vector probs = Vector::Zero(desc.n + 1);
  switch (desc.tag) {
    case ProcessTag::DeterministicFull:
      probs(desc.n) = 1.0;
      break;
    case ProcessTag::ProjectionDPP:
      probs(desc.basis.cols()) = 1.0;
      break;
    case ProcessTag::FixedSizeLEnsemble:
    case ProcessTag::PPDPPFixed:
      probs(*desc.m) = 1.0;
      break;
    case ProcessTag::PPDPPVarying: {
      SizeLaw law = size_law(*desc.nnp);
      probs = law.probs;
      break;
    }
  }
  return probs;
}

}  // namespace dpp

#endif
