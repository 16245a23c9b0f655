#ifndef DPP_KERNELS_HPP
#define DPP_KERNELS_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <limits>

#include "dpp/linalg.hpp"

namespace dpp {

// n distinct points in R^d, one per row
struct GroundSet {
  Matrix points;  // n x d

  GroundSet() = default;
  explicit GroundSet(const Matrix& pts) : points(pts) {
    if (pts.cols() < 1) throw ValidationError("GroundSet: dimension must be at least 1");
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      for (Eigen::Index j = i + 1; j < pts.rows(); ++j)
        if ((pts.row(i) - pts.row(j)).norm() == 0.0)
          throw ValidationError("GroundSet: points must be pairwise distinct");
  }

  int n() const { return static_cast<int>(points.rows()); }
  int d() const { return static_cast<int>(points.cols()); }
  double dist(int i, int j) const { return (points.row(i) - points.row(j)).norm(); }
};

// Stationary kernel: radial profile f, Taylor coefficients f_i = f^(i)(0)/i!,
// and smoothness order r = min{ r : f_{2r-1} != 0 } (kInfiniteSmooth when all
// odd coefficients vanish).
struct KernelSpec {
  static constexpr int kInfiniteSmooth = std::numeric_limits<int>::max();

  std::string name;
  std::function<double(double)> f;
  // same profile in extended precision, for near-flat matrices whose minors
  // drop below double roundoff; empty for kernels that do not provide one
  std::function<long double(long double)> f_ext;
  std::vector<double> taylor;
  int r = kInfiniteSmooth;

  bool finite_r() const { return r != kInfiniteSmooth; }
};

// checks the declared smoothness order against the stored coefficients
inline void validate_kernel(const KernelSpec& k, double tol = 1e-12) {
  if (k.taylor.empty()) throw ValidationError("kernel: no taylor coefficients");
  int odd_limit = k.finite_r() ? 2 * k.r - 1 : static_cast<int>(k.taylor.size());
  for (int i = 1; i < odd_limit && i < static_cast<int>(k.taylor.size()); i += 2)
    if (std::abs(k.taylor[i]) > tol)
      throw ValidationError("kernel " + k.name + ": odd coefficient below 2r-1 is non-zero");
  if (k.finite_r()) {
    if (2 * k.r - 1 >= static_cast<int>(k.taylor.size()))
      throw ValidationError("kernel " + k.name + ": taylor data too short for declared r");
    double lead = k.taylor[2 * k.r - 1];
    if (lead == 0.0)
      throw ValidationError("kernel " + k.name + ": f_{2r-1} vanishes");
    if ((k.r % 2 == 0) != (lead > 0.0))
      throw ValidationError("kernel " + k.name + ": sign of f_{2r-1} is not (-1)^r");
  }
}

namespace detail {

inline std::vector<double> inv_factorials(int len) {
  std::vector<double> v(len, 1.0);
  for (int i = 1; i < len; ++i) v[i] = v[i - 1] / i;
  return v;
}

}  // namespace detail

inline std::vector<KernelSpec> builtin_kernels() {
  constexpr int len = 64;
  auto invfac = detail::inv_factorials(len);
  std::vector<KernelSpec> out;

  {
    KernelSpec k;
    k.name = "gaussian";
    k.f = [](double t) { return std::exp(-t * t); };
    k.f_ext = [](long double t) { return expl(-t * t); };
    k.taylor.assign(len, 0.0);
    for (int j = 0; 2 * j < len; ++j)
      k.taylor[2 * j] = (j % 2 ? -1.0 : 1.0) * invfac[j];
    k.r = KernelSpec::kInfiniteSmooth;
    out.push_back(k);
  }
  {
    KernelSpec k;
    k.name = "exponential";
    k.f = [](double t) { return std::exp(-t); };
    k.f_ext = [](long double t) { return expl(-t); };
    k.taylor.resize(len);
    for (int i = 0; i < len; ++i) k.taylor[i] = (i % 2 ? -1.0 : 1.0) * invfac[i];
    k.r = 1;
    out.push_back(k);
  }
  {
    KernelSpec k;
    k.name = "matern32";
    k.f = [](double t) { return (1.0 + t) * std::exp(-t); };
    k.f_ext = [](long double t) { return (1.0L + t) * expl(-t); };
    k.taylor.resize(len);
    for (int i = 0; i < len; ++i)
      k.taylor[i] = (i % 2 ? -1.0 : 1.0) * (1.0 - i) * invfac[i];
    k.r = 2;
    out.push_back(k);
  }
  {
    KernelSpec k;
    k.name = "matern52";
    k.f = [](double t) { return (3.0 + 3.0 * t + t * t) * std::exp(-t); };
    k.f_ext = [](long double t) { return (3.0L + 3.0L * t + t * t) * expl(-t); };
    k.taylor.resize(len);
    for (int i = 0; i < len; ++i) {
      double s = (i % 2 ? -1.0 : 1.0);
      double c = 3.0 * invfac[i];
      if (i >= 1) c -= 3.0 * invfac[i - 1];
      if (i >= 2) c += invfac[i - 2];
      k.taylor[i] = s * c;
    }
    k.r = 3;
    out.push_back(k);
  }
  {
    KernelSpec k;
    k.name = "oscillatory";
    k.f = [](double t) { return std::sin(t + M_PI / 4.0) * std::exp(-t); };
    k.f_ext = [](long double t) {
      return sinl(t + 0.785398163397448309616L) * expl(-t);
    };
    // sin(t + pi/4) e^{-t} = (sqrt2/2) (Re + Im) of exp((-1+i) t)
    k.taylor.resize(len);
    std::complex<double> pw(1.0, 0.0);
    const std::complex<double> base(-1.0, 1.0);
    const double half_sqrt2 = std::sqrt(2.0) / 2.0;
    for (int i = 0; i < len; ++i) {
      k.taylor[i] = half_sqrt2 * (pw.real() + pw.imag()) * invfac[i];
      pw *= base;
    }
    k.r = 2;
    out.push_back(k);
  }
  return out;
}

inline KernelSpec kernel_by_name(const std::string& name) {
  for (auto& k : builtin_kernels())
    if (k.name == name) return k;
  throw ValidationError("unknown kernel: " + name);
}

// L(eps)_{ij} = f(eps ||x_i - x_j||)
inline SymMatrix kernel_matrix(const KernelSpec& kernel, const GroundSet& gs, double eps) {
  if (eps <= 0.0) throw ValidationError("kernel_matrix: eps must be positive");
  int n = gs.n();
  Matrix l(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      l(i, j) = l(j, i) = kernel.f(eps * gs.dist(i, j));
  return SymMatrix(l);
}

using MatrixExt = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

// kernel_matrix evaluated in extended precision, distances included.  Near
// the flat limit the minors of L(eps) shrink like high powers of eps and the
// double-precision entries alone carry too much roundoff to resolve them.
inline MatrixExt kernel_matrix_ext(const KernelSpec& kernel, const GroundSet& gs,
                                   double eps) {
  if (eps <= 0.0) throw ValidationError("kernel_matrix_ext: eps must be positive");
  if (!kernel.f_ext)
    throw ValidationError("kernel " + kernel.name + ": no extended-precision profile");
  int n = gs.n();
  MatrixExt l(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      long double s2 = 0.0L;
      for (int c = 0; c < gs.d(); ++c) {
        long double diff = static_cast<long double>(gs.points(i, c)) -
                           static_cast<long double>(gs.points(j, c));
        s2 += diff * diff;
      }
      l(i, j) = l(j, i) = kernel.f_ext(static_cast<long double>(eps) * sqrtl(s2));
    }
  return l;
}

// D^(p) = [||x_i - x_j||^p]; D^(0) is the all-ones matrix
inline SymMatrix distance_matrix(const GroundSet& gs, int power) {
  if (power < 0) throw ValidationError("distance_matrix: negative power");
  int n = gs.n();
  if (power == 0) return SymMatrix(Matrix::Ones(n, n));
  Matrix d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      d(i, j) = d(j, i) = std::pow(gs.dist(i, j), power);
  return SymMatrix(d);
}

// partial sum sum_{i<=order} eps^i f_i D^(i)
inline SymMatrix taylor_expand_matrix(const KernelSpec& kernel, const GroundSet& gs,
                                      double eps, int order) {
  if (order < 0 || order >= static_cast<int>(kernel.taylor.size()))
    throw ValidationError("taylor_expand_matrix: order exceeds stored taylor data");
  int n = gs.n();
  Matrix acc = Matrix::Zero(n, n);
  double epspow = 1.0;
  for (int i = 0; i <= order; ++i) {
    acc += epspow * kernel.taylor[i] * distance_matrix(gs, i).mat();
    epspow *= eps;
  }
  return SymMatrix(acc);
}

}  // namespace dpp

#endif
