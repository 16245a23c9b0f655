#ifndef DPP_VERIFY_HPP
#define DPP_VERIFY_HPP

#include <cmath>
#include <istream>
#include <limits>
#include <sstream>

#include "dpp/flatlimit.hpp"

namespace dpp {

// exhaustive distribution over subsets of {0..n-1}, masses kept in log space
struct PmfTable {
  int n = 0;
  std::vector<double> logmass;   // index = bitmask, -inf where mass is zero
  std::vector<int> raw_sign;     // sign of the unnormalized mass before clamping
  double log_normalizer = -std::numeric_limits<double>::infinity();

  double prob(uint32_t mask) const {
    double lm = logmass[mask];
    if (std::isinf(lm)) return 0.0;
    return std::exp(lm - log_normalizer);
  }
  double prob(const Sample& x) const { return prob(mask_from_sample(x)); }
};

namespace detail {

inline void check_enum_size(int n) {
  if (n < 0 || n > 20) throw ValidationError("enumeration limited to n <= 20");
}

// normalizes in place; tiny negative masses are treated as roundoff zeros,
// large ones are an error
inline void finalize_table(PmfTable& t) {
  double maxlog = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < t.logmass.size(); ++i)
    if (t.raw_sign[i] != 0) maxlog = std::max(maxlog, t.logmass[i]);
  double acc = 0.0;
  for (size_t i = 0; i < t.logmass.size(); ++i) {
    if (t.raw_sign[i] < 0) {
      if (t.logmass[i] > maxlog + std::log(1e-10))
        throw NumericalError("enumerate: a subset mass is significantly negative");
      t.logmass[i] = -std::numeric_limits<double>::infinity();
    }
    if (t.raw_sign[i] != 0 && !std::isinf(t.logmass[i]))
      acc += std::exp(t.logmass[i] - maxlog);
  }
  if (!(acc > 0.0)) throw ValidationError("enumerate: all subsets have zero mass");
  t.log_normalizer = maxlog + std::log(acc);
}

}  // namespace detail

// exact pmf of the pair <L, V>, optionally conditioned on |X| = m
inline PmfTable enumerate_pmf(const NNP& nnp, std::optional<int> m = std::nullopt) {
  detail::check_enum_size(nnp.n);
  if (m && (*m < nnp.p || *m > nnp.p + nnp.q))
    throw ValidationError("enumerate_pmf: conditioned size is infeasible");
  PmfTable t;
  t.n = nnp.n;
  uint32_t total = 1u << nnp.n;
  t.logmass.assign(total, -std::numeric_limits<double>::infinity());
  t.raw_sign.assign(total, 0);
  for (uint32_t mask = 0; mask < total; ++mask) {
    int sz = __builtin_popcount(mask);
    if (m && sz != *m) continue;
    LogDet ld = pmf_unnorm(nnp, sample_from_mask(mask, nnp.n));
    if (ld.is_zero()) continue;
    t.logmass[mask] = ld.log_abs;
    t.raw_sign[mask] = ld.sign;
  }
  detail::finalize_table(t);
  return t;
}

// exact pmf of the plain L-ensemble with per-element scale exp(log_scale):
// mass(X) = det(L_X) * exp(|X| log_scale)
inline PmfTable enumerate_pmf_scaled(const SymMatrix& l, double log_scale,
                                     std::optional<int> m = std::nullopt) {
  int n = static_cast<int>(l.n());
  detail::check_enum_size(n);
  PmfTable t;
  t.n = n;
  uint32_t total = 1u << n;
  t.logmass.assign(total, -std::numeric_limits<double>::infinity());
  t.raw_sign.assign(total, 0);
  for (uint32_t mask = 0; mask < total; ++mask) {
    int sz = __builtin_popcount(mask);
    if (m && sz != *m) continue;
    LogDet ld = det_minor(l, sample_from_mask(mask, n));
    if (ld.is_zero()) continue;
    t.logmass[mask] = ld.log_abs + sz * log_scale;
    t.raw_sign[mask] = ld.sign;
  }
  detail::finalize_table(t);
  return t;
}

// enumerate_pmf_scaled in extended precision, for kernel matrices built with
// kernel_matrix_ext.  The log-domain table itself stays in double; only the
// per-subset determinants need the extra mantissa bits.
inline PmfTable enumerate_pmf_scaled_ext(const MatrixExt& l, double log_scale,
                                         std::optional<int> m = std::nullopt) {
  int n = static_cast<int>(l.rows());
  detail::check_enum_size(n);
  PmfTable t;
  t.n = n;
  uint32_t total = 1u << n;
  t.logmass.assign(total, -std::numeric_limits<double>::infinity());
  t.raw_sign.assign(total, 0);
  for (uint32_t mask = 0; mask < total; ++mask) {
    int sz = __builtin_popcount(mask);
    if (m && sz != *m) continue;
    long double det = 1.0L;
    if (sz > 0) {
      Sample idx = sample_from_mask(mask, n);
      MatrixExt sm(sz, sz);
      for (int a = 0; a < sz; ++a)
        for (int b = 0; b < sz; ++b) sm(a, b) = l(idx[a], idx[b]);
      det = Eigen::FullPivLU<MatrixExt>(sm).determinant();
    }
    if (det == 0.0L) continue;
    t.logmass[mask] = static_cast<double>(logl(fabsl(det))) + sz * log_scale;
    t.raw_sign[mask] = det > 0.0L ? 1 : -1;
  }
  detail::finalize_table(t);
  return t;
}

// exact pmf of a limiting-process descriptor
inline PmfTable enumerate_descriptor(const ProcessDescriptor& desc) {
  detail::check_enum_size(desc.n);
  switch (desc.tag) {
    case ProcessTag::DeterministicFull: {
      PmfTable t;
      t.n = desc.n;
      uint32_t total = 1u << desc.n;
      t.logmass.assign(total, -std::numeric_limits<double>::infinity());
      t.raw_sign.assign(total, 0);
      t.logmass[total - 1] = 0.0;
      t.raw_sign[total - 1] = 1;
      t.log_normalizer = 0.0;
      return t;
    }
    case ProcessTag::ProjectionDPP: {
      SymMatrix k(Matrix(desc.basis * desc.basis.transpose()));
      int msize = static_cast<int>(desc.basis.cols());
      PmfTable t;
      t.n = desc.n;
      uint32_t total = 1u << desc.n;
      t.logmass.assign(total, -std::numeric_limits<double>::infinity());
      t.raw_sign.assign(total, 0);
      for (uint32_t mask = 0; mask < total; ++mask) {
        if (__builtin_popcount(mask) != msize) continue;
        LogDet ld = det_minor(k, sample_from_mask(mask, desc.n));
        if (ld.is_zero()) continue;
        t.logmass[mask] = ld.log_abs;
        t.raw_sign[mask] = ld.sign;
      }
      detail::finalize_table(t);
      return t;
    }
    case ProcessTag::FixedSizeLEnsemble:
    case ProcessTag::PPDPPFixed:
      return enumerate_pmf(*desc.nnp, desc.m);
    case ProcessTag::PPDPPVarying:
      return enumerate_pmf(*desc.nnp);
  }
  throw ValidationError("enumerate_descriptor: unknown tag");
}

// total variation as the plain sum of absolute differences
inline double tv_distance(const PmfTable& a, const PmfTable& b) {
  if (a.n != b.n) throw ValidationError("tv_distance: mismatched ground sets");
  double acc = 0.0;
  for (uint32_t mask = 0; mask < a.logmass.size(); ++mask)
    acc += std::abs(a.prob(mask) - b.prob(mask));
  return acc;
}

inline double tv_distance(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) throw ValidationError("tv_distance: mismatched supports");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) acc += std::abs(a(i) - b(i));
  return acc;
}

// P(A subset of X) summed over the table
inline double inclusion_prob(const PmfTable& t, uint32_t amask) {
  double acc = 0.0;
  for (uint32_t mask = 0; mask < t.logmass.size(); ++mask)
    if ((mask & amask) == amask) acc += t.prob(mask);
  return acc;
}

// distribution of |X| implied by the table
inline Vector size_distribution(const PmfTable& t) {
  Vector probs = Vector::Zero(t.n + 1);
  for (uint32_t mask = 0; mask < t.logmass.size(); ++mask)
    probs(__builtin_popcount(mask)) += t.prob(mask);
  return probs;
}

// empirical table from repeated draws of a subset sampler
template <typename Sampler>
PmfTable empirical_pmf(int n, long draws, Sampler&& sampler) {
  detail::check_enum_size(n);
  if (draws <= 0) throw ValidationError("empirical_pmf: draws must be positive");
  std::vector<long> counts(1u << n, 0);
  for (long i = 0; i < draws; ++i) {
    Sample x = sampler();
    ++counts[mask_from_sample(x)];
  }
  PmfTable t;
  t.n = n;
  t.logmass.assign(counts.size(), -std::numeric_limits<double>::infinity());
  t.raw_sign.assign(counts.size(), 0);
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    t.logmass[i] = std::log(static_cast<double>(counts[i]));
    t.raw_sign[i] = 1;
  }
  t.log_normalizer = std::log(static_cast<double>(draws));
  return t;
}

// undirected weighted graph with its combinatorial Laplacian
struct Graph {
  int n = 0;
  std::vector<std::tuple<int, int, double>> edges;
  std::vector<std::vector<std::pair<int, double>>> adj;
  Vector strength;  // total incident weight per vertex

  Graph() = default;
  Graph(int nverts, std::vector<std::tuple<int, int, double>> es)
      : n(nverts), edges(std::move(es)) {
    if (n <= 0) throw ValidationError("graph: need at least one vertex");
    adj.assign(n, {});
    strength = Vector::Zero(n);
    for (auto& [u, v, w] : edges) {
      if (u < 0 || v < 0 || u >= n || v >= n)
        throw ValidationError("graph: edge endpoint out of range");
      if (u == v) throw ValidationError("graph: self loops not allowed");
      if (!(w > 0.0)) throw ValidationError("graph: edge weights must be positive");
      adj[u].emplace_back(v, w);
      adj[v].emplace_back(u, w);
      strength(u) += w;
      strength(v) += w;
    }
  }

  SymMatrix laplacian() const {
    Matrix l = Matrix::Zero(n, n);
    for (auto& [u, v, w] : edges) {
      l(u, u) += w;
      l(v, v) += w;
      l(u, v) -= w;
      l(v, u) -= w;
    }
    return SymMatrix(l);
  }
};

// parses "u v weight" lines; '#' starts a comment, blank lines are skipped
inline Graph read_edge_list(std::istream& in) {
  std::vector<std::tuple<int, int, double>> edges;
  int maxv = -1;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    int u, v;
    double w;
    if (!(ls >> u)) continue;  // blank or comment-only line
    if (!(ls >> v >> w)) throw ValidationError("edge list: expected 'u v weight'");
    std::string rest;
    if (ls >> rest) throw ValidationError("edge list: trailing tokens on a line");
    edges.emplace_back(u, v, w);
    maxv = std::max(maxv, std::max(u, v));
  }
  if (edges.empty()) throw ValidationError("edge list: no edges");
  return Graph(maxv + 1, std::move(edges));
}

// marginal kernel of the root set: q (q I + Laplacian)^{-1}
inline SymMatrix forest_root_kernel(const Graph& g, double q) {
  if (!(q > 0.0)) throw ValidationError("forest_root_kernel: q must be positive");
  Matrix shifted = g.laplacian().mat();
  shifted.diagonal().array() += q;
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success)
    throw NumericalError("forest_root_kernel: shifted Laplacian not positive definite");
  Matrix k = q * llt.solve(Matrix::Identity(g.n, g.n));
  return SymMatrix(k);
}

// root set of a random spanning forest: loop-erased walks absorbed at an
// external node with rate q
inline Sample wilson_forest_roots(const Graph& g, double q, RngState& rng) {
  if (!(q > 0.0)) throw ValidationError("wilson_forest_roots: q must be positive");
  constexpr int kAbsorb = -1;
  std::vector<int> next(g.n, -2);
  std::vector<char> in_tree(g.n, 0);
  for (int start = 0; start < g.n; ++start) {
    int u = start;
    while (!in_tree[u]) {
      double total = q + g.strength(u);
      double r = rng.uniform() * total;
      if (r < q) {
        next[u] = kAbsorb;
        break;
      }
      r -= q;
      int chosen = g.adj[u].back().first;
      for (auto& [v, w] : g.adj[u]) {
        if (r < w) {
          chosen = v;
          break;
        }
        r -= w;
      }
      next[u] = chosen;
      u = chosen;
    }
    u = start;
    while (!in_tree[u]) {
      in_tree[u] = 1;
      if (next[u] == kAbsorb) break;
      u = next[u];
    }
  }
  Sample roots;
  for (int v = 0; v < g.n; ++v)
    if (in_tree[v] && next[v] == kAbsorb) roots.push_back(v);
  return roots;
}

}  // namespace dpp

#endif
