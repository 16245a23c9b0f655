#ifndef DPP_COMMON_HPP
#define DPP_COMMON_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dpp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Bad inputs (dimension mismatches, rank failures, invalid kernels, infeasible
// sizes). Maps to CLI exit code 2.
class ValidationError : public std::runtime_error {
public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Failures of floating-point procedures on inputs that passed validation
// (eigensolver non-convergence, singular systems, negative residuals beyond
// tolerance). Maps to CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Sorted distinct indices into the ground set.
using Sample = std::vector<int>;

// Seeded generator with an explicit 53-bit uniform so that sample streams are
// identical across standard library implementations.
class RngState {
public:
  explicit RngState(std::uint64_t seed) : gen_(seed) {}

  // uniform in [0, 1)
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  std::uint64_t raw() { return gen_(); }

private:
  std::mt19937_64 gen_;
};

inline Sample sample_from_mask(std::uint32_t mask, int n) {
  Sample s;
  for (int i = 0; i < n; ++i)
    if (mask & (1u << i)) s.push_back(i);
  return s;
}

inline std::uint32_t mask_from_sample(const Sample& s) {
  std::uint32_t m = 0;
  for (int i : s) m |= (1u << i);
  return m;
}

}  // namespace dpp

#endif
