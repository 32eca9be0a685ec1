#pragma once

// Brute-force reference for the detected photon-number statistics.
//
// Builds the joint probability table of (N1, N2) by enumerating the photon
// numbers of each mode pair, thinning them binomially, and convolving the M
// independent mode tables (plus background modes). Moments are then summed
// directly over the table. Exponential in nothing, but quadratic in the
// lattice size, so only meant for a handful of modes at small mean.

#include <cstddef>
#include <vector>

#include "qisim/detection.hpp"
#include "qisim/sampling.hpp"

namespace qisim {

class JointPmf {
 public:
  JointPmf() = default;
  JointPmf(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), p_(rows * cols) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  long double& at(std::size_t a, std::size_t b) { return p_[a * cols_ + b]; }
  long double at(std::size_t a, std::size_t b) const { return p_[a * cols_ + b]; }
  long double total_mass() const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<long double> p_;
};

struct EnumerationOptions {
  // Per-mode thermal tail mass left out of the lattice. The fourth-moment
  // sums weight the tail by n^4, so this sits far below the target accuracy.
  long double tail_mass = 1e-24L;
};

struct EnumeratedMoments {
  long double mean1 = 0;
  long double mean2 = 0;
  long double var1 = 0;
  long double var2 = 0;
  long double cov = 0;
  long double product_fluctuation = 0;  // <(dN1 dN2)^2> - <dN1 dN2>^2
};

JointPmf enumerate_joint_pmf(const SourceParams& src, const DetectionParams& det,
                             const BackgroundParams& bg, const EnumerationOptions& opts = {});

EnumeratedMoments moments_from_pmf(const JointPmf& pmf);

EnumeratedMoments enumerate_moments(const SourceParams& src, const DetectionParams& det,
                                    const BackgroundParams& bg,
                                    const EnumerationOptions& opts = {});

}  // namespace qisim
