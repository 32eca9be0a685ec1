#pragma once

// Closed-form predictions for every estimator.
//
// Fourth-order statistics are built from joint factorial cumulants of the
// detected pair (N1, N2). Factorial cumulants add over independent modes and
// pick up a factor eta1^i eta2^j under binomial loss, so the multimode,
// lossy, background-affected law is assembled mechanically from one mode's
// generating function. Ordinary cumulants follow through Stirling numbers of
// the second kind.

#include <array>
#include <cstddef>

#include "qisim/detection.hpp"
#include "qisim/sampling.hpp"

namespace qisim {

// Truncated bivariate power series sum c[i][j] t1^i t2^j with i, j <= Order.
template <std::size_t Order>
class BivariateSeries {
 public:
  static constexpr std::size_t kSize = Order + 1;

  long double& at(std::size_t i, std::size_t j) { return c_[i][j]; }
  long double at(std::size_t i, std::size_t j) const { return c_[i][j]; }

  BivariateSeries& operator+=(const BivariateSeries& o) {
    for (std::size_t i = 0; i < kSize; ++i)
      for (std::size_t j = 0; j < kSize; ++j) c_[i][j] += o.c_[i][j];
    return *this;
  }

  BivariateSeries& operator*=(long double s) {
    for (auto& row : c_)
      for (auto& v : row) v *= s;
    return *this;
  }

  friend BivariateSeries operator*(const BivariateSeries& a, const BivariateSeries& b) {
    BivariateSeries r;
    for (std::size_t i = 0; i < kSize; ++i)
      for (std::size_t j = 0; j < kSize; ++j)
        for (std::size_t p = 0; p <= i; ++p)
          for (std::size_t q = 0; q <= j; ++q) r.c_[i][j] += a.c_[p][q] * b.c_[i - p][j - q];
    return r;
  }

  // -log(1 - f) for f without constant term: sum_{n>=1} f^n / n.
  friend BivariateSeries neg_log_one_minus(const BivariateSeries& f) {
    BivariateSeries result;
    BivariateSeries power = f;
    for (std::size_t n = 1; n <= 2 * Order; ++n) {
      BivariateSeries term = power;
      term *= 1.0L / static_cast<long double>(n);
      result += term;
      power = power * f;
    }
    return result;
  }

 private:
  std::array<std::array<long double, kSize>, kSize> c_{};
};

// Ordinary joint cumulants kappa[a][b] of (N1, N2) for a, b <= 2.
struct JointCumulants {
  std::array<std::array<double, 3>, 3> kappa{};

  double mean1() const { return kappa[1][0]; }
  double mean2() const { return kappa[0][1]; }
  double var1() const { return kappa[2][0]; }
  double var2() const { return kappa[0][2]; }
  double cov() const { return kappa[1][1]; }
  // <d^2(dN1 dN2)> = kappa22 + kappa20 kappa02 + kappa11^2
  double product_fluctuation() const {
    return kappa[2][2] + kappa[2][0] * kappa[0][2] + kappa[1][1] * kappa[1][1];
  }
};

struct MomentSet {
  double mean1 = 0.0;
  double mean2 = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;
  double cov = 0.0;
  double cov_noise = 0.0;  // <d^2(dN1 dN2)>
};

// Joint factorial cumulants (coefficient form) of the detected pair.
BivariateSeries<2> factorial_cumulant_series(const SourceParams& src,
                                             const DetectionParams& det,
                                             const BackgroundParams& bg);

JointCumulants joint_cumulants(const SourceParams& src, const DetectionParams& det,
                               const BackgroundParams& bg);

// Moments of the detected pair for the hypothesis in det.target_present.
MomentSet detected_moments(const SourceParams& src, const DetectionParams& det,
                           const BackgroundParams& bg);

// Twin-beam NRF without background, closed form in the efficiencies.
double sigma0_formula(double eta1, double eta2, double mu);

double nrf_theory(const SourceParams& src, const DetectionParams& det,
                  const BackgroundParams& bg);

double epsilon_theory(const SourceParams& src, const DetectionParams& det,
                      const BackgroundParams& bg);

/// Variance of the in-frame covariance estimator over k pixel pairs,
/// <d^2(dN1 dN2)> / k, for the hypothesis in det.target_present.
double covariance_noise_exact(const SourceParams& src, const DetectionParams& det,
                              const BackgroundParams& bg, std::size_t k);

/// Per-image SNR: (1 - 1/k) * (cov_in - cov_out) over the square root of the
/// summed in/out covariance-estimator variances.
double snr_theory(const SourceParams& src, const DetectionParams& det,
                  const BackgroundParams& bg, std::size_t k);

/// Dominant-background approximation of snr_theory, cov / sqrt(2 var1 var_b / k).
double snr_dominant_bg(const SourceParams& src, const DetectionParams& det,
                       const BackgroundParams& bg, std::size_t k);

// Quantum-over-classical SNR enhancement from the source epsilons.
double enhancement_r(const SourceParams& src_qi, const SourceParams& src_ci,
                     const DetectionParams& det, const BackgroundParams& bg);

/// Minimal equal-prior error of the rule "x > t => present" between
/// N(mean_in, sd_in^2) and N(mean_out, sd_out^2), optimized over t.
double two_gaussian_error(double mean_in, double sd_in, double mean_out, double sd_out);

double perr_gaussian(const SourceParams& src, const DetectionParams& det,
                     const BackgroundParams& bg, std::size_t n_img, std::size_t k);

}  // namespace qisim
