#pragma once

// Empirical figures of merit computed from synthesized (or measured) frames.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qisim/detection.hpp"
#include "qisim/kernels.hpp"
#include "qisim/random.hpp"

namespace qisim {

struct EstimateWithError {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
};

struct CovariancePair {
  double delta_in = 0.0;
  double delta_out = 0.0;
};

// Pooled sample moments over every pixel pair of a set of frames
// (unbiased variances and covariance).
struct PooledMoments {
  std::int64_t n = 0;
  double mean1 = 0.0;
  double mean2 = 0.0;
  double var1 = 0.0;
  double var2 = 0.0;
  double cov = 0.0;
};

PooledMoments pooled_moments(const FrameStats& totals);
FrameStats total(std::span<const FrameStats> frames);

/// Plain in-frame covariance E[N1 N2] - E[N1] E[N2] over the K pixel pairs.
/// Its mean is (1 - 1/K) times the true covariance.
double covariance(const Frame& frame);
double covariance(const FrameStats& stats);
std::vector<double> frame_covariances(std::span<const FrameStats> frames);

// Noise reduction factor <d^2(N1-N2)> / <N1+N2>, pooled over all pixels;
// std_error from a delete-one-frame jackknife.
EstimateWithError nrf(std::span<const FrameStats> frames);
EstimateWithError nrf(std::span<const Frame> frames);

// Generalized Cauchy-Schwarz parameter from raw detected moments. Throws
// DegenerateInput when a normally-ordered variance estimate is <= 0.
EstimateWithError cauchy_schwarz_epsilon(std::span<const FrameStats> frames);
EstimateWithError cauchy_schwarz_epsilon(std::span<const Frame> frames);

// Any statistic of the pooled totals, with a delete-one-frame jackknife
// std_error (NaN if a replicate is degenerate).
EstimateWithError jackknife_estimate(std::span<const FrameStats> frames,
                                     const std::function<double(const FrameStats&)>& stat);

EstimateWithError mean_with_error(std::span<const double> samples);

/// |mean(in) - mean(out)| / sqrt(var(in) + var(out)) over per-image covariance
/// samples. The std_error is the first-order (delta-method) propagation of
/// the uncertainty of the means and of the variances.
EstimateWithError empirical_snr(std::span<const double> deltas_in,
                                std::span<const double> deltas_out);

struct ErrorProbability {
  double threshold = 0.0;
  double p_err = 0.5;
  double resolution = 0.0;  // 1 / n_trials
  std::size_t n_trials = 0;
};

inline constexpr std::size_t kThresholdCandidates = 512;

/// Decides "target present" when the mean of n_img per-image covariances
/// exceeds a threshold. The threshold is scanned over kThresholdCandidates
/// equally spaced values spanning the pooled group means and the one with the
/// smallest equal-prior error is kept (lowest threshold on ties). The sample
/// order is shuffled with `rng` before grouping.
ErrorProbability error_probability(std::span<const double> deltas_in,
                                   std::span<const double> deltas_out, std::size_t n_img,
                                   std::size_t n_trials, CounterRng& rng);

}  // namespace qisim
