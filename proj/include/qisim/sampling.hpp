#pragma once

// Photon-number samplers for the correlated sources and the thermal bath.
//
// All samplers are templates over a UniformRandomBitGenerator and are pure
// functions of the stream they are handed: identical stream state gives an
// identical draw.

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

#include "qisim/errors.hpp"
#include "qisim/random.hpp"

namespace qisim {

using Count = std::int64_t;

enum class SourceKind { TwinBeam, SplitThermal };

std::string_view to_string(SourceKind kind);
SourceKind source_kind_from_string(std::string_view name);

struct SourceParams {
  double mu = 0.075;          // mean photons per mode (per arm)
  Count modes_m = 90000;      // spatiotemporal modes per pixel
  SourceKind kind = SourceKind::TwinBeam;

  void validate() const;
};

// Thermal bath seen by the probe arm, already in the detected-photon domain.
struct BackgroundParams {
  Count modes_mb = 1300;
  double mean_nb = 0.0;  // detected background photons per pixel

  double mean_per_mode() const { return mean_nb / static_cast<double>(modes_mb); }
  void validate() const;
};

struct ModePairSample {
  Count n1 = 0;
  Count n2 = 0;
};

namespace detail {

// log(k!) without touching the global signgam that lgamma writes.
double log_factorial(Count k);

// Hörmann's transformed rejection with squeeze (PTRS), valid for mean >= 10.
template <class Urbg>
Count poisson_ptrs(Urbg& rng, double mean) {
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);

  for (;;) {
    const double u = uniform01(rng) - 0.5;
    const double v = uniform01(rng);
    const double us = 0.5 - std::fabs(u);
    const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<Count>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    const auto k = static_cast<Count>(kf);
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        -mean + kf * loglam - log_factorial(k)) {
      return k;
    }
  }
}

// Product-of-uniforms method for small means.
template <class Urbg>
Count poisson_multiplication(Urbg& rng, double mean) {
  const double limit = std::exp(-mean);
  Count k = 0;
  double prod = uniform01(rng);
  while (prod > limit) {
    ++k;
    prod *= uniform01(rng);
  }
  return k;
}

}  // namespace detail

/// Poisson(mean) draw. Cost is O(1) in the mean.
template <class Urbg>
Count sample_poisson(Urbg& rng, double mean) {
  require(mean >= 0.0 && std::isfinite(mean), "poisson mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  if (mean < 10.0) return detail::poisson_multiplication(rng, mean);
  return detail::poisson_ptrs(rng, mean);
}

/// Single-mode Bose-Einstein draw: P(n) = mu^n / (1+mu)^(n+1).
template <class Urbg>
Count sample_thermal(double mu, Urbg& rng) {
  require(mu >= 0.0 && std::isfinite(mu), "thermal mean must be finite and >= 0");
  if (mu == 0.0) return 0;
  std::geometric_distribution<Count> geom(1.0 / (1.0 + mu));
  return geom(rng);
}

/// Intensity of a multithermal field of m modes with mean mu per mode,
/// i.e. the Gamma(m, mu) mixing variable of the negative binomial.
template <class Urbg>
double sample_multithermal_intensity(double mu, Count m, Urbg& rng) {
  require(mu >= 0.0 && std::isfinite(mu), "mode mean must be finite and >= 0");
  require(m >= 1, "mode count must be >= 1");
  if (mu == 0.0) return 0.0;
  std::gamma_distribution<double> gamma(static_cast<double>(m), mu);
  return gamma(rng);
}

/// Sum of m independent Bose-Einstein(mu) modes (negative binomial with m
/// failures and success probability mu/(1+mu)), drawn as a gamma-mixed
/// Poisson so the cost does not grow with m.
template <class Urbg>
Count sample_mode_sum(double mu, Count m, Urbg& rng) {
  const double intensity = sample_multithermal_intensity(mu, m, rng);
  return sample_poisson(rng, intensity);
}

/// Reference O(m) construction of the same law as sample_mode_sum.
template <class Urbg>
Count sample_mode_sum_per_mode(double mu, Count m, Urbg& rng) {
  require(m >= 1, "mode count must be >= 1");
  Count total = 0;
  for (Count i = 0; i < m; ++i) total += sample_thermal(mu, rng);
  return total;
}

/// Photon numbers of the two beams before any loss, summed over modes_m.
template <class Urbg>
ModePairSample sample_pair_pre_detection(const SourceParams& src, Urbg& rng) {
  src.validate();
  if (src.kind == SourceKind::TwinBeam) {
    const Count n = sample_mode_sum(src.mu, src.modes_m, rng);
    return {n, n};
  }
  // One thermal beam with 2*mu per mode, split 50:50.
  const Count total = sample_mode_sum(2.0 * src.mu, src.modes_m, rng);
  std::binomial_distribution<Count> split(total, 0.5);
  const Count n1 = split(rng);
  return {n1, total - n1};
}

template <class Urbg>
Count sample_background(const BackgroundParams& bg, Urbg& rng) {
  bg.validate();
  if (bg.mean_nb == 0.0) return 0;
  return sample_mode_sum(bg.mean_per_mode(), bg.modes_mb, rng);
}

}  // namespace qisim
