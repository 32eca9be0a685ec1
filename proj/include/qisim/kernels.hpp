#pragma once

// Frame synthesis kernels used by the sweeps.
//
// A sweep never keeps the frames themselves, only their exact integer
// sufficient statistics. Each frame draws from its own counter stream keyed
// by (master seed, grid point, source, hypothesis, frame index), so the
// serial and OpenMP kernels produce bit-identical output.

#include <cstdint>
#include <span>
#include <vector>

#include "qisim/detection.hpp"
#include "qisim/random.hpp"

namespace qisim {

// Per-frame sums over the K pixel pairs. All sums are exact.
struct FrameStats {
  std::int64_t k = 0;
  std::int64_t s1 = 0;
  std::int64_t s2 = 0;
  std::int64_t s11 = 0;
  std::int64_t s22 = 0;
  std::int64_t s12 = 0;

  void add(Count n1, Count n2) {
    ++k;
    s1 += n1;
    s2 += n2;
    s11 += n1 * n1;
    s22 += n2 * n2;
    s12 += n1 * n2;
  }

  FrameStats& operator+=(const FrameStats& o) {
    k += o.k;
    s1 += o.s1;
    s2 += o.s2;
    s11 += o.s11;
    s22 += o.s22;
    s12 += o.s12;
    return *this;
  }
  FrameStats& operator-=(const FrameStats& o) {
    k -= o.k;
    s1 -= o.s1;
    s2 -= o.s2;
    s11 -= o.s11;
    s22 -= o.s22;
    s12 -= o.s12;
    return *this;
  }

  friend bool operator==(const FrameStats&, const FrameStats&) = default;
};

FrameStats summarize(const Frame& frame);

enum class Hypothesis : std::uint64_t { TargetPresent = 0, TargetAbsent = 1 };

// Everything needed to synthesize frame i of one (grid point, source,
// hypothesis) cell.
struct FrameSetup {
  SourceParams src;
  DetectionParams det;  // det.target_present is overridden by `hypothesis`
  BackgroundParams bg;
  std::size_t n_pix = 80;
  std::uint64_t master_seed = 1;
  std::uint64_t grid_index = 0;
  Hypothesis hypothesis = Hypothesis::TargetPresent;

  void validate() const;
  DetectionParams effective_detection() const;
  std::uint64_t frame_key(std::uint64_t frame_index) const;
};

/// Draws the detected pair (N1, N2) of one pixel. Instead of thinning photon
/// by photon, it samples the multithermal intensity once and splits the
/// conditional Poisson process into independent detected components, which
/// has the same joint law as the literal source -> loss -> background chain.
class FusedPixelSampler {
 public:
  explicit FusedPixelSampler(const FrameSetup& setup);

  template <class Urbg>
  ModePairSample operator()(Urbg& rng) {
    const double intensity = has_source_ ? source_intensity_(rng) : 0.0;
    Count n1 = 0;
    Count n2 = 0;
    if (kind_ == SourceKind::TwinBeam) {
      if (present_) {
        const Count both = sample_poisson(rng, intensity * both_);
        n1 = both + sample_poisson(rng, intensity * only_one_);
        n2 = both + sample_poisson(rng, intensity * only_two_);
      } else {
        n1 = sample_poisson(rng, intensity * only_one_);
      }
    } else {
      n1 = sample_poisson(rng, intensity * only_one_);
      if (present_) n2 = sample_poisson(rng, intensity * only_two_);
    }
    if (has_bath_) n2 += sample_poisson(rng, bath_intensity_(rng));
    return {n1, n2};
  }

 private:
  SourceKind kind_;
  bool present_;
  bool has_source_;
  std::gamma_distribution<double> source_intensity_;
  std::gamma_distribution<double> bath_intensity_;
  bool has_bath_;
  // Fractions of the source intensity feeding each Poisson component.
  double both_ = 0.0;      // TWB: photon pair detected on both arms
  double only_one_ = 0.0;  // TWB: only arm 1; split thermal: arm 1
  double only_two_ = 0.0;  // TWB: only arm 2; split thermal: arm 2
};

FrameStats simulate_frame_stats(const FrameSetup& setup, std::uint64_t frame_index);

// Literal-composition frame on the same child stream (used for dumps and
// cross-checks; slower than the fused kernel).
Frame simulate_frame(const FrameSetup& setup, std::uint64_t frame_index);

// Reference implementation: frames [first, first + count) in order.
std::vector<FrameStats> simulate_batch_serial(const FrameSetup& setup, std::uint64_t first,
                                              std::size_t count);

// OpenMP version of simulate_batch_serial; output is identical.
std::vector<FrameStats> simulate_batch_parallel(const FrameSetup& setup, std::uint64_t first,
                                                std::size_t count);

// Number of engine invocations needed for one fused frame. Used to check
// that cost does not scale with the mode count.
std::uint64_t count_engine_calls(const FrameSetup& setup, std::uint64_t frame_index);

}  // namespace qisim
