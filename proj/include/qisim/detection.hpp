#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "qisim/sampling.hpp"

namespace qisim {

// Overall efficiencies of the two arms. eta2 already contains the target
// reflectivity, so the half-reflecting object gives eta1 = 2 * eta2.
struct DetectionParams {
  double eta1 = 0.4;
  double eta2 = 0.2;
  bool target_present = true;

  void validate() const;
};

struct FrameMeta {
  SourceKind kind = SourceKind::TwinBeam;
  bool target_present = true;
  BackgroundParams background;
  std::uint64_t stream_key = 0;
};

// One image: detected counts of N_pix correlated pixel pairs.
struct Frame {
  std::vector<Count> n1;
  std::vector<Count> n2;
  FrameMeta meta;

  std::size_t size() const { return n1.size(); }
};

/// Binomial loss channel: each of the n photons survives with probability eta.
template <class Urbg>
Count detect(Count n, double eta, Urbg& rng) {
  require(eta >= 0.0 && eta <= 1.0, "efficiency must lie in [0, 1]");
  require(n >= 0, "photon count must be >= 0");
  if (eta == 1.0 || n == 0) return n;
  if (eta == 0.0) return 0;
  std::binomial_distribution<Count> channel(n, eta);
  return channel(rng);
}

/// Builds a frame by literal composition of the per-pixel steps:
/// source pair, binomial loss on each arm, target switch, background.
template <class Urbg>
Frame synthesize_frame(const SourceParams& src, const DetectionParams& det,
                       const BackgroundParams& bg, std::size_t n_pix, Urbg& rng) {
  src.validate();
  det.validate();
  bg.validate();
  require(n_pix >= 2, "a frame needs at least 2 pixel pairs");

  Frame frame;
  frame.n1.resize(n_pix);
  frame.n2.resize(n_pix);
  frame.meta = {src.kind, det.target_present, bg, 0};
  for (std::size_t p = 0; p < n_pix; ++p) {
    const ModePairSample pair = sample_pair_pre_detection(src, rng);
    frame.n1[p] = detect(pair.n1, det.eta1, rng);
    const Count reflected = det.target_present ? detect(pair.n2, det.eta2, rng) : 0;
    frame.n2[p] = reflected + sample_background(bg, rng);
  }
  return frame;
}

// CSV (pixel_index,n1,n2) plus a JSON sidecar at `<path>.json`.
void write_frame_csv(const Frame& frame, const SourceParams& src,
                     const DetectionParams& det, const std::filesystem::path& path);

}  // namespace qisim
