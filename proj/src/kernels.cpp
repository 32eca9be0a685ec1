#include "qisim/kernels.hpp"

namespace qisim {

FrameStats summarize(const Frame& frame) {
  require(frame.n1.size() == frame.n2.size(), "frame arms differ in length");
  FrameStats stats;
  for (std::size_t p = 0; p < frame.size(); ++p) stats.add(frame.n1[p], frame.n2[p]);
  return stats;
}

void FrameSetup::validate() const {
  src.validate();
  det.validate();
  bg.validate();
  require(n_pix >= 2, "a frame needs at least 2 pixel pairs");
}

DetectionParams FrameSetup::effective_detection() const {
  DetectionParams eff = det;
  eff.target_present = hypothesis == Hypothesis::TargetPresent;
  return eff;
}

std::uint64_t FrameSetup::frame_key(std::uint64_t frame_index) const {
  return derive_key(master_seed, {grid_index, static_cast<std::uint64_t>(src.kind),
                                  static_cast<std::uint64_t>(hypothesis), frame_index});
}

FusedPixelSampler::FusedPixelSampler(const FrameSetup& setup)
    : kind_(setup.src.kind),
      present_(setup.hypothesis == Hypothesis::TargetPresent),
      has_source_(setup.src.mu > 0.0),
      has_bath_(setup.bg.mean_nb > 0.0) {
  const double eta1 = setup.det.eta1;
  const double eta2 = setup.det.eta2;
  const double mode_mean =
      kind_ == SourceKind::TwinBeam ? setup.src.mu : 2.0 * setup.src.mu;
  if (has_source_) {
    source_intensity_ = std::gamma_distribution<double>(
        static_cast<double>(setup.src.modes_m), mode_mean);
  }
  if (has_bath_) {
    bath_intensity_ = std::gamma_distribution<double>(
        static_cast<double>(setup.bg.modes_mb), setup.bg.mean_per_mode());
  }
  if (kind_ == SourceKind::TwinBeam) {
    if (present_) {
      both_ = eta1 * eta2;
      only_one_ = eta1 * (1.0 - eta2);
      only_two_ = (1.0 - eta1) * eta2;
    } else {
      only_one_ = eta1;
    }
  } else {
    only_one_ = 0.5 * eta1;
    only_two_ = 0.5 * eta2;
  }
}

FrameStats simulate_frame_stats(const FrameSetup& setup, std::uint64_t frame_index) {
  CounterRng rng(setup.frame_key(frame_index));
  FusedPixelSampler pixel(setup);
  FrameStats stats;
  for (std::size_t p = 0; p < setup.n_pix; ++p) {
    const ModePairSample s = pixel(rng);
    stats.add(s.n1, s.n2);
  }
  return stats;
}

Frame simulate_frame(const FrameSetup& setup, std::uint64_t frame_index) {
  setup.validate();
  CounterRng rng(setup.frame_key(frame_index));
  Frame frame = synthesize_frame(setup.src, setup.effective_detection(), setup.bg,
                                 setup.n_pix, rng);
  frame.meta.stream_key = rng.key();
  return frame;
}

std::vector<FrameStats> simulate_batch_serial(const FrameSetup& setup, std::uint64_t first,
                                              std::size_t count) {
  setup.validate();
  std::vector<FrameStats> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = simulate_frame_stats(setup, first + i);
  return out;
}

std::vector<FrameStats> simulate_batch_parallel(const FrameSetup& setup, std::uint64_t first,
                                                std::size_t count) {
  setup.validate();
  std::vector<FrameStats> out(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        simulate_frame_stats(setup, first + static_cast<std::uint64_t>(i));
  }
  return out;
}

namespace {

class CountingRng {
 public:
  using result_type = CounterRng::result_type;
  explicit CountingRng(std::uint64_t key) : inner_(key) {}
  static constexpr result_type min() { return CounterRng::min(); }
  static constexpr result_type max() { return CounterRng::max(); }
  result_type operator()() {
    ++calls_;
    return inner_();
  }
  std::uint64_t calls() const { return calls_; }

 private:
  CounterRng inner_;
  std::uint64_t calls_ = 0;
};

}  // namespace

std::uint64_t count_engine_calls(const FrameSetup& setup, std::uint64_t frame_index) {
  setup.validate();
  CountingRng rng(setup.frame_key(frame_index));
  FusedPixelSampler pixel(setup);
  for (std::size_t p = 0; p < setup.n_pix; ++p) pixel(rng);
  return rng.calls();
}

}  // namespace qisim
