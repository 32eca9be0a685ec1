#include "qisim/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qisim {

namespace {

using Wide = __int128;

// n * sum(xy) - sum(x) * sum(y), exact.
Wide centered_cross(std::int64_t n, std::int64_t sx, std::int64_t sy, std::int64_t sxy) {
  return static_cast<Wide>(n) * sxy - static_cast<Wide>(sx) * sy;
}

long double to_ld(Wide v) { return static_cast<long double>(v); }

std::vector<FrameStats> summarize_all(std::span<const Frame> frames) {
  std::vector<FrameStats> out;
  out.reserve(frames.size());
  for (const Frame& f : frames) out.push_back(summarize(f));
  return out;
}

double nrf_of(const FrameStats& t) {
  const PooledMoments m = pooled_moments(t);
  const double denom = m.mean1 + m.mean2;
  if (!(denom > 0.0)) throw DegenerateInput("NRF undefined: no detected photons");
  return (m.var1 + m.var2 - 2.0 * m.cov) / denom;
}

double epsilon_of(const FrameStats& t) {
  const PooledMoments m = pooled_moments(t);
  const double normal1 = m.var1 - m.mean1;
  const double normal2 = m.var2 - m.mean2;
  if (!(normal1 > 0.0) || !(normal2 > 0.0)) {
    throw DegenerateInput("epsilon undefined: normally-ordered variance estimate <= 0");
  }
  return m.cov / std::sqrt(normal1 * normal2);
}

// Statistic on the pooled totals plus a delete-one-frame jackknife error.
template <class Statistic>
EstimateWithError jackknife(std::span<const FrameStats> frames, Statistic stat) {
  if (frames.size() < 2) throw InsufficientData("need at least 2 frames");
  const FrameStats all = total(frames);
  EstimateWithError est;
  est.value = stat(all);
  est.n_samples = static_cast<std::size_t>(all.k);

  const std::size_t f = frames.size();
  std::vector<double> replicates(f);
  try {
    for (std::size_t i = 0; i < f; ++i) {
      FrameStats loo = all;
      loo -= frames[i];
      replicates[i] = stat(loo);
    }
  } catch (const DegenerateInput&) {
    est.std_error = std::numeric_limits<double>::quiet_NaN();
    return est;
  }
  const long double mean =
      std::accumulate(replicates.begin(), replicates.end(), 0.0L) / static_cast<long double>(f);
  long double ss = 0.0L;
  for (double r : replicates) ss += (r - mean) * (r - mean);
  est.std_error = static_cast<double>(
      std::sqrt(ss * static_cast<long double>(f - 1) / static_cast<long double>(f)));
  return est;
}

double sample_mean(std::span<const double> x) {
  return static_cast<double>(std::accumulate(x.begin(), x.end(), 0.0L) /
                             static_cast<long double>(x.size()));
}

double sample_variance(std::span<const double> x, double mean) {
  long double ss = 0.0L;
  for (double v : x) ss += (v - mean) * (v - mean);
  return static_cast<double>(ss / static_cast<long double>(x.size() - 1));
}

}  // namespace

FrameStats total(std::span<const FrameStats> frames) {
  FrameStats t;
  for (const FrameStats& f : frames) t += f;
  return t;
}

PooledMoments pooled_moments(const FrameStats& t) {
  if (t.k < 2) throw InsufficientData("need at least 2 pixel pairs");
  PooledMoments m;
  m.n = t.k;
  const long double n = static_cast<long double>(t.k);
  const long double norm = n * (n - 1.0L);
  m.mean1 = static_cast<double>(t.s1 / n);
  m.mean2 = static_cast<double>(t.s2 / n);
  m.var1 = static_cast<double>(to_ld(centered_cross(t.k, t.s1, t.s1, t.s11)) / norm);
  m.var2 = static_cast<double>(to_ld(centered_cross(t.k, t.s2, t.s2, t.s22)) / norm);
  m.cov = static_cast<double>(to_ld(centered_cross(t.k, t.s1, t.s2, t.s12)) / norm);
  return m;
}

double covariance(const FrameStats& stats) {
  if (stats.k < 2) throw InsufficientData("covariance needs at least 2 pixel pairs");
  const long double k = static_cast<long double>(stats.k);
  return static_cast<double>(to_ld(centered_cross(stats.k, stats.s1, stats.s2, stats.s12)) /
                             (k * k));
}

double covariance(const Frame& frame) { return covariance(summarize(frame)); }

std::vector<double> frame_covariances(std::span<const FrameStats> frames) {
  std::vector<double> out(frames.size());
  std::transform(frames.begin(), frames.end(), out.begin(),
                 [](const FrameStats& f) { return covariance(f); });
  return out;
}

EstimateWithError jackknife_estimate(std::span<const FrameStats> frames,
                                     const std::function<double(const FrameStats&)>& stat) {
  return jackknife(frames, stat);
}

EstimateWithError nrf(std::span<const FrameStats> frames) { return jackknife(frames, nrf_of); }

EstimateWithError nrf(std::span<const Frame> frames) {
  const auto stats = summarize_all(frames);
  return nrf(std::span<const FrameStats>(stats));
}

EstimateWithError cauchy_schwarz_epsilon(std::span<const FrameStats> frames) {
  if (frames.size() < 2) throw InsufficientData("need at least 2 frames");
  // Surface an undefined point estimate as an error instead of a NaN.
  epsilon_of(total(frames));
  return jackknife(frames, epsilon_of);
}

EstimateWithError cauchy_schwarz_epsilon(std::span<const Frame> frames) {
  const auto stats = summarize_all(frames);
  return cauchy_schwarz_epsilon(std::span<const FrameStats>(stats));
}

EstimateWithError mean_with_error(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientData("need at least 2 samples");
  const double m = sample_mean(samples);
  const double v = sample_variance(samples, m);
  return {m, std::sqrt(v / static_cast<double>(samples.size())), samples.size()};
}

EstimateWithError empirical_snr(std::span<const double> deltas_in,
                                std::span<const double> deltas_out) {
  if (deltas_in.size() < 2 || deltas_out.size() < 2) {
    throw InsufficientData("SNR needs at least 2 samples per hypothesis");
  }
  const double n_in = static_cast<double>(deltas_in.size());
  const double n_out = static_cast<double>(deltas_out.size());
  const double m_in = sample_mean(deltas_in);
  const double m_out = sample_mean(deltas_out);
  const double v_in = sample_variance(deltas_in, m_in);
  const double v_out = sample_variance(deltas_out, m_out);
  const double gap = std::fabs(m_in - m_out);
  const double s2 = v_in + v_out;

  EstimateWithError est;
  est.n_samples = deltas_in.size() + deltas_out.size();
  if (s2 == 0.0) {
    if (gap == 0.0) return est;
    throw DegenerateInput("SNR undefined: nonzero contrast with zero fluctuation");
  }
  est.value = gap / std::sqrt(s2);
  const double var_gap = v_in / n_in + v_out / n_out;
  const double var_s2 = 2.0 * v_in * v_in / (n_in - 1.0) + 2.0 * v_out * v_out / (n_out - 1.0);
  est.std_error = std::sqrt(var_gap / s2 + gap * gap * var_s2 / (4.0 * s2 * s2 * s2));
  return est;
}

ErrorProbability error_probability(std::span<const double> deltas_in,
                                   std::span<const double> deltas_out, std::size_t n_img,
                                   std::size_t n_trials, CounterRng& rng) {
  require(n_img >= 1, "n_img must be >= 1");
  require(n_trials >= 1, "n_trials must be >= 1");
  const std::size_t needed = n_img * n_trials;
  if (deltas_in.size() < needed || deltas_out.size() < needed) {
    throw InsufficientData("not enough per-image covariances for the requested trial groups");
  }

  auto group_means = [&](std::span<const double> samples) {
    std::vector<double> pool(samples.begin(), samples.end());
    std::shuffle(pool.begin(), pool.end(), rng);
    std::vector<double> means(n_trials);
    for (std::size_t g = 0; g < n_trials; ++g) {
      long double acc = 0.0L;
      for (std::size_t j = 0; j < n_img; ++j) acc += pool[g * n_img + j];
      means[g] = static_cast<double>(acc / static_cast<long double>(n_img));
    }
    std::sort(means.begin(), means.end());
    return means;
  };
  const std::vector<double> in = group_means(deltas_in);
  const std::vector<double> out = group_means(deltas_out);

  const double lo = std::min(in.front(), out.front());
  const double hi = std::max(in.back(), out.back());
  const double trials = static_cast<double>(n_trials);

  ErrorProbability best;
  best.n_trials = n_trials;
  best.resolution = 1.0 / trials;
  best.p_err = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < kThresholdCandidates; ++j) {
    const double t =
        lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(kThresholdCandidates - 1);
    // "present" iff mean > t
    const auto misses = std::upper_bound(in.begin(), in.end(), t) - in.begin();
    const auto false_alarms = out.end() - std::upper_bound(out.begin(), out.end(), t);
    const double p = 0.5 * (static_cast<double>(misses) + static_cast<double>(false_alarms)) / trials;
    if (p < best.p_err) {
      best.p_err = p;
      best.threshold = t;
    }
  }
  return best;
}

}  // namespace qisim
