#include "qisim/enumeration.hpp"

#include <cmath>

namespace qisim {

namespace {

// Smallest n_max such that P(n > n_max) = q^(n_max+1) < tail for a
// Bose-Einstein law with ratio q = mean / (1 + mean).
std::size_t thermal_cutoff(long double mean, long double tail) {
  if (mean <= 0.0L) return 0;
  const long double q = mean / (1.0L + mean);
  std::size_t n = 0;
  long double mass = q;
  while (mass >= tail) {
    mass *= q;
    ++n;
  }
  return n;
}

std::vector<long double> thermal_pmf(long double mean, std::size_t n_max) {
  std::vector<long double> p(n_max + 1);
  const long double q = mean / (1.0L + mean);
  long double v = 1.0L / (1.0L + mean);
  for (std::size_t n = 0; n <= n_max; ++n) {
    p[n] = v;
    v *= q;
  }
  return p;
}

// binom[n][k] = C(n,k) eta^k (1-eta)^(n-k), n <= n_max.
std::vector<std::vector<long double>> binomial_table(long double eta, std::size_t n_max) {
  std::vector<std::vector<long double>> t(n_max + 1);
  t[0] = {1.0L};
  for (std::size_t n = 1; n <= n_max; ++n) {
    t[n].assign(n + 1, 0.0L);
    for (std::size_t k = 0; k < n; ++k) {
      t[n][k] += t[n - 1][k] * (1.0L - eta);
      t[n][k + 1] += t[n - 1][k] * eta;
    }
  }
  return t;
}

JointPmf single_mode_pair(const SourceParams& src, long double eta1, long double eta2,
                          long double tail) {
  const bool twin = src.kind == SourceKind::TwinBeam;
  const long double mean = twin ? src.mu : 2.0L * src.mu;
  const std::size_t n_max = thermal_cutoff(mean, tail);
  const auto pn = thermal_pmf(mean, n_max);
  const auto b1 = binomial_table(eta1, n_max);
  const auto b2 = binomial_table(eta2, n_max);

  JointPmf out(n_max + 1, n_max + 1);
  if (twin) {
    for (std::size_t n = 0; n <= n_max; ++n)
      for (std::size_t a = 0; a <= n; ++a)
        for (std::size_t b = 0; b <= n; ++b) out.at(a, b) += pn[n] * b1[n][a] * b2[n][b];
    return out;
  }
  const auto half = binomial_table(0.5L, n_max);
  for (std::size_t t = 0; t <= n_max; ++t)
    for (std::size_t m1 = 0; m1 <= t; ++m1) {
      const long double w = pn[t] * half[t][m1];
      const std::size_t m2 = t - m1;
      for (std::size_t a = 0; a <= m1; ++a)
        for (std::size_t b = 0; b <= m2; ++b) out.at(a, b) += w * b1[m1][a] * b2[m2][b];
    }
  return out;
}

JointPmf convolve(const JointPmf& x, const JointPmf& y) {
  JointPmf out(x.rows() + y.rows() - 1, x.cols() + y.cols() - 1);
  for (std::size_t a = 0; a < x.rows(); ++a)
    for (std::size_t b = 0; b < x.cols(); ++b) {
      const long double px = x.at(a, b);
      if (px == 0.0L) continue;
      for (std::size_t c = 0; c < y.rows(); ++c)
        for (std::size_t d = 0; d < y.cols(); ++d) out.at(a + c, b + d) += px * y.at(c, d);
    }
  return out;
}

}  // namespace

long double JointPmf::total_mass() const {
  long double s = 0.0L;
  for (long double v : p_) s += v;
  return s;
}

JointPmf enumerate_joint_pmf(const SourceParams& src, const DetectionParams& det,
                             const BackgroundParams& bg, const EnumerationOptions& opts) {
  src.validate();
  det.validate();
  bg.validate();
  const long double eta2 = det.target_present ? det.eta2 : 0.0;
  const JointPmf mode = single_mode_pair(src, det.eta1, eta2, opts.tail_mass);
  JointPmf acc = mode;
  for (Count m = 1; m < src.modes_m; ++m) acc = convolve(acc, mode);

  if (bg.mean_nb > 0.0) {
    const long double nu = static_cast<long double>(bg.mean_nb) / bg.modes_mb;
    const std::size_t n_max = thermal_cutoff(nu, opts.tail_mass);
    const auto pn = thermal_pmf(nu, n_max);
    JointPmf bath_mode(1, n_max + 1);
    for (std::size_t n = 0; n <= n_max; ++n) bath_mode.at(0, n) = pn[n];
    for (Count m = 0; m < bg.modes_mb; ++m) acc = convolve(acc, bath_mode);
  }
  return acc;
}

EnumeratedMoments moments_from_pmf(const JointPmf& pmf) {
  EnumeratedMoments m;
  for (std::size_t a = 0; a < pmf.rows(); ++a)
    for (std::size_t b = 0; b < pmf.cols(); ++b) {
      m.mean1 += a * pmf.at(a, b);
      m.mean2 += b * pmf.at(a, b);
    }
  long double e_prod2 = 0.0L;
  for (std::size_t a = 0; a < pmf.rows(); ++a)
    for (std::size_t b = 0; b < pmf.cols(); ++b) {
      const long double p = pmf.at(a, b);
      const long double d1 = a - m.mean1;
      const long double d2 = b - m.mean2;
      m.var1 += d1 * d1 * p;
      m.var2 += d2 * d2 * p;
      m.cov += d1 * d2 * p;
      e_prod2 += d1 * d1 * d2 * d2 * p;
    }
  m.product_fluctuation = e_prod2 - m.cov * m.cov;
  return m;
}

EnumeratedMoments enumerate_moments(const SourceParams& src, const DetectionParams& det,
                                    const BackgroundParams& bg, const EnumerationOptions& opts) {
  return moments_from_pmf(enumerate_joint_pmf(src, det, bg, opts));
}

}  // namespace qisim
