#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "qisim/enumeration.hpp"
#include "qisim/theory.hpp"

using namespace qisim;

namespace {

const SourceParams kTwb{0.075, 90000, SourceKind::TwinBeam};
const SourceParams kTh{0.075, 90000, SourceKind::SplitThermal};
const DetectionParams kDet{0.4, 0.2, true};

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return g;
}

// Fine scan plus golden-section refinement of the threshold error.
double scanned_two_gaussian_error(double m_in, double s_in, double m_out, double s_out) {
  auto err = [&](double t) {
    return 0.5 * (0.5 * std::erfc(-(t - m_in) / (s_in * std::sqrt(2.0))) +
                  0.5 * std::erfc((t - m_out) / (s_out * std::sqrt(2.0))));
  };
  const double lo = std::min(m_in - 12 * s_in, m_out - 12 * s_out);
  const double hi = std::max(m_in + 12 * s_in, m_out + 12 * s_out);
  const int n = 200000;
  double best_t = lo, best = err(lo);
  for (int i = 1; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    if (err(t) < best) best = err(t), best_t = t;
  }
  double a = best_t - (hi - lo) / n, b = best_t + (hi - lo) / n;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (err(c) < err(d)) b = d; else a = c;
  }
  return std::min({best, err(0.5 * (a + b)), 0.5});
}

}  // namespace

TEST(DetectedMoments, PaperDefaults) {
  const MomentSet tw = detected_moments(kTwb, kDet, {});
  const MomentSet th = detected_moments(kTh, kDet, {});
  EXPECT_NEAR(tw.mean1, 90000 * 0.4 * 0.075, 1e-9);
  EXPECT_NEAR(tw.mean2, 90000 * 0.2 * 0.075, 1e-9);
  EXPECT_NEAR(tw.cov, 90000 * 0.4 * 0.2 * 0.075 * 1.075, 1e-9);
  EXPECT_NEAR(th.cov, 90000 * 0.4 * 0.2 * 0.075 * 0.075, 1e-9);
  EXPECT_NEAR(tw.cov / th.cov, 1.075 / 0.075, 1e-12);
  EXPECT_DOUBLE_EQ(tw.var1, th.var1);
}

TEST(DetectedMoments, BlockedTargetChannel) {
  const MomentSet s = detected_moments(kTwb, {0.4, 0.0, true}, {1300, 100.0});
  EXPECT_EQ(s.cov, 0.0);
  EXPECT_NEAR(s.var2, 100.0 * (1 + 100.0 / 1300), 1e-9);
}

TEST(DetectedMoments, BackgroundGainFewModes) {
  const MomentSet s = detected_moments(kTwb, {0.4, 0.0, true}, {57, 1000.0});
  EXPECT_NEAR(s.var2, 1000.0 * (1 + 1000.0 / 57.0), 1e-9);
}

TEST(JointCumulants, MatchClosedFormSecondOrder) {
  for (const auto& src : {kTwb, kTh}) {
    for (double nb : {0.0, 30.0, 3000.0}) {
      const BackgroundParams bg{1300, nb};
      const JointCumulants k = joint_cumulants(src, kDet, bg);
      const MomentSet s = detected_moments(src, kDet, bg);
      EXPECT_NEAR(k.mean1(), s.mean1, 1e-9 * s.mean1);
      EXPECT_NEAR(k.mean2(), s.mean2, 1e-9 * s.mean2);
      EXPECT_NEAR(k.var1(), s.var1, 1e-9 * s.var1);
      EXPECT_NEAR(k.var2(), s.var2, 1e-9 * s.var2);
      EXPECT_NEAR(k.cov(), s.cov, 1e-9 * s.cov);
    }
  }
}

TEST(CovarianceNoise, MatchesEnumerationGrid) {
  for (Count m : {1, 2, 3}) {
    for (double mu : {0.05, 0.1, 0.2}) {
      for (double eta : {0.5, 1.0}) {
        for (SourceKind kind : {SourceKind::TwinBeam, SourceKind::SplitThermal}) {
          const SourceParams src{mu, m, kind};
          const DetectionParams det{eta, eta, true};
          const auto brute = enumerate_moments(src, det, {1, 0.0});
          const MomentSet s = detected_moments(src, det, {1, 0.0});
          EXPECT_LT(rel(s.cov_noise, static_cast<double>(brute.product_fluctuation)), 1e-9);
          EXPECT_LT(rel(s.cov, static_cast<double>(brute.cov)), 1e-9);
          EXPECT_LT(rel(s.var1, static_cast<double>(brute.var1)), 1e-9);
        }
      }
    }
  }
}

TEST(CovarianceNoise, MatchesEnumerationUnequalLossAndBackground) {
  for (SourceKind kind : {SourceKind::TwinBeam, SourceKind::SplitThermal}) {
    for (bool present : {true, false}) {
      const SourceParams src{0.3, 2, kind};
      const DetectionParams det{0.7, 0.25, present};
      const BackgroundParams bg{2, 0.4};
      const auto brute = enumerate_moments(src, det, bg);
      const MomentSet s = detected_moments(src, det, bg);
      EXPECT_LT(rel(s.cov_noise, static_cast<double>(brute.product_fluctuation)), 1e-9);
      EXPECT_LT(rel(s.var2, static_cast<double>(brute.var2)), 1e-9);
      EXPECT_LT(rel(s.mean2, static_cast<double>(brute.mean2)), 1e-9);
    }
  }
}

TEST(Enumeration, PmfIsNormalized) {
  const JointPmf pmf = enumerate_joint_pmf({0.2, 3, SourceKind::TwinBeam}, {0.5, 0.5, true}, {1, 0.0});
  EXPECT_NEAR(static_cast<double>(pmf.total_mass()), 1.0, 1e-15);
}

TEST(CovarianceNoise, IndependentArmsFactorize) {
  const DetectionParams absent{0.4, 0.2, false};
  for (double nb : {10.0, 1000.0}) {
    const BackgroundParams bg{57, nb};
    const MomentSet s = detected_moments(kTwb, absent, bg);
    const double var_b = nb * (1 + nb / 57.0);
    EXPECT_NEAR(s.cov_noise, s.var1 * var_b, 1e-9 * s.cov_noise);
    EXPECT_NEAR(covariance_noise_exact(kTwb, absent, bg, 80) * 80, s.var1 * var_b,
                1e-9 * s.cov_noise);
  }
}

TEST(CovarianceNoise, DarkSourceIsZero) {
  const SourceParams dark{0.0, 90000, SourceKind::TwinBeam};
  EXPECT_EQ(covariance_noise_exact(dark, kDet, {}, 80), 0.0);
  EXPECT_THROW(covariance_noise_exact(kTwb, kDet, {}, 1), InvalidParameter);
}

TEST(Sigma0, PaperDefaults) {
  EXPECT_NEAR(sigma0_formula(0.4, 0.2, 0.075), 0.738333333333333, 1e-12);
  EXPECT_NEAR(nrf_theory(kTwb, kDet, {}), sigma0_formula(0.4, 0.2, 0.075), 1e-12);
}

TEST(Sigma0, TwoPathsAgree) {
  for (double e1 : {0.1, 0.33, 0.9})
    for (double e2 : {0.05, 0.5, 1.0})
      for (double mu : {0.001, 0.3, 3.0})
        EXPECT_NEAR(nrf_theory({mu, 1000, SourceKind::TwinBeam}, {e1, e2, true}, {}),
                    sigma0_formula(e1, e2, mu), 1e-12);
}

TEST(Sigma0, PerfectDetectionIsNoiseless) {
  EXPECT_NEAR(sigma0_formula(1.0, 1.0, 1e-6), 0.0, 1e-12);
  EXPECT_THROW(sigma0_formula(0.0, 0.0, 0.1), DegenerateInput);
}

TEST(Nrf, SplitThermalNeverBelowOne) {
  for (double mu : {0.01, 0.075, 1.0})
    for (double e2 : {0.1, 0.5})
      for (double nb : {0.0, 100.0})
        EXPECT_GE(nrf_theory({mu, 90000, SourceKind::SplitThermal}, {2 * e2, e2, true}, {1300, nb}),
                  1.0 - 1e-12);
}

TEST(Nrf, TwinBeamGrowsWithBackground) {
  double prev = nrf_theory(kTwb, kDet, {1300, 0.0});
  for (double nb : log_grid(1, 5000, 12)) {
    const double s = nrf_theory(kTwb, kDet, {1300, nb});
    EXPECT_GT(s, prev);
    prev = s;
  }
  EXPECT_GT(prev, 1.0);
}

TEST(Epsilon, SourceEndpoints) {
  EXPECT_NEAR(epsilon_theory(kTwb, kDet, {}), 1.075 / 0.075, 1e-9);
  EXPECT_NEAR(epsilon_theory(kTh, kDet, {}), 1.0, 1e-12);
}

TEST(Epsilon, LossInvariant) {
  for (double scale : {0.01, 0.5, 2.5})
    EXPECT_NEAR(epsilon_theory(kTwb, {0.4 * scale, 0.2 * scale, true}, {}),
                epsilon_theory(kTwb, kDet, {}), 1e-9);
}

TEST(Epsilon, SingleCrossingOfClassicalBound) {
  for (Count mb : {57, 1300}) {
    int crossings = 0;
    double prev = epsilon_theory(kTwb, kDet, {mb, 0.0});
    for (double nb : log_grid(0.01, 1e6, 400)) {
      const double e = epsilon_theory(kTwb, kDet, {mb, nb});
      EXPECT_LT(e, prev);
      if ((prev - 1.0) * (e - 1.0) < 0.0) ++crossings;
      prev = e;
    }
    EXPECT_EQ(crossings, 1) << mb;
  }
}

TEST(Epsilon, DegenerateWithoutTargetSignal) {
  EXPECT_THROW(epsilon_theory(kTwb, {0.4, 0.2, false}, {}), DegenerateInput);
}

TEST(Snr, ZeroWhenTargetChannelClosed) {
  EXPECT_EQ(snr_theory(kTwb, {0.4, 0.0, true}, {1300, 100.0}, 80), 0.0);
}

TEST(Snr, DecreasesWithBackground) {
  for (const auto& src : {kTwb, kTh}) {
    double prev = snr_theory(src, kDet, {1300, 0.0}, 80);
    for (double nb : log_grid(1, 5000, 12)) {
      const double s = snr_theory(src, kDet, {1300, nb}, 80);
      EXPECT_LT(s, prev);
      prev = s;
    }
  }
}

TEST(Snr, DominantBackgroundLimit) {
  for (const auto& src : {kTwb, kTh}) {
    for (double nb : {2e4, 1e5}) {
      const BackgroundParams bg{1300, nb};
      EXPECT_LT(rel(snr_dominant_bg(src, kDet, bg, 80), snr_theory(src, kDet, bg, 80)), 0.05) << nb;
    }
  }
  EXPECT_THROW(snr_dominant_bg(kTwb, kDet, {1300, 0.0}, 80), DegenerateInput);
}

TEST(Snr, QuantumAdvantageAtLargeBackground) {
  for (double nb : {1000.0, 5000.0, 20000.0}) {
    const BackgroundParams bg{1300, nb};
    const double ratio = snr_theory(kTwb, kDet, bg, 80) / snr_theory(kTh, kDet, bg, 80);
    EXPECT_NEAR(ratio / (1.075 / 0.075), 1.0, 0.2) << nb;
  }
}

TEST(Enhancement, KnownValues) {
  EXPECT_NEAR(enhancement_r(kTwb, kTh, kDet, {}), 1.075 / 0.075, 1e-9);
  EXPECT_NEAR(enhancement_r({1.0, 100, SourceKind::TwinBeam}, {1.0, 100, SourceKind::SplitThermal},
                            kDet, {}),
              2.0, 1e-12);
  EXPECT_NEAR(enhancement_r({1e6, 100, SourceKind::TwinBeam}, {1e6, 100, SourceKind::SplitThermal},
                            kDet, {}),
              1.0, 1e-5);
}

TEST(Enhancement, MismatchedResourcesRejected) {
  SourceParams other = kTh;
  other.mu = 0.1;
  EXPECT_THROW(enhancement_r(kTwb, other, kDet, {}), InvalidParameter);
  EXPECT_THROW(enhancement_r(kTh, kTwb, kDet, {}), InvalidParameter);
}

TEST(TwoGaussian, EqualVarianceClosedForm) {
  for (double d : {0.0, 0.3, 1.0, 4.0, 12.0}) {
    EXPECT_NEAR(two_gaussian_error(d, 1.0, 0.0, 1.0), 0.5 * std::erfc(d / (2 * std::sqrt(2.0))),
                1e-15);
  }
}

TEST(TwoGaussian, MatchesThresholdScan) {
  const double cases[][4] = {
      {1.0, 1.0, 0.0, 2.0}, {3.0, 0.5, 0.0, 1.0}, {0.5, 3.0, 0.0, 0.3}, {10.0, 2.0, 9.0, 7.0}};
  for (const auto& c : cases) {
    EXPECT_NEAR(two_gaussian_error(c[0], c[1], c[2], c[3]),
                scanned_two_gaussian_error(c[0], c[1], c[2], c[3]), 1e-9);
  }
}

TEST(TwoGaussian, OneSidedStep) {
  EXPECT_NEAR(two_gaussian_error(2.0, 1.0, 0.0, 0.0), 0.5 * 0.5 * std::erfc(2.0 / std::sqrt(2.0)), 1e-15);
  EXPECT_THROW(two_gaussian_error(1.0, 0.0, 0.0, 0.0), DegenerateInput);
  EXPECT_THROW(two_gaussian_error(1.0, -1.0, 0.0, 1.0), InvalidParameter);
}

TEST(PerrGaussian, MonotoneInImagesAndSignal) {
  const BackgroundParams bg{1300, 100.0};
  double prev = 0.5;
  for (std::size_t n : {1, 3, 10, 30, 100}) {
    const double p = perr_gaussian(kTwb, kDet, bg, n, 80);
    EXPECT_LT(p, prev);
    prev = p;
  }
  prev = 0.5;
  for (double e2 : {0.01, 0.05, 0.1, 0.2}) {
    const double p = perr_gaussian(kTwb, {0.4, e2, true}, bg, 10, 80);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(PerrGaussian, MoreImagesShiftCurveDown) {
  for (double nb : log_grid(1, 5000, 12)) {
    const BackgroundParams bg{1300, nb};
    EXPECT_LT(perr_gaussian(kTh, kDet, bg, 100, 80), perr_gaussian(kTh, kDet, bg, 10, 80));
  }
}

// For every error level the classical source reaches, the twin beam reaches it
// at a background at least ten times larger.
TEST(PerrGaussian, QuantumToleratesTenfoldBackground) {
  for (double nb : log_grid(1, 5000, 40)) {
    const BackgroundParams ci_bg{1300, nb};
    const BackgroundParams qi_bg{1300, 10 * nb};
    EXPECT_LE(perr_gaussian(kTwb, kDet, qi_bg, 10, 80), perr_gaussian(kTh, kDet, ci_bg, 10, 80)) << nb;
  }
}

TEST(Series, NegLogOneMinusSingleVariable) {
  BivariateSeries<2> f;
  f.at(1, 0) = 0.3L;
  const auto g = neg_log_one_minus(f);
  EXPECT_NEAR(static_cast<double>(g.at(1, 0)), 0.3, 1e-18);
  EXPECT_NEAR(static_cast<double>(g.at(2, 0)), 0.09 / 2, 1e-18);
  EXPECT_EQ(static_cast<double>(g.at(0, 1)), 0.0);
}
