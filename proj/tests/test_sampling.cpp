#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qisim/sampling.hpp"
#include "test_support.hpp"

using namespace qisim;
using qisim::test::chi_square_two_sample;
using qisim::test::summarize_samples;
using qisim::test::z_score;

namespace {

template <class Draw>
std::vector<Count> draw_many(std::size_t n, std::uint64_t key, Draw draw) {
  CounterRng rng(key);
  std::vector<Count> out(n);
  for (auto& v : out) v = draw(rng);
  return out;
}

}  // namespace

TEST(LogFactorial, MatchesLgamma) {
  for (Count k = 0; k < 2000; ++k) {
    const double expected = std::lgamma(static_cast<double>(k) + 1.0);
    EXPECT_NEAR(detail::log_factorial(k), expected, 1e-13 * std::max(1.0, expected)) << k;
  }
}

TEST(Poisson, MomentsAcrossBranches) {
  for (double mean : {0.3, 2.0, 9.99, 10.0, 37.5, 1350.0, 6750.0}) {
    const auto xs = draw_many(200000, 11 + static_cast<std::uint64_t>(mean * 100),
                              [&](CounterRng& r) { return sample_poisson(r, mean); });
    const auto s = summarize_samples(xs);
    EXPECT_LT(std::fabs(z_score(s.mean, mean, s.se_mean)), 4.0) << mean;
    EXPECT_LT(std::fabs(z_score(s.var, mean, s.se_var)), 4.0) << mean;
  }
}

TEST(Poisson, DistributionMatchesStdlib) {
  for (double mean : {4.5, 12.0, 30.0, 250.0}) {
    const auto ours = draw_many(100000, 7, [&](CounterRng& r) { return sample_poisson(r, mean); });
    std::mt19937_64 eng(99);
    std::poisson_distribution<Count> ref(mean);
    std::vector<Count> theirs(100000);
    for (auto& v : theirs) v = ref(eng);
    EXPECT_GT(chi_square_two_sample(ours, theirs), 1e-3) << mean;
  }
}

TEST(Poisson, ZeroMeanAndInvalid) {
  CounterRng rng(1);
  EXPECT_EQ(sample_poisson(rng, 0.0), 0);
  EXPECT_THROW(sample_poisson(rng, -1.0), InvalidParameter);
  EXPECT_THROW(sample_poisson(rng, NAN), InvalidParameter);
}

TEST(Thermal, ZeroMeanGivesZero) {
  CounterRng rng(3);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(sample_thermal(0.0, rng), 0);
}

TEST(Thermal, NegativeMeanRejected) {
  CounterRng rng(3);
  EXPECT_THROW(sample_thermal(-0.1, rng), InvalidParameter);
}

TEST(Thermal, BoseEinsteinMoments) {
  const double mu = 0.075;
  const auto xs = draw_many(1000000, 5, [&](CounterRng& r) { return sample_thermal(mu, r); });
  const auto s = summarize_samples(xs);
  EXPECT_LT(std::fabs(z_score(s.mean, mu, s.se_mean)), 3.0);
  EXPECT_LT(std::fabs(z_score(s.var, mu * (1.0 + mu), s.se_var)), 3.0);
}

TEST(Thermal, UnitMeanVacuumProbabilityIsHalf) {
  const std::size_t n = 400000;
  const auto xs = draw_many(n, 6, [](CounterRng& r) { return sample_thermal(1.0, r); });
  const double p0 = static_cast<double>(std::count(xs.begin(), xs.end(), 0)) / n;
  EXPECT_NEAR(p0, 0.5, 3.0 * std::sqrt(0.25 / n));
}

TEST(ModeSum, NegativeBinomialMoments) {
  const double mu = 0.075;
  const Count m = 90000;
  const auto xs = draw_many(200000, 8, [&](CounterRng& r) { return sample_mode_sum(mu, m, r); });
  const auto s = summarize_samples(xs);
  const double mean = static_cast<double>(m) * mu;
  const double var = mean * (1.0 + mu);
  EXPECT_LT(std::fabs(z_score(s.mean, mean, s.se_mean)), 3.0);
  EXPECT_LT(std::fabs(z_score(s.var, var, s.se_var)), 3.0);
}

TEST(ModeSum, SingleModeMatchesThermal) {
  const auto agg = draw_many(200000, 9, [](CounterRng& r) { return sample_mode_sum(0.5, 1, r); });
  const auto one = draw_many(200000, 10, [](CounterRng& r) { return sample_thermal(0.5, r); });
  EXPECT_GT(chi_square_two_sample(agg, one), 1e-3);
}

TEST(ModeSum, AggregatedMatchesPerModeLoop) {
  for (auto [mu, m] : {std::pair{0.075, Count{50}}, std::pair{0.5, Count{7}}, std::pair{2.0, Count{3}}}) {
    const auto agg =
        draw_many(100000, 12, [&](CounterRng& r) { return sample_mode_sum(mu, m, r); });
    const auto loop =
        draw_many(100000, 13, [&](CounterRng& r) { return sample_mode_sum_per_mode(mu, m, r); });
    EXPECT_GT(chi_square_two_sample(agg, loop), 1e-3) << mu << " " << m;
  }
}

TEST(ModeSum, InvalidParameters) {
  CounterRng rng(1);
  EXPECT_THROW(sample_mode_sum(0.1, 0, rng), InvalidParameter);
  EXPECT_THROW(sample_mode_sum(-0.1, 5, rng), InvalidParameter);
  EXPECT_EQ(sample_mode_sum(0.0, 5, rng), 0);
}

TEST(PairPreDetection, TwinBeamPerfectlyCorrelated) {
  SourceParams src;
  CounterRng rng(14);
  for (int i = 0; i < 10000; ++i) {
    const auto p = sample_pair_pre_detection(src, rng);
    ASSERT_EQ(p.n1, p.n2);
  }
}

TEST(PairPreDetection, SplitThermalMoments) {
  SourceParams src;
  src.kind = SourceKind::SplitThermal;
  CounterRng rng(15);
  std::vector<Count> a(200000), b(200000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto p = sample_pair_pre_detection(src, rng);
    a[i] = p.n1;
    b[i] = p.n2;
  }
  const double m = static_cast<double>(src.modes_m);
  const auto s1 = summarize_samples(a);
  const auto s2 = summarize_samples(b);
  const auto c = qisim::test::covariance_samples(a, b);
  EXPECT_LT(std::fabs(z_score(s1.mean, m * src.mu, s1.se_mean)), 3.0);
  EXPECT_LT(std::fabs(z_score(s2.var, m * src.mu * (1 + src.mu), s2.se_var)), 3.0);
  EXPECT_LT(std::fabs(z_score(c.cov, m * src.mu * src.mu, c.se)), 3.0);
}

TEST(PairPreDetection, TwinBeamVariance) {
  SourceParams src;
  const auto xs = draw_many(200000, 16, [&](CounterRng& r) {
    return sample_pair_pre_detection(src, r).n1;
  });
  const auto s = summarize_samples(xs);
  EXPECT_LT(std::fabs(z_score(s.var, 90000 * 0.075 * 1.075, s.se_var)), 3.0);
}

TEST(PairPreDetection, InvalidSource) {
  CounterRng rng(1);
  SourceParams src;
  src.mu = -1.0;
  EXPECT_THROW(sample_pair_pre_detection(src, rng), InvalidParameter);
  src.mu = 0.1;
  src.modes_m = 0;
  EXPECT_THROW(sample_pair_pre_detection(src, rng), InvalidParameter);
}

TEST(Background, MultithermalVariance) {
  for (auto [mb, nb] : {std::pair{Count{57}, 1000.0}, std::pair{Count{1300}, 1000.0}}) {
    BackgroundParams bg{mb, nb};
    const auto xs = draw_many(200000, 17, [&](CounterRng& r) { return sample_background(bg, r); });
    const auto s = summarize_samples(xs);
    EXPECT_LT(std::fabs(z_score(s.mean, nb, s.se_mean)), 3.0);
    EXPECT_LT(std::fabs(z_score(s.var, nb * (1.0 + nb / mb), s.se_var)), 3.0) << mb;
  }
}

TEST(Background, ZeroMeanIsSilent) {
  CounterRng rng(18);
  BackgroundParams bg{1300, 0.0};
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_background(bg, rng), 0);
}

TEST(Background, InvalidParameters) {
  CounterRng rng(1);
  EXPECT_THROW(sample_background(BackgroundParams{0, 1.0}, rng), InvalidParameter);
  EXPECT_THROW(sample_background(BackgroundParams{10, -1.0}, rng), InvalidParameter);
}

TEST(Streams, SameKeySameDraws) {
  SourceParams src;
  CounterRng a(derive_key(5, {1, 2, 3}));
  CounterRng b(derive_key(5, {1, 2, 3}));
  for (int i = 0; i < 100; ++i) {
    const auto x = sample_pair_pre_detection(src, a);
    const auto y = sample_pair_pre_detection(src, b);
    ASSERT_EQ(x.n1, y.n1);
    ASSERT_EQ(x.n2, y.n2);
  }
}

TEST(Streams, KeysDependOnCoordinateOrder) {
  EXPECT_NE(derive_key(1, {1, 2}), derive_key(1, {2, 1}));
  EXPECT_NE(derive_key(1, {0}), derive_key(2, {0}));
}

TEST(SourceKindNames, RoundTrip) {
  EXPECT_EQ(source_kind_from_string("twb"), SourceKind::TwinBeam);
  EXPECT_EQ(source_kind_from_string(to_string(SourceKind::SplitThermal)), SourceKind::SplitThermal);
  EXPECT_THROW(source_kind_from_string("laser"), InvalidParameter);
}
