#include "qisim/theory.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qisim {

namespace {

void validate_all(const SourceParams& src, const DetectionParams& det,
                  const BackgroundParams& bg) {
  src.validate();
  det.validate();
  bg.validate();
}

// Stirling numbers of the second kind S(a, i), a, i <= 2.
constexpr std::array<std::array<long double, 3>, 3> kStirling2 = {{
    {1.0L, 0.0L, 0.0L},
    {0.0L, 1.0L, 0.0L},
    {0.0L, 1.0L, 1.0L},
}};

constexpr long double kFactorial[3] = {1.0L, 1.0L, 2.0L};

double multithermal_variance(double mean, double modes) {
  return mean * (1.0 + mean / modes);
}

double phi_upper(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }  // 1 - Phi(z)
double phi_lower(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }  // Phi(z)

}  // namespace

BivariateSeries<2> factorial_cumulant_series(const SourceParams& src,
                                             const DetectionParams& det,
                                             const BackgroundParams& bg) {
  validate_all(src, det, bg);
  const long double mu = src.mu;
  const long double e1 = det.eta1;
  const long double e2 = det.target_present ? det.eta2 : 0.0;

  // One mode pair, generating function in t_i = z_i - 1 after thinning:
  //   TWB:            1 / (1 - mu (e1 t1 + e2 t2 + e1 e2 t1 t2))
  //   split thermal:  1 / (1 - mu (e1 t1 + e2 t2))
  BivariateSeries<2> f;
  f.at(1, 0) = mu * e1;
  f.at(0, 1) = mu * e2;
  if (src.kind == SourceKind::TwinBeam) f.at(1, 1) = mu * e1 * e2;
  BivariateSeries<2> log_g = neg_log_one_minus(f);
  log_g *= static_cast<long double>(src.modes_m);

  if (bg.mean_nb > 0.0) {
    BivariateSeries<2> fb;
    fb.at(0, 1) = static_cast<long double>(bg.mean_nb) / static_cast<long double>(bg.modes_mb);
    BivariateSeries<2> log_b = neg_log_one_minus(fb);
    log_b *= static_cast<long double>(bg.modes_mb);
    log_g += log_b;
  }
  return log_g;
}

JointCumulants joint_cumulants(const SourceParams& src, const DetectionParams& det,
                               const BackgroundParams& bg) {
  const BivariateSeries<2> series = factorial_cumulant_series(src, det, bg);
  JointCumulants out;
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = 0; b < 3; ++b) {
      if (a == 0 && b == 0) continue;
      long double acc = 0.0L;
      for (std::size_t i = 0; i <= a; ++i) {
        for (std::size_t j = 0; j <= b; ++j) {
          const long double factorial_cumulant = series.at(i, j) * kFactorial[i] * kFactorial[j];
          acc += kStirling2[a][i] * kStirling2[b][j] * factorial_cumulant;
        }
      }
      out.kappa[a][b] = static_cast<double>(acc);
    }
  }
  return out;
}

MomentSet detected_moments(const SourceParams& src, const DetectionParams& det,
                           const BackgroundParams& bg) {
  validate_all(src, det, bg);
  const double m = static_cast<double>(src.modes_m);
  const double eta2 = det.target_present ? det.eta2 : 0.0;

  MomentSet s;
  s.mean1 = m * det.eta1 * src.mu;
  s.var1 = multithermal_variance(s.mean1, m);
  const double pdc2 = m * eta2 * src.mu;
  s.mean2 = pdc2 + bg.mean_nb;
  s.var2 = multithermal_variance(pdc2, m) +
           multithermal_variance(bg.mean_nb, static_cast<double>(bg.modes_mb));
  const double per_mode = src.kind == SourceKind::TwinBeam ? src.mu * (1.0 + src.mu)
                                                           : src.mu * src.mu;
  s.cov = m * det.eta1 * eta2 * per_mode;
  s.cov_noise = joint_cumulants(src, det, bg).product_fluctuation();
  return s;
}

double sigma0_formula(double eta1, double eta2, double mu) {
  const double eta_bar = 0.5 * (eta1 + eta2);
  if (!(eta_bar > 0.0)) throw DegenerateInput("sigma0 undefined for zero efficiencies");
  const double d = eta1 - eta2;
  return 1.0 - eta_bar + d * d * (0.5 + mu) / (2.0 * eta_bar);
}

double nrf_theory(const SourceParams& src, const DetectionParams& det,
                  const BackgroundParams& bg) {
  const MomentSet s = detected_moments(src, det, bg);
  const double denom = s.mean1 + s.mean2;
  if (!(denom > 0.0)) throw DegenerateInput("NRF undefined: zero total mean");
  return (s.var1 + s.var2 - 2.0 * s.cov) / denom;
}

double epsilon_theory(const SourceParams& src, const DetectionParams& det,
                      const BackgroundParams& bg) {
  const MomentSet s = detected_moments(src, det, bg);
  const double normal1 = s.var1 - s.mean1;
  const double normal2 = s.var2 - s.mean2;
  if (!(normal1 > 0.0) || !(normal2 > 0.0)) {
    throw DegenerateInput("epsilon undefined: non-positive normally-ordered variance");
  }
  return s.cov / std::sqrt(normal1 * normal2);
}

double covariance_noise_exact(const SourceParams& src, const DetectionParams& det,
                              const BackgroundParams& bg, std::size_t k) {
  require(k >= 2, "k must be >= 2");
  return joint_cumulants(src, det, bg).product_fluctuation() / static_cast<double>(k);
}

double snr_theory(const SourceParams& src, const DetectionParams& det,
                  const BackgroundParams& bg, std::size_t k) {
  DetectionParams in = det;
  in.target_present = true;
  DetectionParams out = det;
  out.target_present = false;
  const double kd = static_cast<double>(k);
  const double gap = (1.0 - 1.0 / kd) *
                     (detected_moments(src, in, bg).cov - detected_moments(src, out, bg).cov);
  if (gap == 0.0) return 0.0;
  const double noise = covariance_noise_exact(src, in, bg, k) +
                       covariance_noise_exact(src, out, bg, k);
  if (!(noise > 0.0)) throw DegenerateInput("SNR undefined: zero covariance noise");
  return std::fabs(gap) / std::sqrt(noise);
}

double snr_dominant_bg(const SourceParams& src, const DetectionParams& det,
                       const BackgroundParams& bg, std::size_t k) {
  require(k >= 2, "k must be >= 2");
  DetectionParams in = det;
  in.target_present = true;
  const MomentSet s = detected_moments(src, in, bg);
  if (s.cov == 0.0) return 0.0;
  const double var_b = multithermal_variance(bg.mean_nb, static_cast<double>(bg.modes_mb));
  const double noise = 2.0 * s.var1 * var_b / static_cast<double>(k);
  if (!(noise > 0.0)) throw DegenerateInput("dominant-background SNR needs a background");
  return s.cov / std::sqrt(noise);
}

double enhancement_r(const SourceParams& src_qi, const SourceParams& src_ci,
                     const DetectionParams& det, const BackgroundParams& bg) {
  require(src_qi.kind == SourceKind::TwinBeam, "quantum source must be twin beams");
  require(src_ci.kind == SourceKind::SplitThermal, "classical source must be split thermal");
  require(src_qi.mu == src_ci.mu && src_qi.modes_m == src_ci.modes_m,
          "sources must share the same local resources (mu, M)");
  DetectionParams in = det;
  in.target_present = true;
  BackgroundParams dark = bg;
  dark.mean_nb = 0.0;
  return epsilon_theory(src_qi, in, dark) / epsilon_theory(src_ci, in, dark);
}

double two_gaussian_error(double mean_in, double sd_in, double mean_out, double sd_out) {
  require(sd_in >= 0.0 && sd_out >= 0.0, "standard deviations must be >= 0");
  if (sd_in == 0.0 && sd_out == 0.0) {
    throw DegenerateInput("both hypotheses have zero spread");
  }
  if (sd_out == 0.0) return 0.5 * phi_lower((mean_out - mean_in) / sd_in);
  if (sd_in == 0.0) return 0.5 * phi_upper((mean_in - mean_out) / sd_out);

  auto error_at = [&](double t) {
    return 0.5 * (phi_lower((t - mean_in) / sd_in) + phi_upper((t - mean_out) / sd_out));
  };

  // Stationary points: the two weighted densities cross.
  const double a = 1.0 / (sd_out * sd_out) - 1.0 / (sd_in * sd_in);
  const double b = 2.0 * (mean_in / (sd_in * sd_in) - mean_out / (sd_out * sd_out));
  const double c = mean_out * mean_out / (sd_out * sd_out) -
                   mean_in * mean_in / (sd_in * sd_in) + 2.0 * std::log(sd_out / sd_in);
  std::vector<double> roots;
  const double scale = std::max(1.0 / (sd_out * sd_out), 1.0 / (sd_in * sd_in));
  if (std::fabs(a) <= 1e-12 * scale) {
    if (b != 0.0) roots.push_back(-c / b);
  } else {
    const double disc = b * b - 4.0 * a * c;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      const double q = -0.5 * (b + std::copysign(sq, b));
      if (q != 0.0) roots.push_back(c / q);
      roots.push_back(q / a);
    }
  }
  double best = 0.5;  // t -> +/- infinity
  for (double t : roots) best = std::min(best, error_at(t));
  return best;
}

double perr_gaussian(const SourceParams& src, const DetectionParams& det,
                     const BackgroundParams& bg, std::size_t n_img, std::size_t k) {
  require(n_img >= 1, "n_img must be >= 1");
  require(k >= 2, "k must be >= 2");
  DetectionParams in = det;
  in.target_present = true;
  DetectionParams out = det;
  out.target_present = false;
  const double kd = static_cast<double>(k);
  const double groups = static_cast<double>(n_img);
  const MomentSet s_in = detected_moments(src, in, bg);
  const MomentSet s_out = detected_moments(src, out, bg);
  const double bias = 1.0 - 1.0 / kd;
  return two_gaussian_error(bias * s_in.cov, std::sqrt(s_in.cov_noise / (kd * groups)),
                            bias * s_out.cov, std::sqrt(s_out.cov_noise / (kd * groups)));
}

}  // namespace qisim
