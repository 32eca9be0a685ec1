#include "qisim/harness.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>

#include "qisim/enumeration.hpp"
#include "qisim/estimators.hpp"
#include "qisim/theory.hpp"

namespace qisim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream tag for the trial-group shuffle of the error-probability sweep.
constexpr std::uint64_t kPerrShuffleTag = 0x70657272;

void apply_threads(const SweepSpec& spec) {
  if (spec.threads > 0) omp_set_num_threads(spec.threads);
}

template <class F>
double or_nan(F&& f) {
  try {
    return f();
  } catch (const DegenerateInput&) {
    return kNaN;
  }
}

std::vector<FrameStats> simulate(const SweepSpec& spec, std::size_t g, double nb,
                                 SourceKind kind, Hypothesis hyp, std::size_t count) {
  return simulate_batch_parallel(spec.frame_setup(g, nb, kind, hyp), 0, count);
}

// Runs `point` for every (grid point, source) cell, in grid-major order.
template <class Point>
SweepResult sweep(const SweepSpec& spec, std::string name, std::vector<std::string> columns,
                  Point point) {
  spec.validate();
  apply_threads(spec);
  SweepResult result{std::move(name), std::move(columns), {}};
  const std::vector<double> grid = spec.nb_grid();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (SourceKind kind : spec.source_kinds()) {
      SweepRecord rec{g, grid[g], kind, point(g, grid[g], kind)};
      result.records.push_back(std::move(rec));
    }
  }
  return result;
}

}  // namespace

SourceSelection source_selection_from_string(const std::string& name) {
  if (name == "twb") return SourceSelection::TwinBeam;
  if (name == "thermal") return SourceSelection::SplitThermal;
  if (name == "both") return SourceSelection::Both;
  throw InvalidParameter("source must be one of twb, thermal, both (got '" + name + "')");
}

std::string to_string(SourceSelection sel) {
  switch (sel) {
    case SourceSelection::TwinBeam:
      return "twb";
    case SourceSelection::SplitThermal:
      return "thermal";
    case SourceSelection::Both:
      break;
  }
  return "both";
}

void SweepSpec::validate() const {
  source(SourceKind::TwinBeam).validate();
  detection().validate();
  require(modes_mb >= 1, "mb must be >= 1");
  require(n_pix >= 2, "npix must be >= 2");
  require(n_img >= 1, "nimg must be >= 1");
  require(frames >= 2, "frames must be >= 2");
  require(trials >= 1, "trials must be >= 1");
  const std::vector<double> grid = nb_grid();
  require(!grid.empty(), "background grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(std::isfinite(grid[i]) && grid[i] >= 0.0, "background values must be finite and >= 0");
    if (i > 0) require(grid[i] > grid[i - 1], "background grid must be strictly increasing");
  }
}

std::vector<double> SweepSpec::nb_grid() const {
  if (!nb_values.empty()) return nb_values;
  require(nb_points >= 1, "nb-points must be >= 1");
  require(nb_min >= 0.0 && nb_max >= nb_min, "need 0 <= nb-min <= nb-max");
  std::vector<double> grid;
  if (nb_points == 1) return {nb_min};
  std::size_t log_points = nb_points;
  double lo = nb_min;
  if (nb_min == 0.0) {
    grid.push_back(0.0);
    --log_points;
    lo = std::min(1.0, nb_max);
    if (log_points == 1) {
      grid.push_back(nb_max);
      return grid;
    }
  }
  require(nb_max > lo, "nb-max must exceed the lowest positive grid value");
  const double a = std::log(lo);
  const double b = std::log(nb_max);
  for (std::size_t i = 0; i < log_points; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(log_points - 1);
    grid.push_back(i + 1 == log_points ? nb_max : std::exp(a + (b - a) * t));
  }
  return grid;
}

std::vector<SourceKind> SweepSpec::source_kinds() const {
  switch (sources) {
    case SourceSelection::TwinBeam:
      return {SourceKind::TwinBeam};
    case SourceSelection::SplitThermal:
      return {SourceKind::SplitThermal};
    case SourceSelection::Both:
      break;
  }
  return {SourceKind::TwinBeam, SourceKind::SplitThermal};
}

SourceParams SweepSpec::source(SourceKind kind) const { return {mu, modes_m, kind}; }

DetectionParams SweepSpec::detection() const { return {eta1, eta2, true}; }

BackgroundParams SweepSpec::background(double nb) const { return {modes_mb, nb}; }

FrameSetup SweepSpec::frame_setup(std::size_t grid_index, double nb, SourceKind kind,
                                  Hypothesis hyp) const {
  FrameSetup setup;
  setup.src = source(kind);
  setup.det = detection();
  setup.bg = background(nb);
  setup.n_pix = n_pix;
  setup.master_seed = master_seed;
  setup.grid_index = grid_index;
  setup.hypothesis = hyp;
  return setup;
}

void apply_json(SweepSpec& spec, const nlohmann::json& config) {
  if (!config.is_object()) throw InvalidParameter("config must be a JSON object");
  try {
    for (const auto& [key, v] : config.items()) {
      if (key == "nb_grid") spec.nb_values = v.get<std::vector<double>>();
      else if (key == "nb_min") spec.nb_min = v.get<double>();
      else if (key == "nb_max") spec.nb_max = v.get<double>();
      else if (key == "nb_points") spec.nb_points = v.get<std::size_t>();
      else if (key == "source") spec.sources = source_selection_from_string(v.get<std::string>());
      else if (key == "mu") spec.mu = v.get<double>();
      else if (key == "modes") spec.modes_m = v.get<Count>();
      else if (key == "eta1") spec.eta1 = v.get<double>();
      else if (key == "eta2") spec.eta2 = v.get<double>();
      else if (key == "mb") spec.modes_mb = v.get<Count>();
      else if (key == "npix") spec.n_pix = v.get<std::size_t>();
      else if (key == "nimg") spec.n_img = v.get<std::size_t>();
      else if (key == "frames") spec.frames = v.get<std::size_t>();
      else if (key == "trials") spec.trials = v.get<std::size_t>();
      else if (key == "seed") spec.master_seed = v.get<std::uint64_t>();
      else if (key == "out") spec.out = v.get<std::string>();
      else if (key == "threads") spec.threads = v.get<int>();
      else throw InvalidParameter("unknown config key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidParameter(std::string("bad config value: ") + e.what());
  }
}

nlohmann::ordered_json to_json(const SweepSpec& spec) {
  nlohmann::ordered_json j;
  j["nb_grid"] = spec.nb_grid();
  j["nb_min"] = spec.nb_min;
  j["nb_max"] = spec.nb_max;
  j["nb_points"] = spec.nb_points;
  j["source"] = to_string(spec.sources);
  j["mu"] = spec.mu;
  j["modes"] = spec.modes_m;
  j["eta1"] = spec.eta1;
  j["eta2"] = spec.eta2;
  j["mb"] = spec.modes_mb;
  j["npix"] = spec.n_pix;
  j["nimg"] = spec.n_img;
  j["frames"] = spec.frames;
  j["trials"] = spec.trials;
  j["seed"] = spec.master_seed;
  j["out"] = spec.out;
  j["threads"] = spec.threads;
  return j;
}

double SweepResult::value(const SweepRecord& record, const std::string& column) const {
  const auto it = std::find(columns.begin(), columns.end(), column);
  if (it == columns.end()) throw InvalidParameter("no column '" + column + "' in " + name);
  return record.values.at(static_cast<std::size_t>(it - columns.begin()));
}

SweepResult run_nrf_sweep(const SweepSpec& spec) {
  return sweep(spec, "nrf", {"frames", "sigma", "sigma_se", "sigma_theory"},
               [&](std::size_t g, double nb, SourceKind kind) {
                 const auto stats =
                     simulate(spec, g, nb, kind, Hypothesis::TargetPresent, spec.frames);
                 const EstimateWithError est = nrf(stats);
                 const double theory =
                     nrf_theory(spec.source(kind), spec.detection(), spec.background(nb));
                 return std::vector<double>{static_cast<double>(spec.frames), est.value,
                                            est.std_error, theory};
               });
}

SweepResult run_epsilon_sweep(const SweepSpec& spec) {
  return sweep(spec, "epsilon", {"frames", "epsilon", "epsilon_se", "epsilon_theory"},
               [&](std::size_t g, double nb, SourceKind kind) {
                 const auto stats =
                     simulate(spec, g, nb, kind, Hypothesis::TargetPresent, spec.frames);
                 EstimateWithError est{kNaN, kNaN, 0};
                 try {
                   est = cauchy_schwarz_epsilon(stats);
                 } catch (const DegenerateInput&) {
                   // undefined at this sample size; reported as nan
                 }
                 const double theory = or_nan([&] {
                   return epsilon_theory(spec.source(kind), spec.detection(), spec.background(nb));
                 });
                 return std::vector<double>{static_cast<double>(spec.frames), est.value,
                                            est.std_error, theory};
               });
}

SweepResult run_snr_sweep(const SweepSpec& spec) {
  return sweep(
      spec, "snr",
      {"frames", "delta_in", "delta_in_se", "delta_out", "delta_out_se", "delta_in_theory",
       "snr", "snr_se", "snr_theory", "snr_dominant_bg", "snr_per_sqrt_k",
       "snr_per_sqrt_k_theory"},
      [&](std::size_t g, double nb, SourceKind kind) {
        const auto in = frame_covariances(
            simulate(spec, g, nb, kind, Hypothesis::TargetPresent, spec.frames));
        const auto out = frame_covariances(
            simulate(spec, g, nb, kind, Hypothesis::TargetAbsent, spec.frames));
        const SourceParams src = spec.source(kind);
        const DetectionParams det = spec.detection();
        const BackgroundParams bg = spec.background(nb);
        const double k = static_cast<double>(spec.n_pix);

        const EstimateWithError m_in = mean_with_error(in);
        const EstimateWithError m_out = mean_with_error(out);
        const EstimateWithError snr = empirical_snr(in, out);
        const double delta_theory = (1.0 - 1.0 / k) * detected_moments(src, det, bg).cov;
        const double snr_th = or_nan([&] { return snr_theory(src, det, bg, spec.n_pix); });
        const double snr_dom = or_nan([&] { return snr_dominant_bg(src, det, bg, spec.n_pix); });
        return std::vector<double>{static_cast<double>(spec.frames),
                                   m_in.value,
                                   m_in.std_error,
                                   m_out.value,
                                   m_out.std_error,
                                   delta_theory,
                                   snr.value,
                                   snr.std_error,
                                   snr_th,
                                   snr_dom,
                                   snr.value / std::sqrt(k),
                                   snr_th / std::sqrt(k)};
      });
}

SweepResult run_perr_sweep(const SweepSpec& spec) {
  return sweep(spec, "perr",
               {"n_img", "trials", "threshold", "p_err", "p_err_floor", "p_err_theory"},
               [&](std::size_t g, double nb, SourceKind kind) {
                 const std::size_t count = spec.trials * spec.n_img;
                 const auto in = frame_covariances(
                     simulate(spec, g, nb, kind, Hypothesis::TargetPresent, count));
                 const auto out = frame_covariances(
                     simulate(spec, g, nb, kind, Hypothesis::TargetAbsent, count));
                 CounterRng rng(derive_key(spec.master_seed,
                                           {g, static_cast<std::uint64_t>(kind), kPerrShuffleTag}));
                 const ErrorProbability ep =
                     error_probability(in, out, spec.n_img, spec.trials, rng);
                 const double theory = or_nan([&] {
                   return perr_gaussian(spec.source(kind), spec.detection(), spec.background(nb),
                                        spec.n_img, spec.n_pix);
                 });
                 return std::vector<double>{static_cast<double>(spec.n_img),
                                            static_cast<double>(spec.trials),
                                            ep.threshold,
                                            ep.p_err,
                                            ep.resolution,
                                            theory};
               });
}

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const ValidationCheck& c) { return c.passed; });
}

namespace {

std::string fmt(double v) { return format_number(v); }

ValidationCheck check_sigma0_paths() {
  double worst = 0.0;
  for (double eta1 : {0.1, 0.4, 0.7, 1.0}) {
    for (double eta2 : {0.05, 0.2, 0.5, 1.0}) {
      for (double mu : {0.01, 0.075, 0.5, 2.0}) {
        const double via_moments =
            nrf_theory({mu, 90000, SourceKind::TwinBeam}, {eta1, eta2, true}, {1, 0.0});
        worst = std::max(worst, std::fabs(via_moments - sigma0_formula(eta1, eta2, mu)));
      }
    }
  }
  return {"sigma0 closed form equals moment-based NRF", worst < 1e-12,
          "max |diff| = " + fmt(worst)};
}

ValidationCheck check_enumeration() {
  double worst = 0.0;
  for (Count m : {1, 2, 3}) {
    for (double mu : {0.05, 0.1, 0.2}) {
      for (double eta : {0.5, 1.0}) {
        for (SourceKind kind : {SourceKind::TwinBeam, SourceKind::SplitThermal}) {
          const SourceParams src{mu, m, kind};
          const DetectionParams det{eta, eta, true};
          const BackgroundParams bg{1, 0.0};
          const EnumeratedMoments brute = enumerate_moments(src, det, bg);
          const MomentSet exact = detected_moments(src, det, bg);
          const double rel = std::fabs(exact.cov_noise -
                                       static_cast<double>(brute.product_fluctuation)) /
                             static_cast<double>(brute.product_fluctuation);
          worst = std::max(worst, rel);
        }
      }
    }
  }
  return {"fourth-moment engine equals brute-force enumeration (36 points)", worst < 1e-9,
          "max relative error = " + fmt(worst)};
}

ValidationCheck check_background_decomposition() {
  double worst = 0.0;
  for (double nb : {10.0, 1000.0}) {
    for (Count mb : {57, 1300}) {
      const SourceParams src{0.075, 90000, SourceKind::TwinBeam};
      const DetectionParams det{0.4, 0.2, false};
      const BackgroundParams bg{mb, nb};
      const MomentSet s = detected_moments(src, det, bg);
      const double expected = s.var1 * nb * (1.0 + nb / static_cast<double>(mb));
      worst = std::max(worst, std::fabs(s.cov_noise - expected) / expected);
    }
  }
  return {"target-absent covariance noise equals var1 * var_b", worst < 1e-12,
          "max relative error = " + fmt(worst)};
}

ValidationCheck check_epsilon_loss_invariance() {
  double worst = 0.0;
  for (double mu : {0.02, 0.075, 0.5}) {
    for (double eta1 : {0.1, 0.4, 1.0}) {
      for (double eta2 : {0.05, 0.2, 0.9}) {
        const double eps = epsilon_theory({mu, 90000, SourceKind::TwinBeam},
                                          {eta1, eta2, true}, {1300, 0.0});
        const double expected = (1.0 + mu) / mu;
        worst = std::max(worst, std::fabs(eps - expected) / expected);
      }
    }
  }
  return {"twin-beam epsilon is loss invariant and equals (1+mu)/mu", worst < 1e-12,
          "max relative error = " + fmt(worst)};
}

ValidationCheck check_perr_monotone() {
  const SourceParams src{0.075, 90000, SourceKind::TwinBeam};
  const DetectionParams det{0.4, 0.2, true};
  const BackgroundParams bg{1300, 2000.0};
  double prev = 1.0;
  bool ok = true;
  for (std::size_t n_img : {1, 2, 5, 10, 20, 50, 100}) {
    const double p = perr_gaussian(src, det, bg, n_img, 80);
    ok = ok && p <= prev;
    prev = p;
  }
  return {"Gaussian error probability decreases with the number of images", ok,
          "p_err(n_img=100) = " + fmt(prev)};
}

struct ZScores {
  std::size_t total = 0;
  std::size_t beyond3 = 0;
  double worst = 0.0;
  std::string worst_label;

  void add(double estimate, double se, double theory, const std::string& label) {
    ++total;
    const double z = se > 0.0 ? std::fabs(estimate - theory) / se
                              : (estimate == theory ? 0.0 : std::numeric_limits<double>::infinity());
    if (z > 3.0) ++beyond3;
    if (z > worst) {
      worst = z;
      worst_label = label;
    }
  }
};

void compare_moments(ZScores& z, std::span<const FrameStats> stats, const SourceParams& src,
                     const DetectionParams& det, const BackgroundParams& bg,
                     const std::string& label) {
  const MomentSet th = detected_moments(src, det, bg);
  auto pooled = [&](auto field) {
    return jackknife_estimate(stats, [field](const FrameStats& t) {
      return pooled_moments(t).*field;
    });
  };
  const EstimateWithError m1 = pooled(&PooledMoments::mean1);
  const EstimateWithError m2 = pooled(&PooledMoments::mean2);
  const EstimateWithError v1 = pooled(&PooledMoments::var1);
  const EstimateWithError v2 = pooled(&PooledMoments::var2);
  const EstimateWithError c = pooled(&PooledMoments::cov);
  z.add(m1.value, m1.std_error, th.mean1, label + " mean1");
  z.add(m2.value, m2.std_error, th.mean2, label + " mean2");
  z.add(v1.value, v1.std_error, th.var1, label + " var1");
  z.add(v2.value, v2.std_error, th.var2, label + " var2");
  z.add(c.value, c.std_error, th.cov, label + " cov");

  const auto deltas = frame_covariances(stats);
  const EstimateWithError md = mean_with_error(deltas);
  const double k = static_cast<double>(stats.front().k);
  z.add(md.value, md.std_error, (1.0 - 1.0 / k) * th.cov, label + " mean covariance");
}

ValidationCheck check_monte_carlo(const SweepSpec& spec) {
  ZScores z;
  std::uint64_t cell = 0;
  for (SourceKind kind : {SourceKind::TwinBeam, SourceKind::SplitThermal}) {
    for (double mu : {0.05, 0.075, 0.2}) {
      for (double eta2 : {0.1, 0.2, 0.4}) {
        for (double nb : {0.0, 100.0, 1000.0}) {
          FrameSetup setup;
          setup.src = {mu, 90000, kind};
          setup.det = {2.0 * eta2, eta2, true};
          setup.bg = {spec.modes_mb, nb};
          setup.n_pix = spec.n_pix;
          setup.master_seed = spec.master_seed;
          setup.grid_index = cell++;
          const auto stats = simulate_batch_parallel(setup, 0, spec.frames);
          compare_moments(z, stats, setup.src, setup.det, setup.bg,
                          std::string(to_string(kind)) + " mu=" + fmt(mu) + " eta2=" +
                              fmt(eta2) + " nb=" + fmt(nb));
        }
      }
    }
  }
  // Literal composition path on a few cells, both hypotheses.
  const std::size_t literal_frames = std::max<std::size_t>(2, spec.frames / 10);
  for (SourceKind kind : {SourceKind::TwinBeam, SourceKind::SplitThermal}) {
    for (Hypothesis hyp : {Hypothesis::TargetPresent, Hypothesis::TargetAbsent}) {
      FrameSetup setup;
      setup.src = {0.075, 90000, kind};
      setup.det = {0.4, 0.2, true};
      setup.bg = {spec.modes_mb, 100.0};
      setup.n_pix = spec.n_pix;
      setup.master_seed = spec.master_seed;
      setup.grid_index = cell++;
      setup.hypothesis = hyp;
      std::vector<FrameStats> stats;
      for (std::size_t f = 0; f < literal_frames; ++f) {
        stats.push_back(summarize(simulate_frame(setup, f)));
      }
      compare_moments(z, stats, setup.src, setup.effective_detection(), setup.bg,
                      std::string("literal ") + std::string(to_string(kind)) +
                          (hyp == Hypothesis::TargetPresent ? " in" : " out"));
    }
  }
  const double frac = static_cast<double>(z.total - z.beyond3) / static_cast<double>(z.total);
  const bool ok = frac >= 0.95 && z.worst <= 5.0;
  return {"Monte Carlo moments agree with theory (>=95% within 3 se, none beyond 5 se)", ok,
          std::to_string(z.total - z.beyond3) + "/" + std::to_string(z.total) +
              " within 3 se; worst |z| = " + fmt(z.worst) + " (" + z.worst_label + ")"};
}

}  // namespace

ValidationReport run_validate(const SweepSpec& spec) {
  spec.validate();
  apply_threads(spec);
  ValidationReport report;
  report.checks.push_back(check_sigma0_paths());
  report.checks.push_back(check_enumeration());
  report.checks.push_back(check_background_decomposition());
  report.checks.push_back(check_epsilon_loss_invariance());
  report.checks.push_back(check_perr_monotone());
  report.checks.push_back(check_monte_carlo(spec));
  return report;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_csv(const SweepResult& result, std::ostream& os) {
  os << "grid_index,nb,source";
  for (const auto& c : result.columns) os << ',' << c;
  os << '\n';
  for (const SweepRecord& r : result.records) {
    os << r.grid_index << ',' << format_number(r.nb) << ',' << to_string(r.source);
    for (double v : r.values) os << ',' << format_number(v);
    os << '\n';
  }
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream os;
  write_csv(result, os);
  return os.str();
}

nlohmann::ordered_json make_manifest(const SweepSpec& spec, const std::string& command,
                                     const SweepResult* result, double wall_time_s) {
  nlohmann::ordered_json m;
  m["command"] = command;
  m["version"] = kVersion;
  m["spec"] = to_json(spec);
  m["seed"] = spec.master_seed;
  m["threads"] = spec.threads > 0 ? spec.threads : omp_get_max_threads();
  m["wall_time_s"] = wall_time_s;
  if (result != nullptr) {
    m["columns"] = result->columns;
    m["rows"] = result->records.size();
  }
  return m;
}

}  // namespace qisim
