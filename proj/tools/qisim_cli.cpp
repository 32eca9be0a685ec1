// Command-line front end for the quantum-illumination sweeps.
//
//   qisim nrf|epsilon|snr|perr|validate [flags]
//
// Exit codes: 0 success, 1 invalid input, 2 validation failure, 3 I/O error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qisim/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitValidation = 2;
constexpr int kExitIo = 3;

struct Overrides {
  std::optional<std::string> source;
  std::optional<double> mu;
  std::optional<qisim::Count> modes;
  std::optional<double> eta1;
  std::optional<double> eta2;
  std::optional<double> nb_min;
  std::optional<double> nb_max;
  std::optional<std::size_t> nb_points;
  std::optional<qisim::Count> mb;
  std::optional<std::size_t> npix;
  std::optional<std::size_t> nimg;
  std::optional<std::size_t> frames;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::optional<std::string> config;
  std::optional<std::string> dump_frame;
};

template <class T>
void set_if(T& target, const std::optional<T>& v) {
  if (v) target = *v;
}

qisim::SweepSpec build_spec(const Overrides& o) {
  qisim::SweepSpec spec;
  if (o.config) {
    std::ifstream in(*o.config);
    if (!in) throw qisim::IoError("cannot read config file " + *o.config);
    nlohmann::json cfg;
    try {
      in >> cfg;
    } catch (const nlohmann::json::parse_error& e) {
      throw qisim::InvalidParameter(std::string("config is not valid JSON: ") + e.what());
    }
    qisim::apply_json(spec, cfg);
  }
  if (o.source) spec.sources = qisim::source_selection_from_string(*o.source);
  set_if(spec.mu, o.mu);
  set_if(spec.modes_m, o.modes);
  set_if(spec.eta1, o.eta1);
  set_if(spec.eta2, o.eta2);
  // An explicit grid bound on the command line replaces a config-file grid.
  if (o.nb_min || o.nb_max || o.nb_points) spec.nb_values.clear();
  set_if(spec.nb_min, o.nb_min);
  set_if(spec.nb_max, o.nb_max);
  set_if(spec.nb_points, o.nb_points);
  set_if(spec.modes_mb, o.mb);
  set_if(spec.n_pix, o.npix);
  set_if(spec.n_img, o.nimg);
  set_if(spec.frames, o.frames);
  set_if(spec.trials, o.trials);
  set_if(spec.master_seed, o.seed);
  set_if(spec.out, o.out);
  set_if(spec.threads, o.threads);
  spec.validate();
  return spec;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw qisim::IoError("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw qisim::IoError("write failed for " + path.string());
}

std::filesystem::path manifest_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".manifest.json");
  return p;
}

void dump_frame(const qisim::SweepSpec& spec, const std::string& path) {
  const auto kind = spec.source_kinds().front();
  const auto setup = spec.frame_setup(0, spec.nb_grid().front(), kind,
                                      qisim::Hypothesis::TargetPresent);
  const qisim::Frame frame = qisim::simulate_frame(setup, 0);
  qisim::write_frame_csv(frame, setup.src, setup.effective_detection(), path);
}

int run(const std::string& command, const Overrides& o) {
  const qisim::SweepSpec spec = build_spec(o);
  if (o.dump_frame) dump_frame(spec, *o.dump_frame);
  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  if (command == "validate") {
    const qisim::ValidationReport report = qisim::run_validate(spec);
    nlohmann::ordered_json checks = nlohmann::ordered_json::array();
    for (const auto& c : report.checks) {
      std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    if (!spec.out.empty()) {
      auto manifest = qisim::make_manifest(spec, command, nullptr, elapsed());
      manifest["checks"] = checks;
      manifest["passed"] = report.passed();
      write_text(spec.out, manifest.dump(2) + "\n");
    }
    return report.passed() ? kExitOk : kExitValidation;
  }

  qisim::SweepResult result;
  if (command == "nrf") result = qisim::run_nrf_sweep(spec);
  else if (command == "epsilon") result = qisim::run_epsilon_sweep(spec);
  else if (command == "snr") result = qisim::run_snr_sweep(spec);
  else result = qisim::run_perr_sweep(spec);

  const std::string csv = qisim::to_csv(result);
  if (spec.out.empty()) {
    std::cout << csv;
  } else {
    write_text(spec.out, csv);
    write_text(manifest_path(spec.out),
               qisim::make_manifest(spec, command, &result, elapsed()).dump(2) + "\n");
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo and theory for photon-counting quantum illumination"};
  app.require_subcommand(1);
  app.fallthrough();

  Overrides o;
  app.add_option("--source", o.source, "Correlated source: twb, thermal or both");
  app.add_option("--mu", o.mu, "Mean photons per mode");
  app.add_option("--modes", o.modes, "Modes per pixel (M)");
  app.add_option("--eta1", o.eta1, "Ancilla arm efficiency");
  app.add_option("--eta2", o.eta2, "Probe arm efficiency including the target");
  app.add_option("--nb-min", o.nb_min, "Smallest background level");
  app.add_option("--nb-max", o.nb_max, "Largest background level");
  app.add_option("--nb-points", o.nb_points, "Number of background levels");
  app.add_option("--mb", o.mb, "Background modes (M_b)");
  app.add_option("--npix", o.npix, "Pixel pairs per frame");
  app.add_option("--nimg", o.nimg, "Images per decision (error probability)");
  app.add_option("--frames", o.frames, "Frames per grid point for moment estimators");
  app.add_option("--trials", o.trials, "Trial groups for the error probability");
  app.add_option("--seed", o.seed, "Master seed");
  app.add_option("--out", o.out, "Output CSV path (stdout when omitted)");
  app.add_option("--threads", o.threads, "OpenMP threads (0: default)");
  app.add_option("--config", o.config, "JSON config; command-line flags override it");
  app.add_option("--dump-frame", o.dump_frame,
                 "Write the first frame of the first grid point as CSV + JSON sidecar");

  std::string command;
  for (const char* name : {"nrf", "epsilon", "snr", "perr", "validate"}) {
    app.add_subcommand(name)->callback([&command, name] { command = name; });
  }
  app.get_subcommand("nrf")->description("Noise reduction factor versus background");
  app.get_subcommand("epsilon")->description("Cauchy-Schwarz parameter versus background");
  app.get_subcommand("snr")->description("Covariance SNR versus background");
  app.get_subcommand("perr")->description("Target-detection error probability versus background");
  app.get_subcommand("validate")->description("Theory versus Monte Carlo cross-checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    return run(command, o);
  } catch (const qisim::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}
