#pragma once

// Parameter sweeps over the background level, validation runs and their
// serialization. Everything here is a deterministic function of the
// SweepSpec (including master_seed), independent of the OpenMP thread count.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "qisim/detection.hpp"
#include "qisim/kernels.hpp"
#include "qisim/sampling.hpp"

namespace qisim {

enum class SourceSelection { TwinBeam, SplitThermal, Both };

SourceSelection source_selection_from_string(const std::string& name);
std::string to_string(SourceSelection sel);

struct SweepSpec {
  // Background grid: explicit values win; otherwise built from min/max/points.
  std::vector<double> nb_values;
  double nb_min = 0.0;
  double nb_max = 5000.0;
  std::size_t nb_points = 12;

  SourceSelection sources = SourceSelection::Both;
  double mu = 0.075;
  Count modes_m = 90000;
  double eta1 = 0.4;
  double eta2 = 0.2;
  Count modes_mb = 1300;
  std::size_t n_pix = 80;
  std::size_t n_img = 10;
  std::size_t frames = 2000;
  std::size_t trials = 200;
  std::uint64_t master_seed = 1;
  std::string out;
  int threads = 0;  // 0: OpenMP default

  void validate() const;

  /// The background grid. With nb_min == 0 the first point is 0 and the
  /// remaining nb_points - 1 are log-spaced on [1, nb_max].
  std::vector<double> nb_grid() const;

  std::vector<SourceKind> source_kinds() const;
  SourceParams source(SourceKind kind) const;
  DetectionParams detection() const;
  BackgroundParams background(double nb) const;
  FrameSetup frame_setup(std::size_t grid_index, double nb, SourceKind kind,
                         Hypothesis hyp) const;
};

// Applies the keys of a JSON object onto `spec`; unknown keys are rejected.
void apply_json(SweepSpec& spec, const nlohmann::json& config);
nlohmann::ordered_json to_json(const SweepSpec& spec);

struct SweepRecord {
  std::size_t grid_index = 0;
  double nb = 0.0;
  SourceKind source = SourceKind::TwinBeam;
  std::vector<double> values;  // aligned with SweepResult::columns
};

struct SweepResult {
  std::string name;
  std::vector<std::string> columns;
  std::vector<SweepRecord> records;

  // Value of `column` in `record`; throws on an unknown column.
  double value(const SweepRecord& record, const std::string& column) const;
};

SweepResult run_nrf_sweep(const SweepSpec& spec);
SweepResult run_epsilon_sweep(const SweepSpec& spec);
SweepResult run_snr_sweep(const SweepSpec& spec);
SweepResult run_perr_sweep(const SweepSpec& spec);

struct ValidationCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool passed() const;
};

// Oracle-versus-Monte-Carlo and enumeration cross-checks. Uses the spec's
// frames, n_pix, modes_mb and seed; the parameter grid is fixed.
ValidationReport run_validate(const SweepSpec& spec);

// CSV: header row, fixed column order, shortest round-trip number format.
void write_csv(const SweepResult& result, std::ostream& os);
std::string to_csv(const SweepResult& result);

nlohmann::ordered_json make_manifest(const SweepSpec& spec, const std::string& command,
                                     const SweepResult* result, double wall_time_s);

std::string format_number(double v);

inline constexpr const char* kVersion = "1.0.0";

}  // namespace qisim
