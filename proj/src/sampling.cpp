#include "qisim/sampling.hpp"

#include <array>
#include <string>

namespace qisim {

std::string_view to_string(SourceKind kind) {
  return kind == SourceKind::TwinBeam ? "twb" : "thermal";
}

SourceKind source_kind_from_string(std::string_view name) {
  if (name == "twb") return SourceKind::TwinBeam;
  if (name == "thermal") return SourceKind::SplitThermal;
  throw InvalidParameter("unknown source kind '" + std::string(name) + "'");
}

void SourceParams::validate() const {
  require(std::isfinite(mu) && mu >= 0.0, "source mu must be finite and >= 0");
  require(modes_m >= 1, "source mode count must be >= 1");
}

void BackgroundParams::validate() const {
  require(modes_mb >= 1, "background mode count must be >= 1");
  require(std::isfinite(mean_nb) && mean_nb >= 0.0,
          "background mean must be finite and >= 0");
}

namespace detail {

namespace {

constexpr Count kTableSize = 256;

std::array<double, kTableSize> make_log_factorial_table() {
  std::array<double, kTableSize> table{};
  double acc = 0.0;
  for (Count k = 1; k < kTableSize; ++k) {
    acc += std::log(static_cast<double>(k));
    table[static_cast<std::size_t>(k)] = acc;
  }
  return table;
}

const std::array<double, kTableSize> kLogFactorial = make_log_factorial_table();

}  // namespace

double log_factorial(Count k) {
  if (k < kTableSize) return kLogFactorial[static_cast<std::size_t>(k)];
  // Stirling series; truncation error below 1e-17 for k >= 256.
  const double x = static_cast<double>(k) + 1.0;
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return (x - 0.5) * std::log(x) - x + 0.91893853320467274178 +
         inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 / 1260.0));
}

}  // namespace detail

}  // namespace qisim
