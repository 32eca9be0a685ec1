#include "qisim/detection.hpp"

#include <fstream>

#include <json.hpp>

namespace qisim {

void DetectionParams::validate() const {
  require(eta1 >= 0.0 && eta1 <= 1.0, "eta1 must lie in [0, 1]");
  require(eta2 >= 0.0 && eta2 <= 1.0, "eta2 must lie in [0, 1]");
}

void write_frame_csv(const Frame& frame, const SourceParams& src,
                     const DetectionParams& det, const std::filesystem::path& path) {
  std::ofstream csv(path);
  if (!csv) throw IoError("cannot open " + path.string() + " for writing");
  csv << "pixel_index,n1,n2\n";
  for (std::size_t p = 0; p < frame.size(); ++p) {
    csv << p << ',' << frame.n1[p] << ',' << frame.n2[p] << '\n';
  }
  if (!csv) throw IoError("write failed for " + path.string());

  nlohmann::ordered_json sidecar;
  sidecar["n_pix"] = frame.size();
  sidecar["source"] = std::string(to_string(frame.meta.kind));
  sidecar["mu"] = src.mu;
  sidecar["modes_m"] = src.modes_m;
  sidecar["eta1"] = det.eta1;
  sidecar["eta2"] = det.eta2;
  sidecar["target_present"] = frame.meta.target_present;
  sidecar["modes_mb"] = frame.meta.background.modes_mb;
  sidecar["mean_nb"] = frame.meta.background.mean_nb;
  sidecar["stream_key"] = frame.meta.stream_key;

  const std::filesystem::path side_path = path.string() + ".json";
  std::ofstream side(side_path);
  if (!side) throw IoError("cannot open " + side_path.string() + " for writing");
  side << sidecar.dump(2) << '\n';
  if (!side) throw IoError("write failed for " + side_path.string());
}

}  // namespace qisim
