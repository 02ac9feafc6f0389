#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gks/bloch.hpp"
#include "gks/evolve.hpp"
#include "gks/model.hpp"
#include "gks/profile.hpp"
#include "gks/whitham.hpp"

namespace gks {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct WaveRecord {
  PeriodicWave wave;
  ModelParams params;
};

json wave_to_json(const PeriodicWave& wave, const ModelParams& params);
WaveRecord wave_from_json(const json& doc);
void save_wave(const fs::path& path, const PeriodicWave& wave, const ModelParams& params);
WaveRecord load_wave(const fs::path& path);

/// Directory with one wave file per converged node and index.json.
void save_family(const fs::path& dir, const WaveFamily& family);
WaveFamily load_family(const fs::path& dir);

/// Columns xi, re_lambda, im_lambda, surface_id.
void write_spectrum_csv(std::ostream& out, const BlochSpectrum& spectrum);
json fit_to_json(const CriticalFit& fit);
json verdict_to_json(const StabilityVerdict& verdict);
json spectrum_summary(const BlochSpectrum& spectrum, const CriticalFit* fit, const StabilityVerdict& verdict);
json band_to_json(const BandReport& report);

/// One row per family node with Whitham data; Bloch columns are filled from
/// `band` where the node was classified.
struct WhithamRow {
  double omega = 0.0;
  double c = 0.0;
  double M = 0.0;
  double F = 0.0;
  double speed1 = 0.0;
  double speed2 = 0.0;
  bool hyperbolic = false;
  double a1 = 0.0;
  double a2 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
  double dH = 0.0;
  std::string verdict;
};
void write_whitham_csv(std::ostream& out, const std::vector<WhithamRow>& rows);

json evolution_to_json(const EvolutionReport& report);
/// Columns t, residual_L2, residual_Linf, unmodulated_Linf, psi_Linf.
void write_timeseries_csv(std::ostream& out, const EvolutionReport& report);

/// Raw little-endian float64 samples at `base`.bin and a JSON sidecar at
/// `base`.json recording grid, time and frame.
void save_snapshot(const fs::path& base, const std::vector<double>& field, double length, double time,
                   double frame_speed);
std::vector<double> load_snapshot(const fs::path& base);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace gks
