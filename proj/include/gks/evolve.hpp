#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gks/bloch.hpp"
#include "gks/model.hpp"

namespace gks {

struct SimConfig {
  int n_periods = 128;
  int n_grid = 8192;
  double dt = 0.05;
  double T_final = 500.0;
  /// Times at which the field is stored; the initial field is always stored.
  std::vector<double> snapshot_times;
  bool dealias = true;
  double blowup_threshold = 1e6;

  /// Throws InvalidArgument on an under-resolved grid or a step the explicit
  /// nonlinear stages cannot take.
  void validate(const PeriodicWave& wave, const ModelParams& params) const;
};

/// `count` times spread geometrically over [t_min, t_max], plus t_max.
std::vector<double> geometric_times(double t_min, double t_max, int count);

struct Trajectory {
  double length = 0.0;  // n_periods * X
  double c = 0.0;       // speed of the frame
  int n_periods = 0;
  std::vector<double> times;
  std::vector<std::vector<double>> fields;
};

/// ETDRK4 in the frame moving with the wave: the linear symbol
/// -k^4 + i eps k^3 + delta k^2 + i c k is integrated exactly, -(f(u))_x
/// explicitly with dealiased products. Throws InstabilityAbort when
/// max |u| exceeds the blow-up threshold.
Trajectory simulate(const PeriodicWave& wave, const ModelParams& params, const std::vector<double>& initial,
                    const SimConfig& config);

/// The wave repeated n_periods times on n_grid points.
std::vector<double> tile_wave(const PeriodicWave& wave, int n_periods, int n_grid);

enum class BumpKind { Gaussian, Compact };

struct Perturbation {
  std::vector<double> field;  // wave train plus bump
  double center = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double Linf = 0.0;
};

/// Gaussian: amplitude * exp(-(x - x0)^2 / (2 width^2)). Compact:
/// amplitude * exp(1 - 1 / (1 - r^2)), r = (x - x0) / width, zero for |r| >= 1.
/// x0 defaults to the middle of the domain.
Perturbation perturb(const PeriodicWave& wave, const ModelParams& params, int n_periods, int n_grid, BumpKind kind,
                     double amplitude, double width, std::optional<double> center = std::nullopt);

/// Phase psi on the lattice of maxima of the unperturbed train, so that
/// u(x) ~ wave(x - psi(x)).
struct PhaseField {
  double X = 0.0;
  double length = 0.0;
  std::vector<double> nodes;  // unperturbed maxima
  std::vector<double> psi;

  /// Periodic piecewise-linear interpolation.
  double at(double x) const;
  /// Centered differences on the nodes.
  std::vector<double> gradient() const;
};

/// Location of the largest maximum of the wave in [0, X).
double wave_maximum(const PeriodicWave& wave);

/// Throws TrackingFailure naming the cells whose maximum is missing or sits
/// on the edge of its search window.
PhaseField extract_phase(const std::vector<double>& snapshot, const PeriodicWave& wave, int n_periods);

struct ExponentFit {
  /// Decay rate r in norm ~ C (1 + t)^{-r}.
  double rate = 0.0;
  double std_error = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int samples = 0;
};

struct PulseTrack {
  std::vector<double> times;
  std::array<std::vector<double>, 2> centers;
  std::array<std::vector<double>, 2> widths_squared;
  std::array<std::vector<double>, 2> amplitudes;
  std::array<double, 2> speed{};
  std::array<double, 2> width_slope{};  // d(w^2)/dt, compare with 4 b_j
  std::array<double, 2> p{};            // amplitude at the last fitted time
  double t_first = 0.0;
  double t_last = 0.0;
};

struct DecayOptions {
  /// Fit window; t_lo defaults to the separation time of the pulses.
  std::optional<double> t_lo;
  std::optional<double> t_hi;
  /// Perturbation center; defaults to the middle of the domain.
  std::optional<double> center;
  /// Initial squared pulse width added to the 4 b t guess.
  double initial_width_squared = 0.0;
};

struct EvolutionReport {
  std::vector<double> times;
  std::vector<double> residual_L2;
  std::vector<double> residual_Linf;
  std::vector<double> unmodulated_Linf;
  std::vector<double> psi_Linf;
  std::vector<PhaseField> psi;
  ExponentFit linf;
  ExponentFit l2;
  PulseTrack pulses;
  /// Predicted time at which the two pulses are resolved.
  double separation_time = 0.0;
  std::vector<std::string> warnings;
};

struct ResidualSeries {
  std::vector<double> times;
  /// NaN where the phase could not be tracked.
  std::vector<double> residual_L2;
  std::vector<double> residual_Linf;
  std::vector<double> unmodulated_Linf;
  std::vector<double> psi_Linf;
  std::vector<std::optional<PhaseField>> psi;
  std::vector<std::string> tracking_failures;

  /// max over 0 < t <= t_max of residual_Linf(t) / residual_Linf(0); NaN
  /// samples are skipped.
  double growth(double t_max) const;
};

ResidualSeries measure_residuals(const Trajectory& trajectory, const PeriodicWave& wave);

/// Residuals against the modulated and unmodulated train, log-log decay
/// fits and a two-Gaussian fit of psi_x per snapshot.
EvolutionReport measure_decay(const Trajectory& trajectory, const PeriodicWave& wave, const ModelParams& params,
                              const CriticalFit& fit, const DecayOptions& options = {});

/// Least-squares slope of log(y) on log(1 + t) over t_lo <= t <= t_hi.
ExponentFit fit_decay_exponent(const std::vector<double>& times, const std::vector<double>& values, double t_lo,
                               double t_hi);

}  // namespace gks
