#pragma once

#include <Eigen/Dense>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gks/model.hpp"
#include "gks/profile.hpp"

namespace gks {

/// Largest |k| with |u_k| above `rtol` times the largest coefficient.
int effective_bandwidth(const PeriodicWave& wave, double rtol = 1e-15);

/// Fourier-Galerkin truncation of the Bloch operator
///   L_xi v = e^{-i xi x} [((c - f'(u)) w)_x - w'''' - eps w''' - delta w''],  w = e^{i xi x} v
/// on modes |j| <= n_hill. Row j, column l carries
///   delta_jl (-k_j^4 + i eps k_j^3 + delta k_j^2 + i c k_j) - i k_j a_{j-l},
/// k_j = xi + 2 pi j / X, a = f'(u). Throws Truncation when n_hill is below
/// twice the effective bandwidth of the wave.
Eigen::MatrixXcd assemble_hill_matrix(const PeriodicWave& wave, const ModelParams& params, double xi, int n_hill);

/// Fourier coefficients a_0..a_{2N} of f'(u) for the wave.
std::vector<cplx> linearization_coefficients(const PeriodicWave& wave, const ModelParams& params);

/// The two eigenvalues nearest the origin at one Bloch parameter, refined on
/// their joint invariant subspace, with unit right eigenvectors.
struct CriticalPair {
  double xi = 0.0;
  std::array<cplx, 2> lambda{};
  std::array<Eigen::VectorXcd, 2> vectors;
};

struct ZeroModeDiagnostics {
  bool computed = false;
  /// Three smallest |lambda| of L_0.
  std::array<double, 3> smallest_moduli{};
  /// Two smallest singular values of the row-equilibrated L_0 Hill matrix.
  double s_min = 0.0;
  double s_next = 0.0;
  /// ||L_0 u'|| / ||u'||.
  double translation_residual = 0.0;
};

struct BlochSpectrum {
  std::vector<double> xi;
  /// Per xi, sorted by descending real part (ties by imaginary part).
  std::vector<std::vector<cplx>> eigenvalues;
  /// Index into xi -> failure message, for nodes where the eigensolver failed.
  std::map<int, std::string> failures;
  std::vector<CriticalPair> critical;
  ZeroModeDiagnostics zero;
  int n_hill = 0;
  double X = 0.0;
  double track_radius = 0.0;
  std::string wave_id;
};

struct BlochOptions {
  int n_hill = 48;
  /// Critical pairs are stored for |xi| <= track_fraction * pi / X.
  double track_fraction = 0.1;
  int workers = 1;
};

/// Uniform grid on [-pi/X, pi/X) plus geometric clustering toward 0 so that
/// |xi| reaches 1e-3 pi / X; always contains 0.
std::vector<double> default_xi_grid(double X, int n_uniform = 64, int n_cluster = 12);

BlochSpectrum compute_bloch_eigs(const PeriodicWave& wave, const ModelParams& params,
                                 const std::vector<double>& xi_grid, const BlochOptions& options = {});

/// lambda_j(xi) ~ -i a_j xi - b_j xi^2 near xi = 0 for the two critical curves.
struct CriticalFit {
  std::array<double, 2> a{};
  std::array<double, 2> b{};
  /// Higher-order terms of the fitted model, per curve: Re part uses xi^3, xi^4
  /// and Im part xi^3.
  std::array<std::array<double, 3>, 2> higher{};
  double fit_residual = 0.0;
  double xi_fit_radius = 0.0;
  /// Separate first-order fits from xi > 0 and xi < 0 data.
  std::array<double, 2> a_positive{};
  std::array<double, 2> a_negative{};

  /// Model evaluation for curve j.
  cplx model(int j, double xi) const;
};

/// Curves are followed outward from the smallest |xi| by eigenvector overlap
/// and joined across xi = 0 by their transport speed. Throws FitAmbiguity when
/// overlaps do not single out a partner.
CriticalFit fit_critical_expansion(const BlochSpectrum& spectrum, std::optional<double> xi_fit_radius = std::nullopt);

struct StabilityVerdict {
  bool D1 = false;
  bool D2 = false;
  double theta = 0.0;
  bool D3 = false;
  bool H3 = false;
  bool H4 = false;
  std::map<std::string, double> margins;

  bool stable() const { return D1 && D2 && D3 && H3 && H4; }
};

struct VerdictOptions {
  double zero_accept = 1e-6;
  double zero_separate = 1e-3;
  double stable_margin = 1e-10;
  double kernel_tol = 1e-8;
  double distinct_rtol = 1e-6;
};

/// Throws InsufficientResolution when the grid misses xi = 0 or does not come
/// within 1e-3 pi / X of it.
StabilityVerdict verify_conditions(const BlochSpectrum& spectrum, const CriticalFit& fit,
                                   const VerdictOptions& options = {});

/// Verdict for a spectrum whose critical curves could not be fitted: D1 and
/// D2 are still decided (the excluded neighborhood is the tracked radius),
/// H3 is reported false.
StabilityVerdict verify_conditions_unfitted(const BlochSpectrum& spectrum, const VerdictOptions& options = {});

/// Eigenvalues of the linearized operator with Bloch boundary condition
/// v(X) = e^{i xi X} v(0), by fourth-order centered differences on
/// `points` nodes. Independent of the Hill discretization; test oracle.
std::vector<cplx> oracle_fd_spectrum(const PeriodicWave& wave, const ModelParams& params, double xi, int points);

// ---------------------------------------------------------------------------

struct BandNode {
  double c = 0.0;
  double omega = 0.0;
  bool classified = false;
  std::string error;
  StabilityVerdict verdict;
  CriticalFit fit;
  double max_real_part = 0.0;  // largest Re lambda over the grid, excluding the xi = 0 pair
  bool fitted = false;
  std::string fit_error;
};

struct StableInterval {
  double omega_lo = 0.0;
  double omega_hi = 0.0;
  /// Bracketing unstable/unclassified neighbors (NaN at the family boundary).
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int nodes = 0;
};

struct BandReport {
  std::vector<BandNode> nodes;
  /// Maximal runs of stable nodes along omega, per c-line.
  std::map<double, std::vector<StableInterval>> stable_intervals;
};

struct BandOptions {
  BlochOptions bloch;
  int n_uniform = 64;
  int n_cluster = 12;
  VerdictOptions verdict;
  int workers = 1;
};

BandReport scan_band(const WaveFamily& family, const BandOptions& options = {});

}  // namespace gks
