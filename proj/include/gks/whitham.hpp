#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <vector>

#include "gks/bloch.hpp"
#include "gks/model.hpp"
#include "gks/profile.hpp"

namespace gks {

struct Averages {
  double M = 0.0;  // mean of u
  double F = 0.0;  // mean of f(u)
};

/// Exact for polynomial f: F is the zeroth mode of f(u) on a dealiased grid.
Averages averaged_quantities(const PeriodicWave& wave, const ModelParams& params);

/// A partial derivative estimated from family nodes.
struct Partial {
  double value = 0.0;
  double step = 0.0;
  /// |centered(h) - centered(2h)| / 3 when the wider stencil exists, else NaN.
  double error = 0.0;
};

struct AveragedData {
  double c = 0.0;
  double omega = 0.0;
  double M = 0.0;
  double F = 0.0;
  Partial M_c, M_omega, F_c, F_omega;
};

struct DifferenceOptions {
  /// Combine the h and 2h centered stencils when both are available.
  bool richardson = false;
};

/// Centered differences over the family grid at node (ic, iw). Throws
/// TooFewNodes unless all four nearest neighbors converged.
AveragedData averaged_data(const WaveFamily& family, int ic, int iw, const DifferenceOptions& options = {});

struct WhithamCharacteristics {
  double c = 0.0;
  double omega = 0.0;
  /// A (c, omega)_t + B (c, omega)_x = 0.
  Eigen::Matrix2d A;
  Eigen::Matrix2d B;
  double discriminant = 0.0;
  bool hyperbolic = false;
  /// Eigenvalues of A^{-1} B, ascending by real part. Lab frame.
  std::array<cplx, 2> eigenvalues{};
  /// Real parts of the eigenvalues, ascending.
  std::array<double, 2> speeds{};
  /// Speeds relative to the wave, comparable to the Bloch coefficients a_j.
  std::array<double, 2> comoving_speeds{};
  /// Spread of the speeds between the h and 2h stencils, NaN when unavailable.
  double speed_error = 0.0;
};

/// Throws DegenerateParametrization when |det A| < 1e-12 max(1, |A|).
WhithamCharacteristics characteristics_from(const AveragedData& data);

WhithamCharacteristics whitham_characteristics(const WaveFamily& family, int ic, int iw,
                                               const DifferenceOptions& options = {});

/// Characteristics at every interior node; nodes lacking neighbors are skipped.
struct WhithamNode {
  int ic = 0;
  int iw = 0;
  AveragedData data;
  WhithamCharacteristics chars;
};
std::vector<WhithamNode> whitham_table(const WaveFamily& family, const DifferenceOptions& options = {});

// ---------------------------------------------------------------------------
// Zero-speed reduction for f = u^2 / 2

struct ReducedKSNode {
  double omega = 0.0;
  double m = 0.0;   // mean of u
  double H = 0.0;   // mean of u^2 / 2
  double dm = 0.0;  // d/d omega
  double dH = 0.0;
  bool has_derivatives = false;
  /// dH < 0.
  bool dH_negative = false;
  /// Linearized phase equation psi_tt - omega H' psi_xx = 0 is a wave equation
  /// (omega H' > 0 when m is constant).
  bool wave_equation = false;
};

struct ReducedKS {
  double omega_step = 0.0;
  std::vector<ReducedKSNode> nodes;
};

/// Reads the c = 0 line of the family. Throws InvalidArgument unless f is
/// u^2 / 2 and the line exists, TooFewNodes when fewer than 3 nodes converged.
ReducedKS reduced_ks_scan(const WaveFamily& family);

/// Lab-frame characteristic speeds at speed c from the zero-speed data:
/// eigenvalues of [[c + m - omega m', H'], [omega, c]].
std::array<cplx, 2> reduced_characteristics(const ReducedKSNode& node, double c);

// ---------------------------------------------------------------------------

struct ViscoelasticReport {
  double b_asymmetry = 0.0;  // |b1 - b2| / max(b1, b2)
  double d = 0.0;            // b1 + b2
  /// Second-order coefficients predicted by the damped wave equation
  /// lambda^2 + lambda (i S xi + d xi^2) - P xi^2 = 0, S, P from the Whitham
  /// speeds; compared with -b_j.
  std::array<double, 2> predicted_b{};
  double relative_error = 0.0;
  bool pass = false;
};

ViscoelasticReport viscoelastic_check(const CriticalFit& fit, const WhithamCharacteristics& chars,
                                      double epsilon, double tolerance = 1e-2);

/// Image of the family under u -> u + sigma, c -> c + sigma (f = u^2 / 2).
WaveFamily galilean_shift(const WaveFamily& family, double sigma);

}  // namespace gks
