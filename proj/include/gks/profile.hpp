#pragma once

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "gks/model.hpp"

namespace gks {

/// Point where the constant state u0 loses stability to a periodic pattern:
/// the linearization mu^3 + eps mu^2 + delta mu + (f'(u0) - c) has roots +-i k.
struct HopfSeed {
  double k_hopf = 1.0;
  double c_hopf = 0.0;
  double u0 = 0.0;
  double amplitude = 1e-2;

  double omega_hopf() const { return k_hopf / kTwoPi; }
};

/// Throws NoHopfPoint when delta <= 0.
HopfSeed hopf_seed(const ModelParams& params, double u0, double amplitude = 1e-2);

/// Translation gauge used to make the Newton system square.
enum class Gauge {
  Cosine,  // Im u_1 = 0
  Slope,   // u'(0) = 0
};

const char* to_string(Gauge gauge);

struct SolverOptions {
  int modes = 32;
  int max_modes = 256;
  int max_iterations = 50;
  double update_tol = 1e-11;
  double residual_tol = 1e-10;
  double tail_tol = 1e-12;
  double trivial_tol = 1e-10;
  Gauge gauge = Gauge::Cosine;
};

struct SolveReport {
  int iterations = 0;
  int modes = 0;
  double residual = 0.0;
};

/// Newton iteration on the Galerkin-truncated integrated profile equation at
/// fixed (c, omega); the unknowns are the Fourier modes and q. The mode count
/// is doubled until the spectral tail falls below `tail_tol`.
PeriodicWave solve_profile(const PeriodicWave& guess, const ModelParams& params, double c, double omega,
                           const SolverOptions& options = {}, SolveReport* report = nullptr);

/// Same system with omega freed and Re u_1 = amplitude / 2 pinned instead;
/// regular through the Hopf point, so it is how branches are started.
PeriodicWave solve_at_amplitude(const PeriodicWave& guess, const ModelParams& params, double c,
                                double amplitude, const SolverOptions& options = {},
                                SolveReport* report = nullptr);

/// u0 + A cos(k x) at the Hopf speed, with q = f(u0) - c u0.
PeriodicWave seed_guess(const HopfSeed& seed, const ModelParams& params, int modes);

/// Converged small-amplitude wave on the branch emanating from `seed`.
PeriodicWave wave_near_hopf(const HopfSeed& seed, const ModelParams& params,
                            const SolverOptions& options = {});

struct PathOptions {
  SolverOptions solver;
  int max_halvings = 5;
  /// Largest step taken along a straight path in (c, omega).
  double max_step = 2e-3;
};

/// Natural-parameter continuation along the straight segment from the wave's
/// own (c, omega) to (c, omega) = target. Throws NoConvergence when a step
/// fails after `max_halvings` bisections.
PeriodicWave march(const PeriodicWave& start, const ModelParams& params, double c_target,
                   double omega_target, const PathOptions& options = {});

/// Seed at the Hopf point of u0, then march to (c, omega).
PeriodicWave solve_from_hopf(const ModelParams& params, double u0, double c, double omega,
                             const PathOptions& options = {});

// ---------------------------------------------------------------------------
// Families

struct FamilyGrid {
  std::vector<double> c_values;
  std::vector<double> omega_values;

  /// Throws InvalidArgument unless both lists are nonempty and strictly increasing.
  void validate() const;
  double c_step() const;
  double omega_step() const;
};

struct FamilyNode {
  double c = 0.0;
  double omega = 0.0;
  std::optional<PeriodicWave> wave;
  std::string failure;
};

struct WaveFamily {
  ModelParams params;
  FamilyGrid grid;
  /// Row-major: index = ic * omega_values.size() + iw.
  std::vector<FamilyNode> nodes;
  Gauge gauge = Gauge::Cosine;

  int n_c() const { return static_cast<int>(grid.c_values.size()); }
  int n_omega() const { return static_cast<int>(grid.omega_values.size()); }
  const FamilyNode& at(int ic, int iw) const { return nodes.at(ic * n_omega() + iw); }
  FamilyNode& at(int ic, int iw) { return nodes.at(ic * n_omega() + iw); }
  int converged_count() const;
};

struct ContinuationOptions {
  PathOptions path;
  /// Independent c-lines are continued on this many threads.
  int workers = 1;
};

/// Fill the (c, omega) grid by warm-started continuation from `start`.
/// Nodes that cannot be reached are kept with a failure annotation.
WaveFamily continue_family(const PeriodicWave& start, const ModelParams& params, const FamilyGrid& grid,
                           const ContinuationOptions& options = {});

// ---------------------------------------------------------------------------
// Period map

struct PeriodMapReport {
  Eigen::Matrix<double, 3, 6> jacobian;
  std::array<double, 3> singular_values{};
  bool full_rank = false;
  double threshold = 0.0;
  /// H at the wave's own data.
  std::array<double, 3> return_mismatch{};
};

struct PeriodMapOptions {
  int steps = 20000;
  double fd_step = 1e-6;
  double rank_rtol = 1e-6;
};

/// H(X, c, q, b) = (u, u', u'')(X) - b for the first-order form of the
/// profile ODE, integrated with fixed-step RK4.
std::array<double, 3> period_map(const ModelParams& params, double X, double c, double q,
                                 const std::array<double, 3>& b, int steps);

/// Finite-difference Jacobian of H at the wave and its singular values.
PeriodMapReport check_H2(const PeriodicWave& wave, const ModelParams& params,
                         const PeriodMapOptions& options = {});

}  // namespace gks
