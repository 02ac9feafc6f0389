// Acceptance checks, one PASS/FAIL line per criterion. Exit status is 0 when
// every criterion not listed with --known-red passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gks/bloch.hpp"
#include "gks/error.hpp"
#include "gks/evolve.hpp"
#include "gks/whitham.hpp"
#include "waves.hpp"

using namespace gks;
using gks::testing::constant_state;
using gks::testing::mid_band_wave;
using gks::testing::params_at;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

cplx nearest(const std::vector<cplx>& pool, cplx z) {
  cplx best = pool.front();
  for (cplx p : pool)
    if (std::abs(p - z) < std::abs(best - z)) best = p;
  return best;
}

// Pinned sweep: the zero-speed line of the epsilon family, 30 frequencies.
FamilyGrid sweep_grid(bool with_c_lines) {
  FamilyGrid g;
  g.c_values = with_c_lines ? std::vector<double>{-0.02, -0.01, 0.0, 0.01, 0.02} : std::vector<double>{0.0};
  const int n = 30;
  for (int i = 0; i < n; ++i) g.omega_values.push_back(0.0975 + (0.155 - 0.0975) * i / (n - 1));
  return g;
}

WaveFamily sweep_family(double epsilon, bool with_c_lines) {
  const ModelParams p = params_at(epsilon);
  return continue_family(solve_from_hopf(p, 0.0, 0.0, 0.126), p, sweep_grid(with_c_lines));
}

WaveFamily zero_speed_line(const WaveFamily& fam) {
  WaveFamily line;
  line.params = fam.params;
  line.gauge = fam.gauge;
  line.grid.c_values = {0.0};
  line.grid.omega_values = fam.grid.omega_values;
  const auto& cs = fam.grid.c_values;
  const int ic = static_cast<int>(std::find(cs.begin(), cs.end(), 0.0) - cs.begin());
  for (int iw = 0; iw < fam.n_omega(); ++iw) line.nodes.push_back(fam.at(ic, iw));
  return line;
}

BandReport scan(const WaveFamily& line, int n_hill) {
  BandOptions opt;
  opt.bloch.n_hill = n_hill;
  return scan_band(line, opt);
}

const BandNode* node_at(const BandReport& band, double omega) {
  for (const BandNode& n : band.nodes)
    if (n.omega == omega) return &n;
  return nullptr;
}

// ---------------------------------------------------------------------------

Outcome constant_state_symbol() {
  const ModelParams p = params_at(0.2);
  double worst = 0.0;
  int compared = 0;
  for (double u0 : {0.0, 0.4}) {
    const double X = 1.0 / 0.13;
    const PeriodicWave w = constant_state(u0, X);
    BlochOptions opt;
    opt.n_hill = 16;
    const std::vector<double> xi{0.0, 0.3 * kPi / X, -0.7 * kPi / X};
    const BlochSpectrum s = compute_bloch_eigs(w, p, xi, opt);
    for (std::size_t i = 0; i < xi.size(); ++i)
      for (int j = -16; j <= 16; ++j) {
        const double k = xi[i] + kTwoPi * j / X;
        if (std::abs(k) > 10.0) continue;
        const cplx sym = -std::pow(k, 4) + cplx(0.0, p.epsilon * k * k * k) + p.delta * k * k +
                         cplx(0.0, (w.c() - p.f(u0, 1)) * k);
        worst = std::max(worst, std::abs(nearest(s.eigenvalues[i], sym) - sym) / std::max(1.0, std::abs(sym)));
        ++compared;
      }
  }
  return {worst <= 1e-10 && compared > 0,
          fmt("%d modes with |k| <= 10, max relative error %.2e (tol 1e-10)", compared, worst)};
}

Outcome profile_convergence() {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const double res = ode_residual(w, p);
  SolverOptions opt;
  opt.modes = 2 * w.N();
  const PeriodicWave fine = solve_profile(w.resized(2 * w.N()), p, w.c(), w.omega(), opt);
  const double dq = std::abs(fine.q() - w.q());
  return {res < 1e-10 && dq < 1e-9,
          fmt("omega = 0.126: residual %.2e (tol 1e-10), |q(N=%d) - q(N=%d)| = %.2e (tol 1e-9)", res, w.N(),
              fine.N(), dq)};
}

Outcome structural_conditions() {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const PeriodMapReport h2 = check_H2(w, p);

  const int n_hill = 48;
  const Eigen::MatrixXcd L0 = assemble_hill_matrix(w, p, 0.0, n_hill);
  Eigen::VectorXcd du = Eigen::VectorXcd::Zero(2 * n_hill + 1);
  for (int k = -w.N(); k <= w.N(); ++k) du[k + n_hill] = cplx(0.0, kTwoPi * k / w.X()) * w.mode(k);
  const double translation = (L0 * du).norm();

  const BlochSpectrum s = compute_bloch_eigs(w, p, default_xi_grid(w.X()));
  const auto zero = std::find(s.xi.begin(), s.xi.end(), 0.0) - s.xi.begin();
  int small = 0;
  for (cplx l : s.eigenvalues[zero]) small += std::abs(l) < 1e-6;
  const CriticalFit fit = fit_critical_expansion(s);
  const StabilityVerdict v = verify_conditions(s, fit);
  const double gap = std::abs(fit.a[0] - fit.a[1]);
  const bool pass = h2.full_rank && translation < 1e-8 && small == 2 && v.H4 && gap > 1e-6;
  return {pass, fmt("period map rank %s (sigma_min %.2e), ||L0 u'|| %.2e (tol 1e-8), %d eigenvalues with "
                    "|lambda| < 1e-6 (need 2), kernel dimension %s (s_min %.1e, s_next %.2e), |a1 - a2| %.3f",
                    h2.full_rank ? "3" : "<3", h2.singular_values[2], translation, small, v.H4 ? "1" : "!= 1",
                    s.zero.s_min, s.zero.s_next, gap)};
}

Outcome oracle_agreement() {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  double worst_rel = 0.0, worst_zero = 0.0;
  for (double xi : {0.0, 0.3 * kPi / w.X()}) {
    const auto fd = oracle_fd_spectrum(w, p, xi, 512);
    BlochOptions opt;
    opt.n_hill = 48;
    const BlochSpectrum s = compute_bloch_eigs(w, p, {xi}, opt);
    for (int i = 0; i < 6; ++i) {
      const cplx h = s.eigenvalues[0][i];
      const double diff = std::abs(nearest(fd, h) - h);
      if (xi == 0.0 && i < 2)
        worst_zero = std::max(worst_zero, diff);
      else
        worst_rel = std::max(worst_rel, diff / std::abs(h));
    }
  }
  return {worst_rel <= 1e-3 && worst_zero <= 1e-4,
          fmt("leading 6 eigenvalues, max relative difference %.2e (tol 1e-3), zero pair %.2e (tol 1e-4)", worst_rel,
              worst_zero)};
}

Outcome stable_band() {
  const WaveFamily line = sweep_family(0.2, false);
  const double step = line.grid.omega_step();
  const BandReport coarse = scan(line, 48);
  const BandReport fine = scan(line, 96);
  auto intervals = [](const BandReport& b) { return b.stable_intervals.count(0.0) ? b.stable_intervals.at(0.0) : std::vector<StableInterval>{}; };
  const auto a = intervals(coarse), b = intervals(fine);
  if (a.size() != 1 || b.size() != 1)
    return {false, fmt("%zu stable intervals at N_hill 48, %zu at 96 (need exactly 1)", a.size(), b.size())};
  auto unstable_end = [&](double omega) {
    const BandNode* n = node_at(coarse, omega);
    return n && n->classified && !n->verdict.stable();
  };
  const bool ends = unstable_end(a[0].bracket_lo) && unstable_end(a[0].bracket_hi);
  const double move = std::max(std::abs(a[0].omega_lo - b[0].omega_lo), std::abs(a[0].omega_hi - b[0].omega_hi));
  return {ends && move < step,
          fmt("stable omega in [%.5f, %.5f] (%d nodes), unstable neighbors %.5f and %.5f: %s; endpoint shift under "
              "N_hill 48 -> 96 %.2e (cell %.2e)",
              a[0].omega_lo, a[0].omega_hi, a[0].nodes, a[0].bracket_lo, a[0].bracket_hi, ends ? "yes" : "no", move,
              step)};
}

Outcome whitham_agreement() {
  const WaveFamily fam = sweep_family(0.2, true);
  const BandReport band = scan(zero_speed_line(fam), 48);
  const auto& cs = fam.grid.c_values;
  const int ic = static_cast<int>(std::find(cs.begin(), cs.end(), 0.0) - cs.begin());
  double worst = 0.0;
  int compared = 0;
  for (int iw = 0; iw < fam.n_omega(); ++iw) {
    const BandNode* n = node_at(band, fam.grid.omega_values[iw]);
    if (!n || !n->classified || !n->verdict.stable()) continue;
    const auto ch = whitham_characteristics(fam, ic, iw, {.richardson = true});
    auto a = n->fit.a;
    std::sort(a.begin(), a.end());
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(ch.comoving_speeds[j] - a[j]) / std::abs(a[j]));
    ++compared;
  }
  return {compared > 0 && worst <= 1e-2,
          fmt("%d stable nodes, max relative speed mismatch %.2e (tol 1e-2)", compared, worst)};
}

Outcome zero_dispersion_symmetry() {
  const WaveFamily fam = sweep_family(0.0, false);
  const BandReport band = scan(fam, 48);
  const ReducedKS red = reduced_ks_scan(fam);
  double worst_a = 0.0, worst_b = 0.0, max_dH = -INFINITY;
  int stable = 0, dH_negative = 0;
  for (const ReducedKSNode& r : red.nodes) {
    const BandNode* n = node_at(band, r.omega);
    if (!n || !n->classified || !n->verdict.stable()) continue;
    ++stable;
    const auto& f = n->fit;
    worst_a = std::max(worst_a, std::abs(f.a[0] + f.a[1]) / std::max(std::abs(f.a[0]), std::abs(f.a[1])));
    worst_b = std::max(worst_b, std::abs(f.b[0] - f.b[1]) / f.b[0]);
    if (r.has_derivatives) {
      dH_negative += r.dH < 0.0;
      max_dH = std::max(max_dH, r.dH);
    }
  }
  const bool symmetric = stable > 0 && worst_a <= 1e-6 && worst_b <= 1e-2;
  const bool sign = stable > 0 && dH_negative == stable;
  return {symmetric && sign,
          fmt("%d stable nodes: a1 = -a2 to %.1e (tol 1e-6), |b1 - b2|/b1 %.1e (tol 1e-2) -> %s; dH < 0 on %d of %d "
              "(largest dH %+.3f) -> %s",
              stable, worst_a, worst_b, symmetric ? "ok" : "violated", dH_negative, stable, max_dH,
              sign ? "ok" : "violated")};
}

Outcome decay_rates() {
  const ModelParams p = params_at(0.2);
  const PeriodicWave w = solve_from_hopf(p, 0.0, 0.0, 0.13);
  const CriticalFit fit = fit_critical_expansion(compute_bloch_eigs(w, p, default_xi_grid(w.X())));
  SimConfig cfg;
  cfg.n_periods = 128;
  cfg.n_grid = 8192;
  cfg.dt = 0.05;
  cfg.T_final = 500.0;
  cfg.snapshot_times = geometric_times(1.0, 500.0, 60);
  cfg.snapshot_times.push_back(50.0);
  std::sort(cfg.snapshot_times.begin(), cfg.snapshot_times.end());
  const double width = 2.0 * w.X();
  const Perturbation pert = perturb(w, p, cfg.n_periods, cfg.n_grid, BumpKind::Gaussian, 1e-2, width);
  const Trajectory traj = simulate(w, p, pert.field, cfg);
  DecayOptions opt;
  opt.t_lo = 50.0;
  opt.t_hi = 500.0;
  opt.initial_width_squared = 2.0 * width * width;
  const EvolutionReport r = measure_decay(traj, w, p, fit, opt);

  double psi50 = NAN, psi_max = 0.0;
  for (std::size_t i = 0; i < r.times.size(); ++i) {
    if (std::abs(r.times[i] - 50.0) < 1e-9) psi50 = r.psi_Linf[i];
    if (r.times[i] >= 50.0) psi_max = std::max(psi_max, r.psi_Linf[i]);
  }
  auto a = fit.a, b = fit.b;
  if (a[0] > a[1]) std::swap(a[0], a[1]), std::swap(b[0], b[1]);
  double speed_err = 0.0, width_err = 0.0;
  for (int j = 0; j < 2; ++j) {
    speed_err = std::max(speed_err, std::abs(r.pulses.speed[j] - a[j]) / std::abs(a[j]));
    width_err = std::max(width_err, std::abs(r.pulses.width_slope[j] - 4.0 * b[j]) / (4.0 * b[j]));
  }
  const bool rates = std::abs(r.linf.rate - 0.5) <= 0.15 && std::abs(r.l2.rate - 0.25) <= 0.15;
  const bool psi = psi_max <= 3.0 * psi50;
  const bool pulses = speed_err <= 0.05 && width_err <= 0.25;
  return {rates && psi && pulses,
          fmt("Linf rate %.3f (0.5 +- 0.15), L2 rate %.3f (0.25 +- 0.15), max psi %.3f vs 3 x %.3f, pulse speeds "
              "(%.3f, %.3f) vs a (%.3f, %.3f) err %.1f%% (tol 5%%), w^2 slopes (%.2f, %.2f) vs 4b (%.2f, %.2f) err "
              "%.1f%% (tol 25%%)",
              r.linf.rate, r.l2.rate, psi_max, psi50, r.pulses.speed[0], r.pulses.speed[1], a[0], a[1],
              100 * speed_err, r.pulses.width_slope[0], r.pulses.width_slope[1], 4 * b[0], 4 * b[1],
              100 * width_err)};
}

Outcome unstable_growth() {
  const ModelParams p = params_at(0.2);
  const PeriodicWave w = solve_from_hopf(p, 0.0, 0.0, 0.134);
  SimConfig cfg;
  cfg.T_final = 200.0;
  cfg.snapshot_times = geometric_times(1.0, 200.0, 30);
  const Perturbation pert = perturb(w, p, cfg.n_periods, cfg.n_grid, BumpKind::Gaussian, 1e-2, 2.0 * w.X());
  const ResidualSeries r = measure_residuals(simulate(w, p, pert.field, cfg), w);
  const double g = r.growth(200.0);
  return {g >= 10.0, fmt("band-edge wave omega = 0.134: residual grows %.1fx by t = 200 (need >= 10)", g)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> known_red, only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if ((arg == "--known-red" || arg == "--only") && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      for (std::string item; std::getline(list, item, ',');) (arg == "--only" ? only : known_red).insert(std::stoi(item));
    } else {
      std::fprintf(stderr, "usage: acceptance [--only 1,2,...] [--known-red 7,...]\n");
      return 2;
    }
  }

  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "constant-state Hill symbol", 0, constant_state_symbol},
      {2, "profile convergence", 0, profile_convergence},
      {3, "structural conditions", 0, structural_conditions},
      {4, "finite-difference oracle", 0, oracle_agreement},
      {5, "contiguous stable band", 600, stable_band},
      {6, "Whitham speeds", 300, whitham_agreement},
      {7, "zero-dispersion symmetry", 300, zero_dispersion_symmetry},
      {8, "nonlinear decay", 1800, decay_rates},
      {9, "band-edge instability", 0, unstable_growth},
  };

  int unexpected = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && !only.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.1f s", secs);
    if (c.budget_s > 0) {
      timing += fmt(" of %.0f s", c.budget_s);
      if (secs > c.budget_s) {
        o.pass = false;
        timing += " exceeded";
      }
    }
    const bool red = known_red.count(c.id) > 0;
    std::printf("criterion %d %s: %s  %s [%s]%s\n", c.id, c.name, o.pass ? "PASS" : "FAIL", o.detail.c_str(),
                timing.c_str(), !o.pass && red ? " (known red)" : "");
    std::fflush(stdout);
    if (!o.pass && !red) ++unexpected;
    if (o.pass && red) std::printf("criterion %d is listed as known red but passed\n", c.id);
  }
  return unexpected == 0 ? 0 : 1;
}
