#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gks/error.hpp"
#include "gks/evolve.hpp"
#include "waves.hpp"

using namespace gks;
using gks::testing::mid_band_wave;
using gks::testing::params_at;

namespace {

SimConfig short_run(int periods, double T) {
  SimConfig cfg;
  cfg.n_periods = periods;
  cfg.n_grid = 64 * periods;
  cfg.T_final = T;
  cfg.snapshot_times = {T / 2, T};
  return cfg;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("the wave is an equilibrium of the co-moving scheme") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const SimConfig cfg = short_run(4, 20.0);
  const auto u0 = tile_wave(w, cfg.n_periods, cfg.n_grid);
  const Trajectory t = simulate(w, p, u0, cfg);
  REQUIRE(t.fields.size() == 3);
  CHECK(max_abs_diff(t.fields.back(), u0) < 1e-10);
}

TEST_CASE("mass is conserved") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const SimConfig cfg = short_run(4, 20.0);
  const Perturbation pert = perturb(w, p, cfg.n_periods, cfg.n_grid, BumpKind::Gaussian, 1e-2, w.X());
  const Trajectory t = simulate(w, p, pert.field, cfg);
  auto mass = [](const std::vector<double>& u) { return std::accumulate(u.begin(), u.end(), 0.0) / u.size(); };
  CHECK(std::abs(mass(t.fields.back()) - mass(pert.field)) < 1e-13);
  CHECK(pert.Linf == doctest::Approx(1e-2));
}

TEST_CASE("perturbation amplitude is bounded by the wave range") {
  const PeriodicWave& w = mid_band_wave();
  CHECK_THROWS_AS(perturb(w, params_at(0.2), 4, 256, BumpKind::Gaussian, 10.0, w.X()), Error);
}

TEST_CASE("compact bump has compact support") {
  const PeriodicWave& w = mid_band_wave();
  const int n = 512, P = 4;
  const Perturbation pert = perturb(w, params_at(0.2), P, n, BumpKind::Compact, 1e-2, w.X(), 2.0 * w.X());
  const auto base = tile_wave(w, P, n);
  const double dx = P * w.X() / n;
  for (int i = 0; i < n; ++i)
    if (std::abs(i * dx - 2.0 * w.X()) >= w.X()) CHECK(pert.field[i] == base[i]);
}

TEST_CASE("resolution checks") {
  const PeriodicWave& w = mid_band_wave();
  SimConfig cfg = short_run(16, 1.0);
  cfg.n_grid = 128;
  CHECK_THROWS_AS(cfg.validate(w, params_at(0.2)), Error);
  cfg = short_run(4, 1.0);
  cfg.dt = 5.0;
  CHECK_THROWS_AS(cfg.validate(w, params_at(0.2)), Error);
}

TEST_CASE("phase of a translated train") {
  const PeriodicWave& w = mid_band_wave();
  const int P = 8, n = 64 * P;
  const double shift = 0.37;
  const auto u = tile_wave(w.translated(shift), P, n);
  const PhaseField psi = extract_phase(u, w, P);
  REQUIRE(psi.psi.size() == static_cast<std::size_t>(P));
  for (double v : psi.psi) CHECK(v == doctest::Approx(shift).epsilon(1e-8));
  for (double g : psi.gradient()) CHECK(std::abs(g) < 1e-8);
  CHECK(psi.at(0.5 * psi.length) == doctest::Approx(shift).epsilon(1e-8));
}

TEST_CASE("tracking failure on a flat field") {
  const PeriodicWave& w = mid_band_wave();
  std::vector<double> flat(256, 0.0);
  CHECK_THROWS_AS(extract_phase(flat, w, 4), Error);
}

TEST_CASE("decay exponent of an exact power law") {
  std::vector<double> t, y;
  for (double s : geometric_times(1.0, 500.0, 40)) {
    t.push_back(s);
    y.push_back(3.0 * std::pow(1.0 + s, -0.5));
  }
  const ExponentFit f = fit_decay_exponent(t, y, 50.0, 500.0);
  CHECK(f.rate == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(f.ci_low <= 0.5);
  CHECK(f.ci_high >= 0.5);
  CHECK(f.samples > 5);
}

TEST_CASE("geometric snapshot times") {
  const auto t = geometric_times(1.0, 100.0, 5);
  CHECK(t.front() == doctest::Approx(1.0));
  CHECK(t.back() == 100.0);
  for (std::size_t i = 2; i < t.size(); ++i) CHECK(t[i] / t[i - 1] == doctest::Approx(t[1] / t[0]));
}

TEST_CASE("residual measurement of an unperturbed train") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const SimConfig cfg = short_run(4, 5.0);
  const Trajectory t = simulate(w, p, tile_wave(w.translated(0.2), 4, cfg.n_grid), cfg);
  const ResidualSeries r = measure_residuals(t, w);
  CHECK(r.tracking_failures.empty());
  for (double v : r.residual_Linf) CHECK(v < 1e-8);
  for (double v : r.unmodulated_Linf) CHECK(v > 1e-3);
}

TEST_CASE("time stepping is fourth order") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const int P = 4, n = 64 * P;
  const Perturbation pert = perturb(w, p, P, n, BumpKind::Gaussian, 5e-2, w.X());
  auto final_field = [&](double dt) {
    SimConfig cfg = short_run(P, 2.0);
    cfg.dt = dt;
    return simulate(w, p, pert.field, cfg).fields.back();
  };
  // The observed order climbs toward four as dt shrinks.
  const auto ref = final_field(0.00078125);
  std::vector<double> err;
  for (double dt : {0.025, 0.0125, 0.00625, 0.003125}) err.push_back(max_abs_diff(final_field(dt), ref));
  for (std::size_t i = 2; i < err.size(); ++i) CHECK(err[i - 1] / err[i] > err[i - 2] / err[i - 1]);
  CHECK(err[2] / err[3] > 12.0);
}

TEST_CASE("norms are converged in the grid size") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const int P = 4;
  std::vector<double> linf, l2;
  for (int n : {64 * P, 128 * P}) {
    SimConfig cfg = short_run(P, 5.0);
    cfg.n_grid = n;
    const Perturbation pert = perturb(w, p, P, n, BumpKind::Gaussian, 1e-2, w.X());
    const ResidualSeries r = measure_residuals(simulate(w, p, pert.field, cfg), w);
    linf.push_back(r.residual_Linf.back());
    l2.push_back(r.residual_L2.back());
  }
  CHECK(std::abs(linf[0] - linf[1]) < 1e-6);
  CHECK(std::abs(l2[0] - l2[1]) < 1e-6);
}

TEST_CASE("derivatives match finite differences to second order") {
  const PeriodicWave& w = mid_band_wave();
  auto err = [&](double h) {
    const double x = 1.234;
    return std::abs((eval_profile(w, x + h) - eval_profile(w, x - h)) / (2 * h) - eval_profile(w, x, 1));
  };
  CHECK(err(1e-2) / err(5e-3) == doctest::Approx(4.0).epsilon(0.05));
}
