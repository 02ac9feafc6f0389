#include <doctest.h>

#include <cmath>

#include "gks/error.hpp"
#include "waves.hpp"

using namespace gks;
using gks::testing::mid_band_wave;
using gks::testing::params_at;

TEST_CASE("hopf point of the constant state") {
  ModelParams p = params_at(0.2);
  p.delta = 2.0;
  const HopfSeed s = hopf_seed(p, 0.5);
  CHECK(s.k_hopf == doctest::Approx(std::sqrt(2.0)));
  CHECK(s.c_hopf == doctest::Approx(0.5 - 0.2 * 2.0));
  p.delta = 0.0;
  CHECK_THROWS_AS(hopf_seed(p, 0.0), Error);
  try {
    hopf_seed(p, 0.0);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NoHopfPoint);
  }
}

TEST_CASE("mid-band wave solves the profile equation") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  CHECK(ode_residual(w, p) < 1e-10);
  CHECK(w.tail_ratio() < 1e-12);
  CHECK(w.X() == doctest::Approx(1.0 / 0.126));
  CHECK(w.c() == 0.0);
  CHECK(std::abs(w.mode(1).imag()) < 1e-14);  // cosine gauge
  CHECK(std::abs(w.mode(1)) > 0.1);           // not the trivial state
}

TEST_CASE("q is converged in the mode count") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  SolverOptions opt;
  opt.modes = 2 * w.N();
  const PeriodicWave fine = solve_profile(w.resized(2 * w.N()), p, w.c(), w.omega(), opt);
  CHECK(std::abs(fine.q() - w.q()) < 1e-9);
}

TEST_CASE("gauges agree up to translation") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  SolverOptions opt;
  opt.gauge = Gauge::Slope;
  const PeriodicWave s = solve_profile(w.translated(0.3), p, w.c(), w.omega(), opt);
  CHECK(std::abs(eval_profile(s, 0.0, 1)) < 1e-10);
  CHECK(s.q() == doctest::Approx(w.q()).epsilon(1e-10));
  CHECK(std::abs(s.mode(1)) == doctest::Approx(std::abs(w.mode(1))).epsilon(1e-10));
}

TEST_CASE("small wave near the hopf point") {
  const ModelParams p = params_at(0.2);
  const HopfSeed seed = hopf_seed(p, 0.0);
  const PeriodicWave w = wave_near_hopf(seed, p);
  CHECK(ode_residual(w, p) < 1e-10);
  CHECK(w.omega() == doctest::Approx(seed.omega_hopf()).epsilon(1e-2));
  CHECK(w.c() == doctest::Approx(seed.c_hopf));
}

TEST_CASE("period map has full rank on the mid-band wave") {
  const PeriodMapReport r = check_H2(mid_band_wave(), params_at(0.2));
  CHECK(r.full_rank);
  for (double m : r.return_mismatch) CHECK(std::abs(m) < 1e-8);
}

TEST_CASE("continuation fills a small grid") {
  const ModelParams p = params_at(0.2);
  FamilyGrid g;
  g.c_values = {-0.01, 0.0, 0.01};
  g.omega_values = {0.12, 0.125, 0.13};
  const WaveFamily fam = continue_family(mid_band_wave(), p, g);
  CHECK(fam.converged_count() == 9);
  for (const FamilyNode& n : fam.nodes) {
    REQUIRE(n.wave);
    CHECK(ode_residual(*n.wave, p) < 1e-10);
    CHECK(n.wave->c() == n.c);
    CHECK(n.wave->omega() == doctest::Approx(n.omega).epsilon(1e-14));
  }
  FamilyGrid bad;
  bad.c_values = {0.0};
  bad.omega_values = {0.13, 0.12};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("frequencies beyond the hopf point are rejected") {
  CHECK_THROWS_AS(solve_from_hopf(params_at(0.2), 0.0, 0.0, 0.5), Error);
}
