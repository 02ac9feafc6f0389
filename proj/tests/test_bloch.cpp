#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dense_eig.hpp"
#include "gks/bloch.hpp"
#include "gks/error.hpp"
#include "waves.hpp"

using namespace gks;
using gks::testing::constant_state;
using gks::testing::mid_band_wave;
using gks::testing::params_at;

namespace {

cplx symbol(const ModelParams& p, double u0, double c, double k) {
  return -std::pow(k, 4) + cplx(0.0, p.epsilon * k * k * k) + p.delta * k * k + cplx(0.0, (c - p.f(u0, 1)) * k);
}

std::vector<cplx> sorted_by_real(std::vector<cplx> v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) { return a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag()); });
  return v;
}

}  // namespace

TEST_CASE("constant state: hill eigenvalues are the symbol") {
  const ModelParams p = params_at(0.2);
  const double X = 7.0, u0 = 0.3;
  const PeriodicWave w = constant_state(u0, X);
  for (double xi : {0.0, 0.2, -0.4}) {
    const Eigen::MatrixXcd H = assemble_hill_matrix(w, p, xi, 8);
    CHECK(H.rows() == 17);
    Eigen::VectorXcd values;
    REQUIRE(detail::dense_eig(H, values));
    std::vector<cplx> got(values.data(), values.data() + values.size()), want;
    for (int j = -8; j <= 8; ++j) want.push_back(symbol(p, u0, w.c(), xi + kTwoPi * j / X));
    got = sorted_by_real(got);
    want = sorted_by_real(want);
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-10 * std::max(1.0, std::abs(want[i])));
  }
}

TEST_CASE("hill truncation precondition") {
  CHECK_THROWS_AS(assemble_hill_matrix(mid_band_wave(), params_at(0.2), 0.0, 2), Error);
}

TEST_CASE("fd oracle agrees with hill on the leading eigenvalues") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const double xi = 0.3 * kPi / w.X();
  const auto fd = sorted_by_real(oracle_fd_spectrum(w, p, xi, 512));
  const BlochSpectrum s = compute_bloch_eigs(w, p, {xi});
  for (int i = 0; i < 4; ++i) CHECK(std::abs(fd[i] - s.eigenvalues[0][i]) <= 1e-3 * std::max(1.0, std::abs(fd[i])));
}

TEST_CASE("zero modes and translation eigenvector of the mid-band wave") {
  const BlochSpectrum s = compute_bloch_eigs(mid_band_wave(), params_at(0.2), default_xi_grid(mid_band_wave().X()));
  REQUIRE(s.zero.computed);
  CHECK(s.zero.smallest_moduli[0] < 1e-6);
  CHECK(s.zero.smallest_moduli[1] < 1e-6);
  CHECK(s.zero.smallest_moduli[2] > 1e-3);
  CHECK(s.zero.translation_residual < 1e-8);
  CHECK(s.zero.s_next > 1e-3);
}

TEST_CASE("xi grid covers the origin geometrically") {
  const double X = 8.0;
  const auto g = default_xi_grid(X, 16, 6);
  CHECK(std::count(g.begin(), g.end(), 0.0) == 1);
  CHECK(std::is_sorted(g.begin(), g.end()));
  double smallest = INFINITY;
  for (double x : g)
    if (x != 0.0) smallest = std::min(smallest, std::abs(x));
  CHECK(smallest <= 1e-3 * kPi / X * (1 + 1e-12));
  CHECK(g.front() >= -kPi / X - 1e-15);
  CHECK(g.back() < kPi / X);
}

TEST_CASE("critical fit and verdict of the mid-band wave") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const BlochSpectrum s = compute_bloch_eigs(w, p, default_xi_grid(w.X()));
  const CriticalFit fit = fit_critical_expansion(s);
  CHECK(std::abs(fit.a[0] - fit.a[1]) > 1e-6);
  for (int j = 0; j < 2; ++j) {
    CHECK(fit.a_positive[j] == doctest::Approx(fit.a_negative[j]).epsilon(1e-6));
    CHECK(fit.b[j] > 0.0);
  }
  const StabilityVerdict v = verify_conditions(s, fit);
  CHECK(v.stable());
  CHECK_THROWS_AS(verify_conditions(compute_bloch_eigs(w, p, {0.1, 0.2}), fit), Error);
}

TEST_CASE("band edge wave is unstable") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave w = solve_from_hopf(p, 0.0, 0.0, 0.134);
  const BlochSpectrum s = compute_bloch_eigs(w, p, default_xi_grid(w.X()));
  const StabilityVerdict v = verify_conditions_unfitted(s);
  CHECK_FALSE(v.stable());
  CHECK_FALSE(v.D1);
}

TEST_CASE("spectrum at -xi is the conjugate of the spectrum at xi") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const double xi = 0.37 * kPi / w.X();
  const BlochSpectrum s = compute_bloch_eigs(w, p, {-xi, xi});
  for (cplx l : s.eigenvalues[1]) {
    double best = INFINITY;
    for (cplx m : s.eigenvalues[0]) best = std::min(best, std::abs(std::conj(l) - m));
    CHECK(best <= 1e-8 * std::max(1.0, std::abs(l)));
  }
}

TEST_CASE("generalized eigenvector of the translation mode") {
  const ModelParams p = params_at(0.2);
  const PeriodicWave& w = mid_band_wave();
  const int n = 48;
  const Eigen::MatrixXcd L0 = assemble_hill_matrix(w, p, 0.0, n);
  Eigen::VectorXcd du = Eigen::VectorXcd::Zero(2 * n + 1);
  for (int k = -w.N(); k <= w.N(); ++k) du[k + n] = cplx(0.0, kTwoPi * k / w.X()) * w.mode(k);
  const Eigen::VectorXcd g = L0.completeOrthogonalDecomposition().solve(du);
  CHECK((L0 * g - du).norm() < 1e-8 * du.norm());
  CHECK((L0 * (L0 * g)).norm() < 1e-8 * g.norm());
}

TEST_CASE("verdict survives halving the xi spacing") {
  const ModelParams p = params_at(0.2);
  for (double omega : {0.126, 0.134}) {
    const PeriodicWave w = solve_from_hopf(p, 0.0, 0.0, omega);
    const auto coarse = verify_conditions_unfitted(compute_bloch_eigs(w, p, default_xi_grid(w.X(), 64, 12)));
    const auto fine = verify_conditions_unfitted(compute_bloch_eigs(w, p, default_xi_grid(w.X(), 128, 12)));
    CHECK(coarse.D1 == fine.D1);
    CHECK(coarse.D2 == fine.D2);
    CHECK(coarse.D3 == fine.D3);
  }
}
