#include <doctest.h>

#include <cmath>
#include <random>

#include "gks/error.hpp"
#include "gks/fourier.hpp"
#include "gks/model.hpp"

using namespace gks;

TEST_CASE("polynomial derivatives") {
  const Polynomial f({1.0, -2.0, 0.5, 0.25});
  const double u = 0.7;
  CHECK(f(u) == doctest::Approx(1.0 - 1.4 + 0.5 * 0.49 + 0.25 * 0.343));
  CHECK(f(u, 1) == doctest::Approx(-2.0 + u + 0.75 * u * u));
  CHECK(f(u, 2) == doctest::Approx(1.0 + 1.5 * u));
  CHECK(f(u, 3) == doctest::Approx(1.5));
  CHECK(f(u, 4) == 0.0);
}

TEST_CASE("parameter validation") {
  ModelParams p;
  p.f = Polynomial({0.0, 1.0});
  CHECK_THROWS_AS(p.validate(), Error);
  p.f = Polynomial({0.0, 0.0, NAN});
  CHECK_THROWS_AS(p.validate(), Error);
  p.f = Polynomial::burgers();
  p.epsilon = INFINITY;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("real-valued profile and conjugate symmetry") {
  std::vector<cplx> modes{0.1, {0.3, -0.2}, {0.05, 0.01}};
  const PeriodicWave w(5.0, 0.2, 0.0, modes);
  CHECK(w.mode(-1) == std::conj(w.mode(1)));
  for (double x : {0.0, 0.7, 3.3}) CHECK(std::abs(eval_profile_imag(w, x)) < 1e-15);
  auto coeffs = w.coeffs();
  coeffs[0] += cplx(0.0, 1e-3);
  CHECK_THROWS_AS(PeriodicWave::from_two_sided(5.0, 0.2, 0.0, coeffs), Error);
}

TEST_CASE("translation and resizing") {
  std::vector<cplx> modes{0.0, {0.5, 0.0}, {0.0, 0.1}};
  const PeriodicWave w(4.0, 0.0, 0.0, modes);
  const PeriodicWave s = w.translated(0.9);
  for (double x : {0.1, 1.2, 3.7}) CHECK(eval_profile(s, x) == doctest::Approx(eval_profile(w, x - 0.9)).epsilon(1e-13));
  const PeriodicWave big = w.resized(8);
  CHECK(big.N() == 8);
  CHECK(eval_profile(big, 1.3) == doctest::Approx(eval_profile(w, 1.3)).epsilon(1e-14));
  CHECK(big.resized(2).coeffs() == w.coeffs());
}

TEST_CASE("derivatives of a single harmonic") {
  const double X = 3.0, k = kTwoPi / X;
  const PeriodicWave w(X, 0.0, 0.0, std::vector<cplx>{0.0, 0.5});  // cos(k x)
  const double x = 0.4;
  CHECK(eval_profile(w, x) == doctest::Approx(std::cos(k * x)));
  CHECK(eval_profile(w, x, 1) == doctest::Approx(-k * std::sin(k * x)));
  CHECK(eval_profile(w, x, 3) == doctest::Approx(k * k * k * std::sin(k * x)));
}

TEST_CASE("fft round trip and dealiased products") {
  std::mt19937 rng(7);
  std::normal_distribution<double> g;
  const int N = 12;
  std::vector<cplx> modes(N + 1);
  modes[0] = g(rng);
  for (int k = 1; k <= N; ++k) modes[k] = cplx(g(rng), g(rng)) / double(k * k);
  const int n = dealiased_grid_size(N, 2);
  CHECK(n >= 3 * N + 1);
  const auto values = synthesize(modes, n);
  const auto back = analyze(values, N);
  for (int k = 0; k <= N; ++k) CHECK(std::abs(back[k] - modes[k]) < 1e-14);

  // Square on the grid against the exact convolution, on the retained harmonics.
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = values[i] * values[i];
  const auto prod = analyze(sq, N);
  auto m = [&](int k) { return k >= 0 ? modes[k] : std::conj(modes[-k]); };
  for (int k = 0; k <= N; ++k) {
    cplx exact = 0.0;
    for (int j = -N; j <= N; ++j)
      if (std::abs(k - j) <= N) exact += m(j) * m(k - j);
    CHECK(std::abs(prod[k] - exact) < 1e-13);
  }
}

TEST_CASE("galilean shift preserves the profile equation") {
  const ModelParams p;
  std::vector<cplx> modes{0.0, 0.2};
  const PeriodicWave w(kTwoPi, 0.3, 0.1, modes);
  const PeriodicWave s = w.galilean_shift(0.25);
  CHECK(s.c() == doctest::Approx(0.55));
  CHECK(s.mode(0).real() == doctest::Approx(0.25));
  // -c u + f(u) - q is invariant up to the shift.
  for (double x : {0.3, 2.0}) {
    const double u = eval_profile(w, x), us = eval_profile(s, x);
    CHECK(-s.c() * us + 0.5 * us * us - s.q() == doctest::Approx(-w.c() * u + 0.5 * u * u - w.q()));
  }
}
