#pragma once

#include "gks/profile.hpp"

namespace gks::testing {

inline ModelParams params_at(double epsilon) {
  ModelParams p;
  p.epsilon = epsilon;
  p.delta = 1.0;
  return p;
}

// Wave in the middle of the stable band of the epsilon = 0.2 zero-speed line.
inline const PeriodicWave& mid_band_wave() {
  static const PeriodicWave wave = solve_from_hopf(params_at(0.2), 0.0, 0.0, 0.126);
  return wave;
}

inline PeriodicWave constant_state(double u0, double X, int N = 0) {
  std::vector<cplx> modes(N + 1, cplx(0.0));
  modes[0] = u0;
  return PeriodicWave(X, 0.0, 0.0, modes);
}

}  // namespace gks::testing
