#include "gks/profile.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "gks/error.hpp"
#include "gks/fourier.hpp"

namespace gks {

HopfSeed hopf_seed(const ModelParams& params, double u0, double amplitude) {
  params.validate();
  if (!(params.delta > 0.0))
    throw Error(ErrorKind::NoHopfPoint, "delta must be positive for a Hopf point of the constant state");
  if (!(amplitude > 0.0) || amplitude > 0.1 * std::max(1.0, std::abs(u0)))
    throw Error(ErrorKind::InvalidArgument, "seed amplitude must lie in (0, 0.1 max(1, |u0|)]");
  HopfSeed seed;
  // mu = i k: imaginary part gives k^2 = delta, real part c = f'(u0) - eps k^2.
  seed.k_hopf = std::sqrt(params.delta);
  seed.c_hopf = params.f(u0, 1) - params.epsilon * params.delta;
  seed.u0 = u0;
  seed.amplitude = amplitude;
  return seed;
}

const char* to_string(Gauge gauge) {
  return gauge == Gauge::Cosine ? "cosine: Im u_1 = 0" : "slope: u'(0) = 0";
}

namespace {

// Linear symbol of -c u + u''' + eps u'' + delta u' on exp(i k K x).
cplx ode_symbol(const ModelParams& p, double c, double K, int k) {
  const cplx ik(0.0, K * k);
  return -c + ik * ik * ik + p.epsilon * ik * ik + p.delta * ik;
}

// d(symbol)/d(omega), with K = 2 pi omega.
cplx ode_symbol_domega(const ModelParams& p, double K, int k) {
  const cplx i(0.0, 1.0);
  const double kk = k;
  return kTwoPi * (-3.0 * i * K * K * kk * kk * kk - 2.0 * p.epsilon * K * kk * kk + i * p.delta * kk);
}

enum class Closure { FixedOmega, FixedAmplitude };

// Real unknown vector: [Re u0, (Re uk, Im uk)_{k=1..N}, q, (omega)].
struct NewtonSystem {
  const ModelParams& params;
  int N;
  double c;
  Closure closure;
  Gauge gauge;
  double amplitude = 0.0;

  int unknowns() const { return 2 * N + 2 + (closure == Closure::FixedAmplitude ? 1 : 0); }

  std::vector<cplx> modes(const Eigen::VectorXd& z) const {
    std::vector<cplx> m(N + 1);
    m[0] = z[0];
    for (int k = 1; k <= N; ++k) m[k] = cplx(z[2 * k - 1], z[2 * k]);
    return m;
  }

  Eigen::VectorXd pack(const PeriodicWave& w, double omega) const {
    Eigen::VectorXd z(unknowns());
    z[0] = w.mode(0).real();
    for (int k = 1; k <= N; ++k) {
      z[2 * k - 1] = w.mode(k).real();
      z[2 * k] = w.mode(k).imag();
    }
    z[2 * N + 1] = w.q();
    if (closure == Closure::FixedAmplitude) z[2 * N + 2] = omega;
    return z;
  }

  // Fills the residual and, if requested, the Jacobian.
  void evaluate(const Eigen::VectorXd& z, double omega_fixed, Eigen::VectorXd& r, Eigen::MatrixXd* J) const {
    const double omega = closure == Closure::FixedAmplitude ? z[2 * N + 2] : omega_fixed;
    const double K = kTwoPi * omega;
    const double q = z[2 * N + 1];
    const std::vector<cplx> m = modes(z);
    const int M = dealiased_grid_size(N, params.f.degree());
    std::vector<double> u = synthesize(m, M);
    std::vector<double> fu(M), dfu(M);
    for (int j = 0; j < M; ++j) {
      fu[j] = params.f(u[j], 0);
      dfu[j] = params.f(u[j], 1);
    }
    const std::vector<cplx> fhat = analyze(fu, N);

    std::vector<cplx> R(N + 1);
    for (int k = 0; k <= N; ++k) R[k] = ode_symbol(params, c, K, k) * m[k] + fhat[k];
    R[0] -= q;

    const int n = unknowns();
    r.resize(n);
    r[0] = R[0].real();
    for (int k = 1; k <= N; ++k) {
      r[2 * k - 1] = R[k].real();
      r[2 * k] = R[k].imag();
    }
    r[2 * N + 1] = phase_row(z, K);
    if (closure == Closure::FixedAmplitude) r[2 * N + 2] = z[1] - 0.5 * amplitude;

    if (!J) return;
    const std::vector<cplx> ahat_pos = analyze(dfu, 2 * N);
    auto ahat = [&](int k) { return k >= 0 ? ahat_pos[k] : std::conj(ahat_pos[-k]); };

    J->setZero(n, n);
    auto put = [&](int k, int col, cplx v) {
      (*J)(k == 0 ? 0 : 2 * k - 1, col) += v.real();
      if (k > 0) (*J)(2 * k, col) += v.imag();
    };
    const cplx i(0.0, 1.0);
    for (int k = 0; k <= N; ++k) {
      put(k, 0, ahat(k) + (k == 0 ? ode_symbol(params, c, K, 0) : cplx(0.0)));
      for (int l = 1; l <= N; ++l) {
        cplx re = ahat(k - l) + ahat(k + l);
        cplx im = i * (ahat(k - l) - ahat(k + l));
        if (k == l) {
          re += ode_symbol(params, c, K, k);
          im += i * ode_symbol(params, c, K, k);
        }
        put(k, 2 * l - 1, re);
        put(k, 2 * l, im);
      }
      if (closure == Closure::FixedAmplitude) put(k, 2 * N + 2, ode_symbol_domega(params, K, k) * m[k]);
    }
    (*J)(0, 2 * N + 1) = -1.0;
    phase_gradient(*J, 2 * N + 1, K);
    if (closure == Closure::FixedAmplitude) (*J)(2 * N + 2, 1) = 1.0;
  }

  double phase_row(const Eigen::VectorXd& z, double) const {
    if (gauge == Gauge::Cosine) return z[2];
    // u'(0) = -2K sum_k k Im u_k; the constant factor is dropped.
    double s = 0.0;
    for (int k = 1; k <= N; ++k) s += k * z[2 * k];
    return s;
  }

  void phase_gradient(Eigen::MatrixXd& J, int row, double) const {
    if (gauge == Gauge::Cosine) {
      J(row, 2) = 1.0;
      return;
    }
    for (int k = 1; k <= N; ++k) J(row, 2 * k) = k;
  }
};

struct NewtonResult {
  PeriodicWave wave;
  int iterations = 0;
};

NewtonResult newton(const PeriodicWave& guess, const ModelParams& params, double c, double omega, Closure closure,
                    double amplitude, const SolverOptions& opt) {
  const int N = guess.N();
  NewtonSystem sys{params, N, c, closure, opt.gauge, amplitude};
  Eigen::VectorXd z = sys.pack(guess, omega);
  Eigen::VectorXd r, r_trial;
  Eigen::MatrixXd J;

  auto wave_of = [&](const Eigen::VectorXd& zz) {
    const double w = closure == Closure::FixedAmplitude ? zz[2 * N + 2] : omega;
    if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorKind::NoConvergence, "frequency left the admissible range");
    const std::vector<cplx> m = sys.modes(zz);
    return PeriodicWave(1.0 / w, c, zz[2 * N + 1], m);
  };

  for (int it = 1; it <= opt.max_iterations; ++it) {
    sys.evaluate(z, omega, r, &J);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    Eigen::VectorXd dz = lu.solve(-r);
    if (!dz.allFinite()) throw Error(ErrorKind::NoConvergence, "singular Newton system");

    // Damping: halve while the residual grows.
    const double r0 = r.norm();
    double t = 1.0;
    Eigen::VectorXd trial = z + dz;
    for (int h = 0; h < 12; ++h) {
      sys.evaluate(trial, omega, r_trial, nullptr);
      if (r_trial.allFinite() && r_trial.norm() <= r0 * (1.0 + 1e-12) + 1e-14) break;
      t *= 0.5;
      trial = z + t * dz;
    }
    z = trial;
    const double update = (t * dz).lpNorm<Eigen::Infinity>();
    if (update < opt.update_tol || r_trial.lpNorm<Eigen::Infinity>() < 1e-14) {
      PeriodicWave w = wave_of(z);
      if (ode_residual(w, params) < opt.residual_tol) return {w, it};
    }
  }
  throw Error(ErrorKind::NoConvergence,
              "Newton did not converge in " + std::to_string(opt.max_iterations) + " iterations");
}

void check_nontrivial(const PeriodicWave& w, const SolverOptions& opt) {
  double osc = 0.0;
  for (int k = 1; k <= w.N(); ++k) osc = std::max(osc, std::abs(w.mode(k)));
  if (osc < opt.trivial_tol) throw Error(ErrorKind::TrivialSolution, "Newton collapsed onto a constant state");
}

PeriodicWave solve_adaptive(const PeriodicWave& guess, const ModelParams& params, double c, double omega,
                            Closure closure, double amplitude, const SolverOptions& opt, SolveReport* report) {
  params.validate();
  if (std::abs(guess.mode(1)) == 0.0)
    throw Error(ErrorKind::InvalidArgument, "guess needs nonzero first harmonic");
  int N = std::max({guess.N(), opt.modes, 8});
  PeriodicWave current = guess.resized(N);
  int total_iterations = 0;
  while (true) {
    NewtonResult res = newton(current, params, c, omega, closure, amplitude, opt);
    total_iterations += res.iterations;
    check_nontrivial(res.wave, opt);
    if (res.wave.tail_ratio() <= opt.tail_tol || 2 * N > opt.max_modes) {
      if (report) *report = {total_iterations, N, ode_residual(res.wave, params)};
      return res.wave;
    }
    N *= 2;
    current = res.wave.resized(N);
  }
}

}  // namespace

PeriodicWave solve_profile(const PeriodicWave& guess, const ModelParams& params, double c, double omega,
                           const SolverOptions& options, SolveReport* report) {
  if (!(omega > 0.0)) throw Error(ErrorKind::InvalidArgument, "omega must be positive");
  return solve_adaptive(guess, params, c, omega, Closure::FixedOmega, 0.0, options, report);
}

PeriodicWave solve_at_amplitude(const PeriodicWave& guess, const ModelParams& params, double c, double amplitude,
                                const SolverOptions& options, SolveReport* report) {
  if (options.gauge != Gauge::Cosine)
    throw Error(ErrorKind::InvalidArgument, "amplitude pinning requires the cosine gauge");
  return solve_adaptive(guess, params, c, guess.omega(), Closure::FixedAmplitude, amplitude, options, report);
}

PeriodicWave seed_guess(const HopfSeed& seed, const ModelParams& params, int modes) {
  std::vector<cplx> m(std::max(modes, 1) + 1, cplx(0.0));
  m[0] = seed.u0;
  m[1] = 0.5 * seed.amplitude;
  const double q = params.f(seed.u0) - seed.c_hopf * seed.u0;
  return PeriodicWave(kTwoPi / seed.k_hopf, seed.c_hopf, q, m);
}

PeriodicWave wave_near_hopf(const HopfSeed& seed, const ModelParams& params, const SolverOptions& options) {
  SolverOptions opt = options;
  opt.gauge = Gauge::Cosine;
  return solve_at_amplitude(seed_guess(seed, params, opt.modes), params, seed.c_hopf, seed.amplitude, opt);
}

PeriodicWave march(const PeriodicWave& start, const ModelParams& params, double c_target, double omega_target,
                   const PathOptions& options) {
  const double c0 = start.c(), w0 = start.omega();
  const double dc = c_target - c0, dw = omega_target - w0;
  const double length = std::hypot(dc, dw);
  if (length == 0.0) return start;
  const int base_steps = std::max(1, static_cast<int>(std::ceil(length / options.max_step)));

  PeriodicWave current = start;
  std::optional<PeriodicWave> previous;
  double s = 0.0;                       // path parameter in [0, 1]
  double ds = 1.0 / base_steps;
  int halvings = 0;
  while (s < 1.0) {
    const double s_next = std::min(1.0, s + ds);
    const double c = c0 + s_next * dc, w = w0 + s_next * dw;
    // Secant predictor from the last two accepted waves.
    PeriodicWave guess = current;
    if (previous && previous->N() == current.N()) {
      const double prev_dist = std::hypot(current.c() - previous->c(), current.omega() - previous->omega());
      const double next_dist = std::hypot(c - current.c(), w - current.omega());
      if (prev_dist > 0.0) {
        const double rho = next_dist / prev_dist;
        std::vector<cplx> m = current.nonnegative_modes();
        for (int k = 0; k <= current.N(); ++k) m[k] += rho * (current.mode(k) - previous->mode(k));
        guess = PeriodicWave(1.0 / w, c, current.q() + rho * (current.q() - previous->q()), m);
      }
    }
    try {
      PeriodicWave next = solve_profile(guess, params, c, w, options.solver);
      previous = current;
      current = next;
      s = s_next;
      halvings = 0;
      ds = std::min(ds * 1.5, 1.0 / base_steps);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::TrivialSolution) throw;
      if (++halvings > options.max_halvings)
        throw Error(ErrorKind::NoConvergence, "continuation stalled at c=" + std::to_string(c) +
                                                  ", omega=" + std::to_string(w) + " (" + e.what() + ")");
      ds *= 0.5;
    }
  }
  // Land exactly on the requested point.
  return current.c() == c_target && current.omega() == omega_target
             ? current
             : solve_profile(current, params, c_target, omega_target, options.solver);
}

PeriodicWave solve_from_hopf(const ModelParams& params, double u0, double c, double omega,
                             const PathOptions& options) {
  const HopfSeed seed = hopf_seed(params, u0);
  if (!(omega < seed.omega_hopf()))
    throw Error(ErrorKind::InvalidArgument, "omega must lie below the Hopf frequency " +
                                                std::to_string(seed.omega_hopf()));
  // omega_hopf - omega scales like amplitude^2, so fixed-omega Newton is poorly
  // conditioned next to the bifurcation. Grow the amplitude instead until the
  // branch passes the requested frequency or is well clear of the Hopf point.
  SolverOptions amp_opt = options.solver;
  amp_opt.gauge = Gauge::Cosine;
  PeriodicWave w = wave_near_hopf(seed, params, amp_opt);
  double amplitude = seed.amplitude;
  const double clearance = std::min(0.05 * seed.omega_hopf(), seed.omega_hopf() - omega);
  while (w.omega() > omega && seed.omega_hopf() - w.omega() < clearance) {
    amplitude *= 1.25;
    w = solve_at_amplitude(w, params, seed.c_hopf, amplitude, amp_opt);
  }
  if (options.solver.gauge != Gauge::Cosine) w = solve_profile(w, params, w.c(), w.omega(), options.solver);
  w = march(w, params, seed.c_hopf, omega, options);
  return march(w, params, c, omega, options);
}

// ---------------------------------------------------------------------------

void FamilyGrid::validate() const {
  for (const auto* v : {&c_values, &omega_values}) {
    if (v->empty()) throw Error(ErrorKind::InvalidArgument, "family grid axis is empty");
    for (std::size_t i = 1; i < v->size(); ++i)
      if (!((*v)[i] > (*v)[i - 1])) throw Error(ErrorKind::InvalidArgument, "family grid must be strictly increasing");
  }
  for (double w : omega_values)
    if (!(w > 0.0)) throw Error(ErrorKind::InvalidArgument, "omega must be positive");
}

double FamilyGrid::c_step() const { return c_values.size() > 1 ? c_values[1] - c_values[0] : 0.0; }
double FamilyGrid::omega_step() const { return omega_values.size() > 1 ? omega_values[1] - omega_values[0] : 0.0; }

int WaveFamily::converged_count() const {
  return static_cast<int>(std::count_if(nodes.begin(), nodes.end(), [](const FamilyNode& n) { return n.wave.has_value(); }));
}

namespace {

std::size_t nearest_index(const std::vector<double>& v, double x) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i] - x) < std::abs(v[best] - x)) best = i;
  return best;
}

// Walk one c-line outward from the anchor index in both directions.
void fill_line(WaveFamily& fam, int ic, int iw0, const PathOptions& opt) {
  const int nw = fam.n_omega();
  for (int dir : {+1, -1}) {
    std::optional<PeriodicWave> last = fam.at(ic, iw0).wave;
    for (int iw = iw0 + dir; iw >= 0 && iw < nw; iw += dir) {
      FamilyNode& node = fam.at(ic, iw);
      if (!last) {
        node.failure = "no converged neighbor to continue from";
        continue;
      }
      try {
        node.wave = march(*last, fam.params, node.c, node.omega, opt);
        last = node.wave;
      } catch (const Error& e) {
        node.failure = e.what();
      }
    }
  }
}

}  // namespace

WaveFamily continue_family(const PeriodicWave& start, const ModelParams& params, const FamilyGrid& grid,
                           const ContinuationOptions& options) {
  grid.validate();
  WaveFamily fam;
  fam.params = params;
  fam.grid = grid;
  fam.gauge = options.path.solver.gauge;
  for (double c : grid.c_values)
    for (double w : grid.omega_values) fam.nodes.push_back({c, w, std::nullopt, {}});

  const int ic0 = static_cast<int>(nearest_index(grid.c_values, start.c()));
  const int iw0 = static_cast<int>(nearest_index(grid.omega_values, start.omega()));

  // Anchors: one node per c-line at omega index iw0, reached sequentially in c.
  auto anchor = [&](int ic, const PeriodicWave& from) -> std::optional<PeriodicWave> {
    FamilyNode& node = fam.at(ic, iw0);
    try {
      node.wave = (node.c == from.c() && node.omega == from.omega())
                      ? from
                      : march(from, params, node.c, node.omega, options.path);
    } catch (const Error& e) {
      node.failure = e.what();
    }
    return node.wave;
  };
  std::optional<PeriodicWave> a0 = anchor(ic0, start);
  for (int dir : {+1, -1}) {
    std::optional<PeriodicWave> last = a0;
    for (int ic = ic0 + dir; ic >= 0 && ic < fam.n_c(); ic += dir) {
      if (!last) {
        fam.at(ic, iw0).failure = "no converged neighbor to continue from";
        continue;
      }
      if (auto w = anchor(ic, *last)) last = w;
    }
  }

  // Lines are independent once anchored.
  const int workers = std::max(1, options.workers);
  std::vector<std::future<void>> jobs;
  for (int ic = 0; ic < fam.n_c(); ++ic) {
    if (static_cast<int>(jobs.size()) >= workers) {
      jobs.front().get();
      jobs.erase(jobs.begin());
    }
    jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                              [&fam, ic, iw0, &options] { fill_line(fam, ic, iw0, options.path); }));
  }
  for (auto& j : jobs) j.get();
  return fam;
}

// ---------------------------------------------------------------------------

std::array<double, 3> period_map(const ModelParams& params, double X, double c, double q,
                                 const std::array<double, 3>& b, int steps) {
  using State = std::array<double, 3>;
  auto rhs = [&](const State& y) -> State {
    // u''' = q + c u - eps u'' - delta u' - f(u)
    return {y[1], y[2], q + c * y[0] - params.epsilon * y[2] - params.delta * y[1] - params.f(y[0])};
  };
  State y = b;
  const double h = X / steps;
  for (int s = 0; s < steps; ++s) {
    State k1 = rhs(y), k2, k3, k4, t;
    for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * h * k1[i];
    k2 = rhs(t);
    for (int i = 0; i < 3; ++i) t[i] = y[i] + 0.5 * h * k2[i];
    k3 = rhs(t);
    for (int i = 0; i < 3; ++i) t[i] = y[i] + h * k3[i];
    k4 = rhs(t);
    for (int i = 0; i < 3; ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!std::isfinite(y[0] + y[1] + y[2]) || std::abs(y[0]) + std::abs(y[1]) + std::abs(y[2]) > 1e8)
      throw Error(ErrorKind::IntegrationFailure, "profile ODE blew up before one period");
  }
  return {y[0] - b[0], y[1] - b[1], y[2] - b[2]};
}

PeriodMapReport check_H2(const PeriodicWave& wave, const ModelParams& params, const PeriodMapOptions& options) {
  const std::array<double, 3> b = wave.jet_at_origin();
  std::array<double, 6> p0{wave.X(), wave.c(), wave.q(), b[0], b[1], b[2]};
  auto H = [&](const std::array<double, 6>& p) {
    return period_map(params, p[0], p[1], p[2], {p[3], p[4], p[5]}, options.steps);
  };

  PeriodMapReport rep;
  rep.return_mismatch = H(p0);
  for (int j = 0; j < 6; ++j) {
    const double h = options.fd_step * std::max(1.0, std::abs(p0[j]));
    auto plus = p0, minus = p0;
    plus[j] += h;
    minus[j] -= h;
    const auto hp = H(plus), hm = H(minus);
    for (int i = 0; i < 3; ++i) rep.jacobian(i, j) = (hp[i] - hm[i]) / (2.0 * h);
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 3, 6>> svd(rep.jacobian);
  const auto& s = svd.singularValues();
  for (int i = 0; i < 3; ++i) rep.singular_values[i] = s[i];
  rep.threshold = options.rank_rtol * s[0];
  rep.full_rank = s[2] > rep.threshold;
  return rep;
}

}  // namespace gks
