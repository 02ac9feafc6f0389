#include "gks/evolve.hpp"

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gks/error.hpp"
#include "gks/fourier.hpp"

namespace gks {

namespace {

constexpr int kContourPoints = 32;

double wrap_signed(double d, double period) { return d - period * std::round(d / period); }

int retained_modes(int n_grid, bool dealias) { return dealias ? n_grid / 3 : n_grid / 2 - 1; }

// Band-limited interpolant of equispaced samples on [0, length).
class Interpolant {
 public:
  Interpolant(const std::vector<double>& samples, double length)
      : length_(length), coeffs_(samples.size() / 2 + 1) {
    RealFft(static_cast<int>(samples.size())).forward(samples, coeffs_);
    coeffs_.back() = 0.0;  // drop the Nyquist mode
  }

  // Value and first two derivatives at x.
  std::array<double, 3> jet(double x) const {
    const double dk = kTwoPi / length_;
    const cplx step = std::polar(1.0, dk * x);
    cplx e = step;
    std::array<double, 3> out{coeffs_[0].real(), 0.0, 0.0};
    for (std::size_t j = 1; j < coeffs_.size(); ++j, e *= step) {
      const double k = dk * static_cast<double>(j);
      const cplx t = 2.0 * coeffs_[j] * e;
      out[0] += t.real();
      out[1] += (cplx(0.0, k) * t).real();
      out[2] -= k * k * t.real();
    }
    return out;
  }

 private:
  double length_;
  std::vector<cplx> coeffs_;
};

// Wave value at many points with precomputed modes.
class WaveEvaluator {
 public:
  explicit WaveEvaluator(const PeriodicWave& wave) : K_(kTwoPi / wave.X()), modes_(wave.nonnegative_modes()) {}

  double operator()(double x) const {
    const cplx step = std::polar(1.0, K_ * x);
    cplx e = step;
    double acc = modes_[0].real();
    for (std::size_t k = 1; k < modes_.size(); ++k, e *= step) acc += 2.0 * (modes_[k] * e).real();
    return acc;
  }

 private:
  double K_;
  std::vector<cplx> modes_;
};

struct TwoGaussians {
  // p = [p1, c1, w1, p2, c2, w2, offset]
  static double eval(const Eigen::VectorXd& p, double y) {
    double v = p[6];
    for (int j = 0; j < 2; ++j) {
      const double z = (y - p[3 * j + 1]) / p[3 * j + 2];
      v += p[3 * j] * std::exp(-z * z);
    }
    return v;
  }
};

struct PulseFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const std::vector<double>& y;
  const std::vector<double>& g;
  PulseFunctor(const std::vector<double>& y_, const std::vector<double>& g_) : y(y_), g(g_) {}
  int inputs() const { return 7; }
  int values() const { return static_cast<int>(y.size()); }
  int operator()(const InputType& p, ValueType& r) const {
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = TwoGaussians::eval(p, y[i]) - g[i];
    return 0;
  }
};

std::pair<double, double> line_fit(const std::vector<double>& t, const std::vector<double>& v) {
  const double n = static_cast<double>(t.size());
  const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
  const double mv = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double stt = 0.0, stv = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    stv += (t[i] - mt) * (v[i] - mv);
  }
  const double slope = stv / stt;
  return {slope, mv - slope * mt};
}

}  // namespace

// ---------------------------------------------------------------------------

void SimConfig::validate(const PeriodicWave& wave, const ModelParams& params) const {
  if (n_periods < 1) throw Error(ErrorKind::InvalidArgument, "n_periods must be positive");
  if (n_grid < 16 || n_grid % 2 != 0) throw Error(ErrorKind::InvalidArgument, "n_grid must be even and >= 16");
  if (!(dt > 0.0) || !(T_final > 0.0)) throw Error(ErrorKind::InvalidArgument, "dt and T_final must be positive");
  const double needed = 32.0 * n_periods * std::max(1.0, wave.X() / kTwoPi);
  if (n_grid < needed) {
    std::ostringstream msg;
    msg << "n_grid " << n_grid << " below " << std::ceil(needed) << " for " << n_periods << " periods";
    throw Error(ErrorKind::InvalidArgument, msg.str());
  }
  if (effective_bandwidth(wave, 1e-14) * n_periods > retained_modes(n_grid, dealias))
    throw Error(ErrorKind::InvalidArgument, "grid does not resolve the wave's harmonics");
  for (double t : snapshot_times)
    if (t < 0.0 || t > T_final) throw Error(ErrorKind::InvalidArgument, "snapshot time outside [0, T_final]");

  // Explicit stages see the advective symbol k f'(u) only on modes the
  // exponential factor has not already damped.
  double umax = 0.0;
  for (double u : sample_profile(wave, 256, 0)) umax = std::max(umax, std::abs(params.f(u, 1) - wave.c()));
  const double dk = kTwoPi / (n_periods * wave.X());
  const double k_cut = dk * retained_modes(n_grid, dealias);
  const double k_eff = std::min(k_cut, std::pow(10.0 / dt, 0.25) + std::sqrt(std::max(params.delta, 0.0)));
  if (dt * umax * k_eff > 2.5)
    throw Error(ErrorKind::InvalidArgument, "dt too large for the explicit nonlinear stages");
}

std::vector<double> geometric_times(double t_min, double t_max, int count) {
  if (!(t_min > 0.0) || !(t_max > t_min) || count < 2)
    throw Error(ErrorKind::InvalidArgument, "need 0 < t_min < t_max and count >= 2");
  std::vector<double> t(count);
  for (int i = 0; i < count; ++i) t[i] = t_min * std::pow(t_max / t_min, static_cast<double>(i) / (count - 1));
  t.back() = t_max;
  return t;
}

std::vector<double> tile_wave(const PeriodicWave& wave, int n_periods, int n_grid) {
  if (effective_bandwidth(wave, 1e-14) * n_periods >= n_grid / 2)
    throw Error(ErrorKind::InvalidArgument, "grid too coarse for the tiled wave");
  std::vector<cplx> spec(n_grid / 2 + 1, cplx(0.0));
  for (int k = 0; k <= wave.N() && k * n_periods < n_grid / 2; ++k) spec[k * n_periods] = wave.mode(k);
  spec[0] = wave.mode(0).real();
  std::vector<double> out(n_grid);
  RealFft(n_grid).inverse(spec, out);
  return out;
}

Trajectory simulate(const PeriodicWave& wave, const ModelParams& params, const std::vector<double>& initial,
                    const SimConfig& config) {
  config.validate(wave, params);
  const int n = config.n_grid;
  if (static_cast<int>(initial.size()) != n) throw Error(ErrorKind::InvalidArgument, "initial field has wrong length");
  for (double v : initial)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "initial field is not finite");

  const int steps = static_cast<int>(std::ceil(config.T_final / config.dt - 1e-9));
  const double h = config.T_final / steps;
  const double L = config.n_periods * wave.X();
  const double c = wave.c();
  const int m = n / 2 + 1;
  const int keep = retained_modes(n, config.dealias);

  std::vector<cplx> ik(m), E(m), E2(m), Q(m), f1(m), f2(m), f3(m);
  for (int j = 0; j < m; ++j) {
    const double k = kTwoPi * j / L;
    ik[j] = j <= keep ? cplx(0.0, k) : cplx(0.0);
    const cplx Lk(-k * k * k * k + params.delta * k * k, params.epsilon * k * k * k + c * k);
    const cplx z = h * Lk;
    E[j] = std::exp(z);
    E2[j] = std::exp(0.5 * z);
    cplx q = 0.0, a = 0.0, b = 0.0, d = 0.0;
    for (int p = 0; p < kContourPoints; ++p) {
      const cplx r = z + std::polar(1.0, kPi * (p + 0.5) / (kContourPoints / 2));
      const cplx er = std::exp(r), r3 = r * r * r;
      q += (std::exp(0.5 * r) - 1.0) / r;
      a += (-4.0 - r + er * (4.0 - 3.0 * r + r * r)) / r3;
      b += (2.0 + r + er * (r - 2.0)) / r3;
      d += (-4.0 - 3.0 * r - r * r + er * (4.0 - r)) / r3;
    }
    Q[j] = h * q / double(kContourPoints);
    f1[j] = h * a / double(kContourPoints);
    f2[j] = h * b / double(kContourPoints);
    f3[j] = h * d / double(kContourPoints);
  }

  RealFft fft(n);
  std::vector<double> u(n), w(n);
  std::vector<cplx> v(m), Nv(m), Na(m), Nb(m), Nc(m), a(m), b(m), cc(m), tmp(m);
  fft.forward(initial, v);
  for (int j = keep + 1; j < m; ++j) v[j] = 0.0;

  double current_time = 0.0;
  auto nonlinear = [&](const std::vector<cplx>& s, std::vector<cplx>& out, bool check) {
    fft.inverse(s, u);
    if (check) {
      double peak = 0.0;
      for (double x : u) peak = std::max(peak, std::abs(x));
      if (!(peak <= config.blowup_threshold)) {
        std::ostringstream msg;
        msg << "max |u| exceeded " << config.blowup_threshold << " at t = " << current_time;
        throw Error(ErrorKind::InstabilityAbort, msg.str());
      }
    }
    for (int i = 0; i < n; ++i) w[i] = params.f(u[i]);
    fft.forward(w, out);
    for (int j = 0; j < m; ++j) out[j] *= -ik[j];
  };

  std::vector<int> snap_steps;
  for (double t : config.snapshot_times) snap_steps.push_back(static_cast<int>(std::llround(t / h)));
  std::sort(snap_steps.begin(), snap_steps.end());
  snap_steps.erase(std::unique(snap_steps.begin(), snap_steps.end()), snap_steps.end());

  Trajectory traj;
  traj.length = L;
  traj.c = c;
  traj.n_periods = config.n_periods;
  auto store = [&](int step) {
    std::vector<double> field(n);
    tmp = v;
    fft.inverse(tmp, field);
    traj.times.push_back(step * h);
    traj.fields.push_back(std::move(field));
  };
  store(0);
  std::size_t next = 0;
  while (next < snap_steps.size() && snap_steps[next] <= 0) ++next;

  for (int s = 1; s <= steps; ++s) {
    current_time = (s - 1) * h;
    nonlinear(v, Nv, true);
    for (int j = 0; j < m; ++j) a[j] = E2[j] * v[j] + Q[j] * Nv[j];
    nonlinear(a, Na, false);
    for (int j = 0; j < m; ++j) b[j] = E2[j] * v[j] + Q[j] * Na[j];
    nonlinear(b, Nb, false);
    for (int j = 0; j < m; ++j) cc[j] = E2[j] * a[j] + Q[j] * (2.0 * Nb[j] - Nv[j]);
    nonlinear(cc, Nc, false);
    for (int j = 0; j < m; ++j)
      v[j] = E[j] * v[j] + Nv[j] * f1[j] + 2.0 * (Na[j] + Nb[j]) * f2[j] + Nc[j] * f3[j];
    if (next < snap_steps.size() && snap_steps[next] == s) {
      store(s);
      ++next;
    }
  }
  current_time = steps * h;
  nonlinear(v, Nv, true);
  return traj;
}

Perturbation perturb(const PeriodicWave& wave, const ModelParams& params, int n_periods, int n_grid, BumpKind kind,
                     double amplitude, double width, std::optional<double> center) {
  (void)params;
  const double L = n_periods * wave.X();
  if (!(width > 0.0)) throw Error(ErrorKind::InvalidArgument, "width must be positive");
  const auto profile = sample_profile(wave, 512, 0);
  const auto [lo, hi] = std::minmax_element(profile.begin(), profile.end());
  if (std::abs(amplitude) > 0.1 * (*hi - *lo))
    throw Error(ErrorKind::InvalidArgument, "amplitude exceeds a tenth of the wave's range");

  Perturbation out;
  out.field = tile_wave(wave, n_periods, n_grid);
  out.center = center.value_or(0.5 * L);
  const double dx = L / n_grid;
  for (int i = 0; i < n_grid; ++i) {
    const double r = wrap_signed(i * dx - out.center, L) / width;
    double bump = 0.0;
    if (kind == BumpKind::Gaussian) {
      bump = amplitude * std::exp(-0.5 * r * r);
    } else if (std::abs(r) < 1.0) {
      bump = amplitude * std::exp(1.0 - 1.0 / (1.0 - r * r));
    }
    out.field[i] += bump;
    out.L1 += std::abs(bump) * dx;
    out.L2 += bump * bump * dx;
    out.Linf = std::max(out.Linf, std::abs(bump));
  }
  out.L2 = std::sqrt(out.L2);
  return out;
}

// ---------------------------------------------------------------------------

double PhaseField::at(double x) const {
  const int P = static_cast<int>(psi.size());
  const double s = (x - nodes.front()) / X;
  const double fl = std::floor(s);
  const double frac = s - fl;
  const int j = ((static_cast<int>(fl) % P) + P) % P;
  const int k = (j + 1) % P;
  return psi[j] + frac * wrap_signed(psi[k] - psi[j], X);
}

std::vector<double> PhaseField::gradient() const {
  const int P = static_cast<int>(psi.size());
  std::vector<double> g(P);
  for (int j = 0; j < P; ++j) {
    const double fwd = wrap_signed(psi[(j + 1) % P] - psi[j], X);
    const double bwd = wrap_signed(psi[j] - psi[(j + P - 1) % P], X);
    g[j] = (fwd + bwd) / (2.0 * X);
  }
  return g;
}

double wave_maximum(const PeriodicWave& wave) {
  const int samples = 512;
  int best = 0;
  double top = -INFINITY;
  for (int i = 0; i < samples; ++i) {
    const double v = eval_profile(wave, wave.X() * i / samples, 0);
    if (v > top) {
      top = v;
      best = i;
    }
  }
  double x = wave.X() * best / samples;
  for (int it = 0; it < 20; ++it) {
    const double d2 = eval_profile(wave, x, 2);
    if (d2 >= 0.0) break;
    const double dx = -eval_profile(wave, x, 1) / d2;
    x += dx;
    if (std::abs(dx) < 1e-15 * wave.X()) break;
  }
  x = std::fmod(x, wave.X());
  return x < 0.0 ? x + wave.X() : x;
}

PhaseField extract_phase(const std::vector<double>& snapshot, const PeriodicWave& wave, int n_periods) {
  const int n = static_cast<int>(snapshot.size());
  PhaseField out;
  out.X = wave.X();
  out.length = n_periods * wave.X();
  const double dx = out.length / n;
  const double x0 = wave_maximum(wave);
  const Interpolant interp(snapshot, out.length);

  std::vector<double> raw(n_periods);
  std::vector<int> bad;
  for (int j = 0; j < n_periods; ++j) {
    const double center = x0 + j * out.X;
    out.nodes.push_back(center);
    const int i_lo = static_cast<int>(std::ceil((center - 0.5 * out.X) / dx));
    const int i_hi = static_cast<int>(std::floor((center + 0.5 * out.X) / dx - 1e-12));
    int arg = i_lo;
    for (int i = i_lo; i <= i_hi; ++i)
      if (snapshot[((i % n) + n) % n] > snapshot[((arg % n) + n) % n]) arg = i;
    if (arg == i_lo || arg == i_hi) {
      bad.push_back(j);
      continue;
    }
    const double ym = snapshot[((arg - 1) % n + n) % n], y0 = snapshot[(arg % n + n) % n],
                 yp = snapshot[((arg + 1) % n + n) % n];
    const double curv = ym - 2.0 * y0 + yp;
    double x = arg * dx + (curv < 0.0 ? 0.5 * dx * (ym - yp) / curv : 0.0);
    for (int it = 0; it < 4; ++it) {
      const auto jet = interp.jet(x);
      if (!(jet[2] < 0.0)) break;
      const double step = -jet[1] / jet[2];
      if (std::abs(step) > dx) break;
      x += step;
      if (std::abs(step) < 1e-14 * out.X) break;
    }
    raw[j] = wrap_signed(x - center, out.X);
  }
  if (!bad.empty()) {
    std::ostringstream msg;
    msg << "no interior maximum in cells";
    for (int j : bad) msg << ' ' << j;
    throw Error(ErrorKind::TrackingFailure, msg.str());
  }
  out.psi.resize(n_periods);
  out.psi[0] = raw[0];
  for (int j = 1; j < n_periods; ++j) out.psi[j] = out.psi[j - 1] + wrap_signed(raw[j] - out.psi[j - 1], out.X);
  return out;
}

// ---------------------------------------------------------------------------

ExponentFit fit_decay_exponent(const std::vector<double>& times, const std::vector<double>& values, double t_lo,
                               double t_hi) {
  std::vector<double> lt, lv;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_lo || times[i] > t_hi || !(values[i] > 0.0)) continue;
    lt.push_back(std::log1p(times[i]));
    lv.push_back(std::log(values[i]));
  }
  if (lt.size() < 3) throw Error(ErrorKind::TooFewNodes, "fewer than 3 samples in the decay-fit window");
  const auto [slope, icpt] = line_fit(lt, lv);
  double ss = 0.0, stt = 0.0;
  const double mt = std::accumulate(lt.begin(), lt.end(), 0.0) / lt.size();
  for (std::size_t i = 0; i < lt.size(); ++i) {
    const double r = lv[i] - (icpt + slope * lt[i]);
    ss += r * r;
    stt += (lt[i] - mt) * (lt[i] - mt);
  }
  ExponentFit f;
  f.samples = static_cast<int>(lt.size());
  f.rate = -slope;
  f.std_error = std::sqrt(ss / (lt.size() - 2) / stt);
  const boost::math::students_t dist(static_cast<double>(lt.size() - 2));
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  f.ci_low = f.rate - tq * f.std_error;
  f.ci_high = f.rate + tq * f.std_error;
  return f;
}

ResidualSeries measure_residuals(const Trajectory& traj, const PeriodicWave& wave) {
  if (traj.fields.empty()) throw Error(ErrorKind::InvalidArgument, "empty trajectory");
  const int n = static_cast<int>(traj.fields.front().size());
  const double dx = traj.length / n;
  const WaveEvaluator ubar(wave);
  std::vector<double> base(n);
  for (int i = 0; i < n; ++i) base[i] = ubar(i * dx);

  ResidualSeries out;
  for (std::size_t s = 0; s < traj.fields.size(); ++s) {
    const auto& field = traj.fields[s];
    out.times.push_back(traj.times[s]);
    double unmod = 0.0;
    for (int i = 0; i < n; ++i) unmod = std::max(unmod, std::abs(field[i] - base[i]));
    out.unmodulated_Linf.push_back(unmod);
    try {
      PhaseField psi = extract_phase(field, wave, traj.n_periods);
      double l2 = 0.0, linf = 0.0, pmax = 0.0;
      for (int i = 0; i < n; ++i) {
        const double x = i * dx;
        const double r = field[i] - ubar(x - psi.at(x));
        l2 += r * r * dx;
        linf = std::max(linf, std::abs(r));
      }
      for (double p : psi.psi) pmax = std::max(pmax, std::abs(p));
      out.residual_L2.push_back(std::sqrt(l2));
      out.residual_Linf.push_back(linf);
      out.psi_Linf.push_back(pmax);
      out.psi.push_back(std::move(psi));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TrackingFailure) throw;
      std::ostringstream msg;
      msg << "t = " << traj.times[s] << ": " << e.what();
      out.tracking_failures.push_back(msg.str());
      out.residual_L2.push_back(NAN);
      out.residual_Linf.push_back(NAN);
      out.psi_Linf.push_back(NAN);
      out.psi.push_back(std::nullopt);
    }
  }
  return out;
}

double ResidualSeries::growth(double t_max) const {
  if (times.empty() || !(residual_Linf.front() > 0.0)) return NAN;
  double top = 0.0;
  for (std::size_t i = 1; i < times.size() && times[i] <= t_max; ++i)
    if (std::isfinite(residual_Linf[i])) top = std::max(top, residual_Linf[i]);
  return top / residual_Linf.front();
}

EvolutionReport measure_decay(const Trajectory& traj, const PeriodicWave& wave, const ModelParams& params,
                              const CriticalFit& fit, const DecayOptions& options) {
  (void)params;
  const double L = traj.length;
  const double x_center = options.center.value_or(0.5 * L);

  EvolutionReport rep;
  PulseTrack& pt = rep.pulses;
  double contaminated_at = INFINITY;

  // Transport-diffusion prediction w^2 = w0^2 + 4 b t for the pulse widths;
  // the pulses count as separated once the centers are 4 combined standard
  // deviations apart.
  auto predicted_width = [&](int j, double t) {
    return std::sqrt(options.initial_width_squared + 4.0 * std::max(fit.b[j], 1e-3) * t);
  };
  rep.separation_time = NAN;
  if (fit.a[1] > fit.a[0]) {
    for (double t = 0.25; t <= 1e6; t *= 1.01) {
      const double sigmas = (predicted_width(0, t) + predicted_width(1, t)) / std::sqrt(2.0);
      if ((fit.a[1] - fit.a[0]) * t > 4.0 * sigmas) {
        rep.separation_time = t;
        break;
      }
    }
  }
  const double t_lo_default = std::isnan(rep.separation_time) ? 0.0 : rep.separation_time;
  const double fit_start = std::max(options.t_lo.value_or(t_lo_default), 1e-12);

  const ResidualSeries series = measure_residuals(traj, wave);
  if (!series.tracking_failures.empty())
    throw Error(ErrorKind::TrackingFailure, series.tracking_failures.front());
  rep.times = series.times;
  rep.residual_L2 = series.residual_L2;
  rep.residual_Linf = series.residual_Linf;
  rep.unmodulated_Linf = series.unmodulated_Linf;
  rep.psi_Linf = series.psi_Linf;
  for (std::size_t s = 0; s < traj.fields.size(); ++s) {
    const double t = traj.times[s];
    const PhaseField& psi = *series.psi[s];
    if (t >= fit_start) {
      auto g = psi.gradient();
      double scale = 0.0;
      for (double v : g) scale = std::max(scale, std::abs(v));
      if (scale == 0.0) scale = 1.0;
      for (double& v : g) v /= scale;
      std::vector<double> y(g.size());
      for (std::size_t j = 0; j < g.size(); ++j) y[j] = wrap_signed(psi.nodes[j] - x_center, L);
      auto nearest = [&](double yc) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < y.size(); ++j)
          if (std::abs(wrap_signed(y[j] - yc, L)) < std::abs(wrap_signed(y[best] - yc, L))) best = j;
        return g[best];
      };
      Eigen::VectorXd p(7);
      for (int j = 0; j < 2; ++j) {
        p[3 * j + 1] = wrap_signed(fit.a[j] * t, L);
        p[3 * j + 2] = predicted_width(j, t);
        p[3 * j] = nearest(p[3 * j + 1]);
      }
      p[6] = 0.0;
      PulseFunctor functor(y, g);
      Eigen::NumericalDiff<PulseFunctor> numdiff(functor);
      Eigen::LevenbergMarquardt<Eigen::NumericalDiff<PulseFunctor>> lm(numdiff);
      lm.minimize(p);
      for (int j = 0; j < 2; ++j) p[3 * j + 2] = std::abs(p[3 * j + 2]);
      if (p[1] > p[4]) {
        for (int k = 0; k < 3; ++k) std::swap(p[k], p[3 + k]);
      }
      pt.times.push_back(t);
      for (int j = 0; j < 2; ++j) {
        pt.centers[j].push_back(p[3 * j + 1]);
        pt.widths_squared[j].push_back(p[3 * j + 2] * p[3 * j + 2]);
        pt.amplitudes[j].push_back(p[3 * j] * scale);
        const double room = 0.5 * L - std::abs(p[3 * j + 1]);
        if (room < 5.0 * p[3 * j + 2]) contaminated_at = std::min(contaminated_at, t);
      }
    }
    rep.psi.push_back(psi);
  }

  const double t_lo = fit_start;
  const double t_hi = options.t_hi.value_or(rep.times.back());
  rep.linf = fit_decay_exponent(rep.times, rep.residual_Linf, t_lo, t_hi);
  rep.l2 = fit_decay_exponent(rep.times, rep.residual_L2, t_lo, t_hi);

  double pulse_hi = t_hi;
  if (contaminated_at < t_hi) {
    pulse_hi = contaminated_at;
    std::ostringstream msg;
    msg << "pulses within 5 widths of the periodic wrap from t = " << contaminated_at
        << "; pulse fit window truncated";
    rep.warnings.push_back(msg.str());
  }
  std::vector<double> tw;
  std::array<std::vector<double>, 2> cw, ww;
  for (std::size_t i = 0; i < pt.times.size(); ++i) {
    if (pt.times[i] < t_lo || pt.times[i] >= pulse_hi) continue;
    tw.push_back(pt.times[i]);
    for (int j = 0; j < 2; ++j) {
      cw[j].push_back(pt.centers[j][i]);
      ww[j].push_back(pt.widths_squared[j][i]);
    }
  }
  if (tw.size() < 3) {
    rep.warnings.push_back("fewer than 3 uncontaminated snapshots; pulse speeds and widths not fitted");
    pt.speed = pt.width_slope = pt.p = {NAN, NAN};
    return rep;
  }
  pt.t_first = tw.front();
  pt.t_last = tw.back();
  for (int j = 0; j < 2; ++j) {
    pt.speed[j] = line_fit(tw, cw[j]).first;
    pt.width_slope[j] = line_fit(tw, ww[j]).first;
    const auto it = std::find(pt.times.begin(), pt.times.end(), tw.back());
    pt.p[j] = pt.amplitudes[j][it - pt.times.begin()];
  }
  return rep;
}

}  // namespace gks
