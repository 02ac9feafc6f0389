#include "gks/model.hpp"

#include <algorithm>
#include <cmath>

#include "gks/error.hpp"

namespace gks {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back(0.0);
}

double Polynomial::operator()(double u, int derivative_order) const {
  if (derivative_order < 0) throw Error(ErrorKind::InvalidArgument, "negative derivative order");
  // Horner on the differentiated coefficients.
  double acc = 0.0;
  for (int k = degree(); k >= derivative_order; --k) {
    double ck = coeffs_[k];
    for (int j = 0; j < derivative_order; ++j) ck *= (k - j);
    acc = acc * u + ck;
  }
  return acc;
}

void ModelParams::validate() const {
  if (!std::isfinite(epsilon) || !std::isfinite(delta))
    throw Error(ErrorKind::InvalidArgument, "non-finite equation coefficient");
  for (double c : f.coeffs())
    if (!std::isfinite(c)) throw Error(ErrorKind::InvalidArgument, "non-finite coefficient in f");
  if (f.degree() < 2)
    throw Error(ErrorKind::InvalidArgument, "nonlinearity must have degree >= 2");
}

double eval_f(const ModelParams& params, double u, int derivative_order) {
  return params.f(u, derivative_order);
}

PeriodicWave::PeriodicWave(double X, double c, double q, std::span<const cplx> modes)
    : X_(X), c_(c), q_(q), N_(static_cast<int>(modes.size()) - 1) {
  if (!(X > 0.0) || !std::isfinite(X)) throw Error(ErrorKind::InvalidArgument, "period must be positive");
  if (modes.empty()) throw Error(ErrorKind::InvalidArgument, "wave needs at least the mean mode");
  coeffs_.assign(2 * N_ + 1, cplx(0.0));
  coeffs_[N_] = cplx(modes[0].real(), 0.0);
  for (int k = 1; k <= N_; ++k) {
    coeffs_[N_ + k] = modes[k];
    coeffs_[N_ - k] = std::conj(modes[k]);
  }
}

PeriodicWave PeriodicWave::from_two_sided(double X, double c, double q, std::vector<cplx> coeffs) {
  if (coeffs.size() % 2 == 0) throw Error(ErrorKind::InvalidArgument, "coefficient list must have odd length");
  const int N = static_cast<int>(coeffs.size()) / 2;
  for (int k = 0; k <= N; ++k) {
    if (coeffs[N + k] != std::conj(coeffs[N - k]))
      throw Error(ErrorKind::InvalidArgument, "coefficients are not conjugate-symmetric");
  }
  PeriodicWave w;
  if (!(X > 0.0)) throw Error(ErrorKind::InvalidArgument, "period must be positive");
  w.X_ = X;
  w.c_ = c;
  w.q_ = q;
  w.N_ = N;
  w.coeffs_ = std::move(coeffs);
  return w;
}

cplx PeriodicWave::mode(int k) const {
  if (k < -N_ || k > N_) return cplx(0.0);
  return coeffs_[N_ + k];
}

std::vector<cplx> PeriodicWave::nonnegative_modes() const {
  return {coeffs_.begin() + N_, coeffs_.end()};
}

PeriodicWave PeriodicWave::resized(int N) const {
  std::vector<cplx> modes(N + 1, cplx(0.0));
  for (int k = 0; k <= std::min(N, N_); ++k) modes[k] = mode(k);
  return PeriodicWave(X_, c_, q_, modes);
}

PeriodicWave PeriodicWave::with_q(double q) const {
  PeriodicWave w = *this;
  w.q_ = q;
  return w;
}

PeriodicWave PeriodicWave::with_c(double c) const {
  PeriodicWave w = *this;
  w.c_ = c;
  return w;
}

PeriodicWave PeriodicWave::translated(double s) const {
  std::vector<cplx> modes = nonnegative_modes();
  for (int k = 1; k <= N_; ++k) modes[k] *= std::polar(1.0, -kTwoPi * k * s / X_);
  return PeriodicWave(X_, c_, q_, modes);
}

PeriodicWave PeriodicWave::galilean_shift(double sigma) const {
  std::vector<cplx> modes = nonnegative_modes();
  modes[0] += sigma;
  // -(c+s)(u+s) + (u+s)^2/2 = -cu + u^2/2 - c s - s^2/2.
  return PeriodicWave(X_, c_ + sigma, q_ - c_ * sigma - 0.5 * sigma * sigma, modes);
}

double PeriodicWave::tail_ratio() const {
  double peak = 0.0;
  for (int k = 0; k <= N_; ++k) peak = std::max(peak, std::abs(mode(k)));
  if (peak == 0.0) return 0.0;
  return std::abs(mode(N_)) / peak;
}

std::array<double, 3> PeriodicWave::jet_at_origin() const {
  return {eval_profile(*this, 0.0, 0), eval_profile(*this, 0.0, 1), eval_profile(*this, 0.0, 2)};
}

namespace {

cplx synthesize_at(const PeriodicWave& wave, double x, int d) {
  if (d < 0 || d > 4) throw Error(ErrorKind::InvalidArgument, "derivative order must be in 0..4");
  const double K = kTwoPi / wave.X();
  // Positive and negative modes summed separately so the imaginary part is a
  // genuine rounding diagnostic rather than identically zero.
  cplx acc = d == 0 ? wave.mode(0) : cplx(0.0);
  for (int k = 1; k <= wave.N(); ++k) {
    for (int sgn : {1, -1}) {
      const int kk = sgn * k;
      cplx factor = std::pow(cplx(0.0, K * kk), d);
      acc += factor * wave.mode(kk) * std::polar(1.0, K * kk * x);
    }
  }
  return acc;
}

}  // namespace

double eval_profile(const PeriodicWave& wave, double x, int derivative_order) {
  return synthesize_at(wave, x, derivative_order).real();
}

double eval_profile_imag(const PeriodicWave& wave, double x) {
  return synthesize_at(wave, x, 0).imag();
}

std::vector<double> sample_profile(const PeriodicWave& wave, int points, int derivative_order) {
  if (derivative_order < 0 || derivative_order > 4)
    throw Error(ErrorKind::InvalidArgument, "derivative order must be in 0..4");
  std::vector<double> out(points);
  for (int j = 0; j < points; ++j) out[j] = eval_profile(wave, wave.X() * j / points, derivative_order);
  return out;
}

double ode_residual(const PeriodicWave& wave, const ModelParams& params) {
  const int points = std::max(2 * wave.N() + 1, 9);
  double worst = 0.0;
  for (int j = 0; j < points; ++j) {
    const double x = wave.X() * j / points;
    const double u = eval_profile(wave, x, 0);
    const double r = -wave.c() * u + eval_profile(wave, x, 3) + params.epsilon * eval_profile(wave, x, 2) +
                     params.delta * eval_profile(wave, x, 1) + params.f(u) - wave.q();
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace gks
