#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

namespace gks {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Polynomial nonlinearity f(u) = sum_k coeffs[k] u^k.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  /// f(u) = u^2/2.
  static Polynomial burgers() { return Polynomial({0.0, 0.0, 0.5}); }

  double operator()(double u, int derivative_order = 0) const;
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }

  bool operator==(const Polynomial&) const = default;

 private:
  std::vector<double> coeffs_{0.0, 0.0, 0.5};
};

/// u_t + u_xxxx + epsilon u_xxx + delta u_xx + (f(u))_x = 0.
/// The fourth-order coefficient is normalized to one everywhere.
struct ModelParams {
  double epsilon = 0.0;
  double delta = 1.0;
  Polynomial f = Polynomial::burgers();

  static constexpr double gamma = 1.0;

  /// Throws InvalidArgument unless the nonlinearity has degree >= 2 and the
  /// coefficients are finite.
  void validate() const;
  bool default_nonlinearity() const { return f == Polynomial::burgers(); }
  bool operator==(const ModelParams&) const = default;
};

double eval_f(const ModelParams& params, double u, int derivative_order);

/// One traveling-wave profile u(x - ct), stored in physical coordinates on
/// [0, X] by its Fourier coefficients u_k, k = -N..N, with
///   u(x) = sum_k u_k exp(2 pi i k x / X).
class PeriodicWave {
 public:
  PeriodicWave() = default;

  /// `modes` holds u_0..u_N; the negative modes are filled by conjugation and
  /// the imaginary part of u_0 is dropped.
  PeriodicWave(double X, double c, double q, std::span<const cplx> modes);

  /// Full two-sided coefficient list k = -N..N (length 2N+1), used by the
  /// archive loader. Throws InvalidArgument if it is not conjugate-symmetric.
  static PeriodicWave from_two_sided(double X, double c, double q, std::vector<cplx> coeffs);

  double X() const { return X_; }
  double omega() const { return 1.0 / X_; }
  double c() const { return c_; }
  double q() const { return q_; }
  int N() const { return N_; }

  cplx mode(int k) const;
  /// u_0..u_N.
  std::vector<cplx> nonnegative_modes() const;
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  /// Copy with the mode count changed (zero padding or truncation).
  PeriodicWave resized(int N) const;
  PeriodicWave with_q(double q) const;
  PeriodicWave with_c(double c) const;
  /// Profile u(x - s).
  PeriodicWave translated(double s) const;
  /// Profile u + sigma, speed c + sigma, q recomputed for default f.
  PeriodicWave galilean_shift(double sigma) const;

  /// |u_N| / max_k |u_k|.
  double tail_ratio() const;
  /// (u, u', u'') at x = 0.
  std::array<double, 3> jet_at_origin() const;

 private:
  double X_ = kTwoPi;
  double c_ = 0.0;
  double q_ = 0.0;
  int N_ = 0;
  std::vector<cplx> coeffs_{cplx(0.0)};
};

/// sum_k (2 pi i k / X)^d u_k exp(2 pi i k x / X), real part.
double eval_profile(const PeriodicWave& wave, double x, int derivative_order = 0);

/// Imaginary part of the synthesized profile at x; zero up to rounding for
/// every stored wave.
double eval_profile_imag(const PeriodicWave& wave, double x);

/// Profile (or derivative) on `points` equispaced nodes x_j = j X / points.
std::vector<double> sample_profile(const PeriodicWave& wave, int points, int derivative_order = 0);

/// max over the 2N+1 collocation points of |-c u + u''' + eps u'' + delta u' + f(u) - q|.
double ode_residual(const PeriodicWave& wave, const ModelParams& params);

}  // namespace gks
