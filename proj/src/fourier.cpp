#include "gks/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

#include "gks/error.hpp"

namespace gks {
namespace {

struct PlanPair {
  fftw_plan forward;
  fftw_plan inverse;
};

// Plan creation in FFTW is not thread-safe; execution with the new-array
// interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

PlanPair plans_for(int n) {
  static std::map<int, PlanPair> cache;
  std::lock_guard lock(planner_mutex());
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  std::vector<double> real(n);
  std::vector<fftw_complex> spec(n / 2 + 1);
  PlanPair p{};
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  p.forward = fftw_plan_dft_r2c_1d(n, real.data(), spec.data(), flags);
  p.inverse = fftw_plan_dft_c2r_1d(n, spec.data(), real.data(), flags | FFTW_DESTROY_INPUT);
  cache.emplace(n, p);
  return p;
}

}  // namespace

RealFft::RealFft(int n) : n_(n) {
  if (n < 2) throw Error(ErrorKind::InvalidArgument, "FFT length must be >= 2");
  PlanPair p = plans_for(n);
  forward_plan_ = p.forward;
  inverse_plan_ = p.inverse;
}

void RealFft::forward(std::span<const double> in, std::span<cplx> out) const {
  std::vector<double> buf(in.begin(), in.end());
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), buf.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / n_;
  for (auto& v : out) v *= scale;
}

void RealFft::inverse(std::span<const cplx> in, std::span<double> out) const {
  // c2r destroys its input.
  std::vector<cplx> buf(in.begin(), in.end());
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(buf.data()), out.data());
}

int dealiased_grid_size(int modes, int degree) {
  // A product of `degree` factors band-limited to |k| <= modes, then multiplied
  // by one more factor in Jacobian assembly, is exact on retained modes when
  // n > (degree + 1) * modes.
  int n = (std::max(degree, 2) + 1) * std::max(modes, 1) + 2;
  if (n % 2) ++n;
  return n;
}

std::vector<double> synthesize(std::span<const cplx> modes, int n) {
  const int N = static_cast<int>(modes.size()) - 1;
  if (2 * N >= n) throw Error(ErrorKind::InvalidArgument, "too few grid points for synthesis");
  std::vector<cplx> spec(n / 2 + 1, cplx(0.0));
  spec[0] = cplx(modes[0].real(), 0.0);
  for (int k = 1; k <= N; ++k) spec[k] = modes[k];
  std::vector<double> out(n);
  RealFft(n).inverse(spec, out);
  return out;
}

std::vector<cplx> analyze(std::span<const double> values, int keep) {
  const int n = static_cast<int>(values.size());
  RealFft fft(n);
  std::vector<cplx> spec(fft.spectrum_size());
  fft.forward(values, spec);
  std::vector<cplx> out(keep + 1, cplx(0.0));
  for (int k = 0; k <= keep && k < static_cast<int>(spec.size()); ++k) out[k] = spec[k];
  return out;
}

}  // namespace gks
