#pragma once

#include <span>
#include <vector>

#include "gks/model.hpp"

namespace gks {

/// Real-to-complex transform of fixed length backed by FFTW. Plans are shared
/// per length; execute calls are safe from concurrent threads.
class RealFft {
 public:
  explicit RealFft(int n);

  int size() const { return n_; }
  int spectrum_size() const { return n_ / 2 + 1; }

  /// out[k] = (1/n) sum_j in[j] exp(-2 pi i j k / n), k = 0..n/2.
  void forward(std::span<const double> in, std::span<cplx> out) const;
  /// out[j] = sum_k in[k] exp(2 pi i j k / n) with Hermitian completion.
  void inverse(std::span<const cplx> in, std::span<double> out) const;

 private:
  int n_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Grid length used for pseudo-spectral products of a degree-`degree`
/// polynomial of a field with `modes` harmonics; products are alias-free for
/// every retained harmonic.
int dealiased_grid_size(int modes, int degree);

/// Physical values of sum_{|k|<=N} u_k exp(2 pi i k j / n) on n points, from
/// the nonnegative modes u_0..u_N (N < n/2).
std::vector<double> synthesize(std::span<const cplx> modes, int n);

/// Nonnegative Fourier modes 0..keep of equispaced samples.
std::vector<cplx> analyze(std::span<const double> values, int keep);

}  // namespace gks
