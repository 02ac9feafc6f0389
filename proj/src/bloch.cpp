#include "gks/bloch.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>

#include "gks/error.hpp"
#include "gks/fourier.hpp"
#include "dense_eig.hpp"

namespace gks {

int effective_bandwidth(const PeriodicWave& wave, double rtol) {
  double peak = 0.0;
  for (int k = 0; k <= wave.N(); ++k) peak = std::max(peak, std::abs(wave.mode(k)));
  int n = 0;
  for (int k = 1; k <= wave.N(); ++k)
    if (std::abs(wave.mode(k)) > rtol * peak) n = k;
  return n;
}

std::vector<cplx> linearization_coefficients(const PeriodicWave& wave, const ModelParams& params) {
  const int N = wave.N();
  const int deg = params.f.degree();
  const int keep = std::max(deg - 1, 1) * N;
  const int M = dealiased_grid_size(std::max(keep, 1), 2);
  std::vector<double> u = synthesize(wave.nonnegative_modes(), M);
  for (double& v : u) v = params.f(v, 1);
  return analyze(u, keep);
}

namespace {

Eigen::MatrixXcd hill_from_coefficients(const std::vector<cplx>& a, double X, double c, const ModelParams& p,
                                        double xi, int n_hill) {
  const int m = 2 * n_hill + 1;
  const int na = static_cast<int>(a.size()) - 1;
  const double K = kTwoPi / X;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(m, m);
  for (int j = -n_hill; j <= n_hill; ++j) {
    const double kap = xi + j * K;
    const cplx ik(0.0, kap);
    const double k2 = kap * kap;
    A(j + n_hill, j + n_hill) = -k2 * k2 + cplx(0.0, p.epsilon * k2 * kap) + p.delta * k2 + ik * c;
    if (kap == 0.0) continue;  // the whole row vanishes
    for (int l = std::max(-n_hill, j - na); l <= std::min(n_hill, j + na); ++l) {
      const int d = j - l;
      const cplx ad = d >= 0 ? a[d] : std::conj(a[-d]);
      A(j + n_hill, l + n_hill) -= ik * ad;
    }
  }
  return A;
}

}  // namespace

Eigen::MatrixXcd assemble_hill_matrix(const PeriodicWave& wave, const ModelParams& params, double xi, int n_hill) {
  params.validate();
  if (std::abs(xi) > kPi / wave.X() + 1e-12)
    throw Error(ErrorKind::InvalidArgument, "Bloch parameter outside [-pi/X, pi/X]");
  const int bw = effective_bandwidth(wave) * std::max(params.f.degree() - 1, 1);
  if (n_hill < 2 * bw)
    throw Error(ErrorKind::Truncation, "n_hill=" + std::to_string(n_hill) + " is below twice the bandwidth " +
                                           std::to_string(bw) + " of f'(u)");
  return hill_from_coefficients(linearization_coefficients(wave, params), wave.X(), wave.c(), params, xi, n_hill);
}

std::vector<double> default_xi_grid(double X, int n_uniform, int n_cluster) {
  const double edge = kPi / X;
  std::vector<double> xi;
  n_uniform += n_uniform % 2;  // keeps 0 on the uniform grid
  for (int m = 0; m < n_uniform; ++m) xi.push_back(-edge + 2.0 * edge * m / n_uniform);
  for (int m = 0; m < n_cluster; ++m) {
    const double e = n_cluster > 1 ? -3.0 + 2.0 * m / (n_cluster - 1) : -3.0;
    const double v = edge * std::pow(10.0, e);
    xi.push_back(v);
    xi.push_back(-v);
  }
  xi.push_back(0.0);
  std::sort(xi.begin(), xi.end());
  xi.erase(std::unique(xi.begin(), xi.end(), [&](double a, double b) { return std::abs(a - b) < 1e-14 * edge; }),
           xi.end());
  return xi;
}

namespace {

void sort_spectrum(std::vector<cplx>& v) {
  std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
}

std::vector<cplx> to_vector(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

// Two eigenpairs nearest `shift`, refined by shift-invert subspace iteration
// on their joint invariant subspace followed by a 2x2 Rayleigh-Ritz step. The
// pair is close to a Jordan block at small xi, where QR alone loses about half
// the working precision.
CriticalPair refine_pair(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& v1, const Eigen::VectorXcd& v2,
                         double xi) {
  Eigen::MatrixXcd V(A.rows(), 2);
  V.col(0) = v1;
  V.col(1) = v2;
  auto orth = [](const Eigen::MatrixXcd& W) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(W);
    return Eigen::MatrixXcd(qr.householderQ() * Eigen::MatrixXcd::Identity(W.rows(), W.cols()));
  };
  V = orth(V);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  for (int it = 0; it < 4; ++it) {
    Eigen::MatrixXcd W = lu.solve(V);
    if (!W.allFinite()) break;
    V = orth(W);
  }
  const Eigen::Matrix2cd B = V.adjoint() * (A * V);
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(B);
  CriticalPair pair;
  pair.xi = xi;
  for (int j = 0; j < 2; ++j) {
    pair.lambda[j] = es.eigenvalues()[j];
    pair.vectors[j] = (V * es.eigenvectors().col(j)).normalized();
  }
  return pair;
}

// Indices of the two entries of `ev` nearest the origin.
std::array<int, 2> two_nearest_zero(const Eigen::VectorXcd& ev) {
  std::vector<int> idx(ev.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(),
                    [&](int a, int b) { return std::abs(ev[a]) < std::abs(ev[b]); });
  return {idx[0], idx[1]};
}

struct XiResult {
  std::vector<cplx> eigenvalues;
  std::optional<CriticalPair> critical;
  std::optional<ZeroModeDiagnostics> zero;
  std::string failure;
};

ZeroModeDiagnostics zero_mode_diagnostics(const Eigen::MatrixXcd& A, const std::vector<cplx>& eigenvalues,
                                          const PeriodicWave& wave, int n_hill) {
  ZeroModeDiagnostics z;
  z.computed = true;
  std::vector<double> mods;
  for (cplx l : eigenvalues) mods.push_back(std::abs(l));
  std::sort(mods.begin(), mods.end());
  for (int i = 0; i < 3 && i < static_cast<int>(mods.size()); ++i) z.smallest_moduli[i] = mods[i];

  // The kernel is unchanged by row scaling; equilibrating the rows removes
  // the k^4 growth that would otherwise set the rounding floor.
  const double K = kTwoPi / wave.X();
  Eigen::MatrixXcd S = A;
  for (int j = -n_hill; j <= n_hill; ++j) {
    const double kap = j * K;
    S.row(j + n_hill) /= 1.0 + kap * kap * kap * kap;
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(S);
  const auto& sv = svd.singularValues();
  z.s_min = sv[sv.size() - 1];
  z.s_next = sv[sv.size() - 2];

  Eigen::VectorXcd du = Eigen::VectorXcd::Zero(2 * n_hill + 1);
  for (int k = -std::min(n_hill, wave.N()); k <= std::min(n_hill, wave.N()); ++k)
    du[k + n_hill] = cplx(0.0, K * k) * wave.mode(k);
  z.translation_residual = (A * du).norm() / du.norm();
  return z;
}

XiResult solve_one(const std::vector<cplx>& a, const PeriodicWave& wave, const ModelParams& params, double xi,
                   int n_hill, double track_radius) {
  XiResult out;
  Eigen::MatrixXcd A = hill_from_coefficients(a, wave.X(), wave.c(), params, xi, n_hill);
  const bool track = xi != 0.0 && std::abs(xi) <= track_radius;

  if (xi == 0.0) {
    // Row j = 0 vanishes identically (conservation form), so 0 is an exact
    // eigenvalue and the rest of the spectrum is that of the minor.
    std::vector<int> keep;
    for (int i = 0; i < A.rows(); ++i)
      if (A.row(i).cwiseAbs().maxCoeff() != 0.0) keep.push_back(i);
    Eigen::MatrixXcd minor(keep.size(), keep.size());
    for (std::size_t r = 0; r < keep.size(); ++r)
      for (std::size_t s = 0; s < keep.size(); ++s) minor(r, s) = A(keep[r], keep[s]);
    Eigen::VectorXcd ev;
    if (!detail::dense_eig(minor, ev)) {
      out.failure = "eigensolver did not converge at xi = 0";
      return out;
    }
    out.eigenvalues = to_vector(ev);
    out.eigenvalues.insert(out.eigenvalues.end(), A.rows() - keep.size(), cplx(0.0));
    sort_spectrum(out.eigenvalues);
    out.zero = zero_mode_diagnostics(A, out.eigenvalues, wave, n_hill);
    return out;
  }

  Eigen::VectorXcd ev;
  Eigen::MatrixXcd vecs;
  if (!detail::dense_eig(A, ev, track ? &vecs : nullptr)) {
    out.failure = "eigensolver did not converge at xi = " + std::to_string(xi);
    return out;
  }
  if (track) {
    const auto [i0, i1] = two_nearest_zero(ev);
    CriticalPair pair = refine_pair(A, vecs.col(i0), vecs.col(i1), xi);
    ev[i0] = pair.lambda[0];
    ev[i1] = pair.lambda[1];
    out.critical = std::move(pair);
  }
  out.eigenvalues = to_vector(ev);
  sort_spectrum(out.eigenvalues);
  return out;
}

}  // namespace

BlochSpectrum compute_bloch_eigs(const PeriodicWave& wave, const ModelParams& params,
                                 const std::vector<double>& xi_grid, const BlochOptions& options) {
  if (xi_grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty Bloch grid");
  const double edge = kPi / wave.X();
  for (double xi : xi_grid)
    if (xi < -edge - 1e-12 || xi > edge + 1e-12)
      throw Error(ErrorKind::InvalidArgument, "Bloch parameter outside [-pi/X, pi/X)");
  // Validates n_hill against the wave.
  (void)assemble_hill_matrix(wave, params, 0.0, options.n_hill);

  BlochSpectrum spec;
  spec.xi = xi_grid;
  spec.n_hill = options.n_hill;
  spec.X = wave.X();
  spec.track_radius = options.track_fraction * edge;
  spec.eigenvalues.resize(xi_grid.size());
  const std::vector<cplx> a = linearization_coefficients(wave, params);

  std::vector<XiResult> results(xi_grid.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < xi_grid.size(); i += stride)
      results[i] = solve_one(a, wave, params, xi_grid[i], options.n_hill, spec.track_radius);
  };
  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < workers; ++w) jobs.push_back(std::async(std::launch::async, work, w, workers));
    for (auto& j : jobs) j.get();
  }

  for (std::size_t i = 0; i < results.size(); ++i) {
    auto& r = results[i];
    if (!r.failure.empty()) spec.failures[static_cast<int>(i)] = r.failure;
    spec.eigenvalues[i] = std::move(r.eigenvalues);
    if (r.critical) spec.critical.push_back(std::move(*r.critical));
    if (r.zero) spec.zero = *r.zero;
  }
  return spec;
}

// ---------------------------------------------------------------------------

cplx CriticalFit::model(int j, double xi) const {
  const auto& h = higher[j];
  const double x2 = xi * xi;
  const double re = -b[j] * x2 + h[0] * x2 * xi + h[1] * x2 * x2;
  const double im = -a[j] * xi + h[2] * x2 * xi;
  return {re, im};
}

namespace {

// Least squares y ~ sum_c coef_c * x^{powers_c}.
Eigen::VectorXd poly_fit(const std::vector<double>& x, const std::vector<double>& y, std::initializer_list<int> powers) {
  Eigen::MatrixXd A(x.size(), powers.size());
  Eigen::VectorXd rhs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    int c = 0;
    for (int p : powers) A(i, c++) = std::pow(x[i], p);
    rhs[i] = y[i];
  }
  return A.colPivHouseholderQr().solve(rhs);
}

struct Track {
  std::vector<double> xi;
  std::array<std::vector<cplx>, 2> lambda;
};

// Follows the two critical curves outward along one side of xi = 0. Vectors
// are normalized against the xi -> 0 kernel direction and the remainder is
// divided by xi, which resolves the Jordan degeneracy: the rescaled vectors
// converge to distinct limits whenever the transport speeds differ.
Track follow_side(std::vector<const CriticalPair*> side) {
  Track t;
  if (side.empty()) return t;
  std::sort(side.begin(), side.end(),
            [](const CriticalPair* p, const CriticalPair* q) { return std::abs(p->xi) < std::abs(q->xi); });

  // Common direction: average of the two vectors at the smallest |xi|, phase-aligned.
  const CriticalPair& first = *side.front();
  const cplx phase = first.vectors[0].dot(first.vectors[1]);
  Eigen::VectorXcd u0 = first.vectors[0] + first.vectors[1] * std::polar(1.0, -std::arg(phase));
  u0.normalize();

  auto rescaled = [&](const CriticalPair& p, int j) -> Eigen::VectorXcd {
    const cplx proj = u0.dot(p.vectors[j]);
    Eigen::VectorXcd v = p.vectors[j] / proj;
    return (v - u0) / p.xi;
  };

  // Initial labeling by transport speed -Im(lambda)/xi, ascending.
  std::array<int, 2> order{0, 1};
  if (-first.lambda[0].imag() / first.xi > -first.lambda[1].imag() / first.xi) order = {1, 0};
  std::array<Eigen::VectorXcd, 2> prev{rescaled(first, order[0]), rescaled(first, order[1])};
  t.xi.push_back(first.xi);
  t.lambda[0].push_back(first.lambda[order[0]]);
  t.lambda[1].push_back(first.lambda[order[1]]);

  for (std::size_t n = 1; n < side.size(); ++n) {
    const CriticalPair& p = *side[n];
    std::array<Eigen::VectorXcd, 2> cur{rescaled(p, 0), rescaled(p, 1)};
    const double keep = (prev[0] - cur[0]).norm() + (prev[1] - cur[1]).norm();
    const double swap = (prev[0] - cur[1]).norm() + (prev[1] - cur[0]).norm();
    if (std::min(keep, swap) > 0.5 * std::max(keep, swap))
      throw Error(ErrorKind::FitAmbiguity, "critical curves cannot be matched between xi=" +
                                               std::to_string(side[n - 1]->xi) + " and xi=" + std::to_string(p.xi) +
                                               " (match costs " + std::to_string(keep) + ", " +
                                               std::to_string(swap) + ")");
    std::array<int, 2> o = keep <= swap ? std::array<int, 2>{0, 1} : std::array<int, 2>{1, 0};
    t.xi.push_back(p.xi);
    t.lambda[0].push_back(p.lambda[o[0]]);
    t.lambda[1].push_back(p.lambda[o[1]]);
    prev = {cur[o[0]], cur[o[1]]};
  }
  return t;
}

}  // namespace

CriticalFit fit_critical_expansion(const BlochSpectrum& spectrum, std::optional<double> xi_fit_radius) {
  const double radius = xi_fit_radius.value_or(spectrum.track_radius);
  if (radius > spectrum.track_radius * (1.0 + 1e-12))
    throw Error(ErrorKind::InvalidArgument, "fit radius exceeds the tracked region of the spectrum");
  std::vector<const CriticalPair*> pos, neg;
  for (const auto& p : spectrum.critical) {
    if (std::abs(p.xi) > radius) continue;
    (p.xi > 0 ? pos : neg).push_back(&p);
  }
  if (pos.size() + neg.size() < 5)
    throw Error(ErrorKind::InsufficientResolution, "too few Bloch parameters inside the fit radius");

  const Track tp = follow_side(pos), tn = follow_side(neg);
  CriticalFit fit;
  fit.xi_fit_radius = radius;
  double worst = 0.0, scale = 0.0;
  for (int j = 0; j < 2; ++j) {
    std::vector<double> x, re, im;
    for (const Track* t : {&tp, &tn}) {
      for (std::size_t i = 0; i < t->xi.size(); ++i) {
        x.push_back(t->xi[i]);
        re.push_back(t->lambda[j][i].real());
        im.push_back(t->lambda[j][i].imag());
      }
    }
    const Eigen::VectorXd cr = poly_fit(x, re, {2, 3, 4});
    const Eigen::VectorXd ci = poly_fit(x, im, {1, 3});
    fit.b[j] = -cr[0];
    fit.a[j] = -ci[0];
    fit.higher[j] = {cr[1], cr[2], ci[1]};
    for (std::size_t i = 0; i < x.size(); ++i) {
      worst = std::max(worst, std::abs(cplx(re[i], im[i]) - fit.model(j, x[i])));
      scale = std::max(scale, std::abs(cplx(re[i], im[i])));
    }
    auto side_a = [&](const Track& t) {
      if (t.xi.size() < 2) return std::numeric_limits<double>::quiet_NaN();
      std::vector<double> y;
      for (cplx l : t.lambda[j]) y.push_back(l.imag());
      return -poly_fit(t.xi, y, {1, 3})[0];
    };
    fit.a_positive[j] = side_a(tp);
    fit.a_negative[j] = side_a(tn);
  }
  fit.fit_residual = scale > 0.0 ? worst / scale : 0.0;
  if (fit.a[0] > fit.a[1]) {
    std::swap(fit.a[0], fit.a[1]);
    std::swap(fit.b[0], fit.b[1]);
    std::swap(fit.higher[0], fit.higher[1]);
    std::swap(fit.a_positive[0], fit.a_positive[1]);
    std::swap(fit.a_negative[0], fit.a_negative[1]);
  }
  return fit;
}

namespace {

StabilityVerdict verdict_impl(const BlochSpectrum& spectrum, const CriticalFit* fit, const VerdictOptions& opt) {
  const double edge = kPi / spectrum.X;
  int zero_index = -1;
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spectrum.xi.size(); ++i) {
    if (spectrum.xi[i] == 0.0) zero_index = static_cast<int>(i);
    else smallest = std::min(smallest, std::abs(spectrum.xi[i]));
  }
  if (zero_index < 0 || !spectrum.zero.computed)
    throw Error(ErrorKind::InsufficientResolution, "Bloch grid does not contain xi = 0");
  if (smallest > 1e-3 * edge * (1.0 + 1e-9))
    throw Error(ErrorKind::InsufficientResolution, "Bloch grid does not resolve |xi| <= 1e-3 pi/X");
  if (spectrum.failures.count(zero_index))
    throw Error(ErrorKind::EigenFailure, spectrum.failures.at(zero_index));

  StabilityVerdict v;
  const ZeroModeDiagnostics& z = spectrum.zero;
  const int near_zero = static_cast<int>(z.smallest_moduli[0] < opt.zero_accept) +
                        static_cast<int>(z.smallest_moduli[1] < opt.zero_accept) +
                        static_cast<int>(z.smallest_moduli[2] < opt.zero_accept);
  v.D3 = near_zero == 2 && z.smallest_moduli[2] > opt.zero_separate;
  v.H4 = z.s_min < opt.kernel_tol && z.s_next >= opt.kernel_tol;
  v.H3 = fit && std::abs(fit->a[0] - fit->a[1]) >
                   opt.distinct_rtol * std::max(1.0, std::abs(fit->a[0]) + std::abs(fit->a[1]));
  const double exclusion = fit ? fit->xi_fit_radius : spectrum.track_radius;

  double max_off = -std::numeric_limits<double>::infinity();
  double theta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < spectrum.xi.size(); ++i) {
    const double xi = spectrum.xi[i];
    if (xi == 0.0 || spectrum.failures.count(static_cast<int>(i))) continue;
    std::vector<cplx> ev = spectrum.eigenvalues[i];
    if (std::abs(xi) < exclusion) {
      // Remove the critical pair; D2 governs it.
      std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
      for (int j = 0; j < 2 && j < static_cast<int>(ev.size()); ++j) theta = std::min(theta, -ev[j].real() / (xi * xi));
      ev.erase(ev.begin(), ev.begin() + std::min<std::size_t>(2, ev.size()));
    }
    for (cplx l : ev) max_off = std::max(max_off, l.real());
  }
  v.D1 = max_off < -opt.stable_margin && spectrum.failures.empty();
  v.theta = std::isfinite(theta) ? theta : 0.0;
  v.D2 = std::isfinite(theta) && theta > 0.0;

  v.margins["max_re_off_critical"] = max_off;
  v.margins["theta"] = v.theta;
  v.margins["zero_modulus_1"] = z.smallest_moduli[0];
  v.margins["zero_modulus_2"] = z.smallest_moduli[1];
  v.margins["zero_modulus_3"] = z.smallest_moduli[2];
  v.margins["kernel_s_min"] = z.s_min;
  v.margins["kernel_s_next"] = z.s_next;
  v.margins["translation_residual"] = z.translation_residual;
  if (fit) v.margins["a_gap"] = std::abs(fit->a[0] - fit->a[1]);
  return v;
}

}  // namespace

StabilityVerdict verify_conditions(const BlochSpectrum& spectrum, const CriticalFit& fit, const VerdictOptions& opt) {
  return verdict_impl(spectrum, &fit, opt);
}

StabilityVerdict verify_conditions_unfitted(const BlochSpectrum& spectrum, const VerdictOptions& opt) {
  return verdict_impl(spectrum, nullptr, opt);
}

// ---------------------------------------------------------------------------

std::vector<cplx> oracle_fd_spectrum(const PeriodicWave& wave, const ModelParams& params, double xi, int points) {
  if (points < 64) throw Error(ErrorKind::InvalidArgument, "finite-difference oracle needs at least 64 points");
  const int M = points;
  const double h = wave.X() / M;
  const cplx bloch = std::polar(1.0, xi * wave.X());
  // Column index and Bloch factor of the node m + offset.
  auto wrap = [&](int m) -> std::pair<int, cplx> {
    int k = m;
    cplx f(1.0);
    while (k >= M) { k -= M; f *= bloch; }
    while (k < 0) { k += M; f /= bloch; }
    return {k, f};
  };
  std::vector<double> coef(M);
  for (int m = 0; m < M; ++m) coef[m] = wave.c() - params.f(eval_profile(wave, h * m), 1);

  static constexpr double d1[] = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};              // offsets -2..2
  static constexpr double d2[] = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};      // -2..2
  static constexpr double d3[] = {1.0 / 8, -1.0, 13.0 / 8, 0.0, -13.0 / 8, 1.0, -1.0 / 8};      // -3..3
  static constexpr double d4[] = {-1.0 / 6, 2.0, -13.0 / 2, 28.0 / 3, -13.0 / 2, 2.0, -1.0 / 6};  // -3..3

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M, M);
  for (int m = 0; m < M; ++m) {
    for (int o = -2; o <= 2; ++o) {
      auto [k, f] = wrap(m + o);
      A(m, k) += f * (d1[o + 2] / h * coef[k] - params.delta * d2[o + 2] / (h * h));
    }
    for (int o = -3; o <= 3; ++o) {
      auto [k, f] = wrap(m + o);
      A(m, k) -= f * (d4[o + 3] / (h * h * h * h) + params.epsilon * d3[o + 3] / (h * h * h));
    }
  }

  std::vector<cplx> out;
  if (xi == 0.0) {
    // Constants are an exact left null vector of the conservative stencil;
    // rotate them onto e_0 and drop that row so the exact zero is not split.
    Eigen::VectorXcd e = Eigen::VectorXcd::Constant(M, 1.0 / std::sqrt(static_cast<double>(M)));
    Eigen::VectorXcd v = e;
    v[0] -= 1.0;  // Householder vector mapping e to e_0
    const double vv = v.squaredNorm();
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Identity(M, M) - (2.0 / vv) * v * v.adjoint();
    Eigen::MatrixXcd B = H * A * H;
    Eigen::VectorXcd ev;
    if (!detail::dense_eig(B.bottomRightCorner(M - 1, M - 1), ev))
      throw Error(ErrorKind::EigenFailure, "finite-difference eigensolve failed");
    out = to_vector(ev);
    out.push_back(0.0);
  } else {
    Eigen::VectorXcd ev;
    if (!detail::dense_eig(A, ev)) throw Error(ErrorKind::EigenFailure, "finite-difference eigensolve failed");
    out = to_vector(ev);
  }
  sort_spectrum(out);
  return out;
}

// ---------------------------------------------------------------------------

BandReport scan_band(const WaveFamily& family, const BandOptions& options) {
  BandReport rep;
  rep.nodes.resize(family.nodes.size());
  auto classify = [&](std::size_t i) {
    const FamilyNode& fn = family.nodes[i];
    BandNode& bn = rep.nodes[i];
    bn.c = fn.c;
    bn.omega = fn.omega;
    if (!fn.wave) {
      bn.error = fn.failure.empty() ? "no wave" : fn.failure;
      return;
    }
    try {
      const PeriodicWave& w = *fn.wave;
      const auto grid = default_xi_grid(w.X(), options.n_uniform, options.n_cluster);
      BlochSpectrum spec = compute_bloch_eigs(w, family.params, grid, options.bloch);
      try {
        bn.fit = fit_critical_expansion(spec);
        bn.fitted = true;
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::FitAmbiguity) throw;
        bn.fit_error = e.what();
      }
      bn.verdict = bn.fitted ? verify_conditions(spec, bn.fit, options.verdict)
                             : verify_conditions_unfitted(spec, options.verdict);
      bn.max_real_part = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < spec.xi.size(); ++k)
        if (spec.xi[k] != 0.0)
          for (cplx l : spec.eigenvalues[k]) bn.max_real_part = std::max(bn.max_real_part, l.real());
      bn.classified = true;
    } catch (const Error& e) {
      bn.error = e.what();
    }
  };
  const int workers = std::max(1, options.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < rep.nodes.size(); ++i) classify(i);
  } else {
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < workers; ++w)
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < rep.nodes.size(); i += workers) classify(i);
      }));
    for (auto& j : jobs) j.get();
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (int ic = 0; ic < family.n_c(); ++ic) {
    auto& intervals = rep.stable_intervals[family.grid.c_values[ic]];
    const int nw = family.n_omega();
    auto stable = [&](int iw) {
      const BandNode& n = rep.nodes[ic * nw + iw];
      return n.classified && n.verdict.stable();
    };
    for (int iw = 0; iw < nw;) {
      if (!stable(iw)) {
        ++iw;
        continue;
      }
      int end = iw;
      while (end + 1 < nw && stable(end + 1)) ++end;
      StableInterval s;
      s.omega_lo = family.grid.omega_values[iw];
      s.omega_hi = family.grid.omega_values[end];
      s.bracket_lo = iw > 0 ? family.grid.omega_values[iw - 1] : nan;
      s.bracket_hi = end + 1 < nw ? family.grid.omega_values[end + 1] : nan;
      s.nodes = end - iw + 1;
      intervals.push_back(s);
      iw = end + 1;
    }
  }
  return rep;
}

}  // namespace gks
