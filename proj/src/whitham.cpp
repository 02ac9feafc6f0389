#include "gks/whitham.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gks/error.hpp"
#include "gks/fourier.hpp"

namespace gks {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const PeriodicWave* wave_at(const WaveFamily& family, int ic, int iw) {
  if (ic < 0 || iw < 0 || ic >= family.n_c() || iw >= family.n_omega()) return nullptr;
  const auto& node = family.at(ic, iw);
  return node.wave ? &*node.wave : nullptr;
}

bool is_burgers(const ModelParams& params) {
  const auto& c = params.f.coeffs();
  return c.size() == 3 && c[0] == 0.0 && c[1] == 0.0 && c[2] == 0.5;
}

// Centered difference of g along one grid direction through `center`.
template <class Sample>
Partial centered(Sample&& sample, int center, int count, double h, bool richardson) {
  auto get = [&](int i) -> std::optional<double> {
    if (i < 0 || i >= count) return std::nullopt;
    return sample(i);
  };
  auto lo = get(center - 1), hi = get(center + 1);
  if (!lo || !hi) throw Error(ErrorKind::TooFewNodes, "node lacks converged neighbors for a centered difference");
  Partial p;
  p.step = h;
  p.value = (*hi - *lo) / (2.0 * h);
  p.error = kNaN;
  auto lo2 = get(center - 2), hi2 = get(center + 2);
  if (lo2 && hi2) {
    const double wide = (*hi2 - *lo2) / (4.0 * h);
    p.error = std::abs(p.value - wide) / 3.0;
    if (richardson) p.value = (4.0 * p.value - wide) / 3.0;
  }
  return p;
}

std::array<cplx, 2> sorted_eigs(const Eigen::Matrix2d& m) {
  const double tr = m.trace(), det = m.determinant();
  const cplx root = std::sqrt(cplx(tr * tr - 4.0 * det, 0.0));
  std::array<cplx, 2> e{0.5 * (tr - root), 0.5 * (tr + root)};
  if (e[0].real() > e[1].real()) std::swap(e[0], e[1]);
  return e;
}

}  // namespace

Averages averaged_quantities(const PeriodicWave& wave, const ModelParams& params) {
  const int n = dealiased_grid_size(wave.N(), params.f.degree());
  const auto modes = wave.nonnegative_modes();
  std::vector<double> u = synthesize(modes, n);
  double sum = 0.0;
  for (double v : u) sum += params.f(v);
  return {wave.mode(0).real(), sum / n};
}

AveragedData averaged_data(const WaveFamily& family, int ic, int iw, const DifferenceOptions& options) {
  const PeriodicWave* w = wave_at(family, ic, iw);
  if (!w) throw Error(ErrorKind::TooFewNodes, "node did not converge");
  AveragedData d;
  d.c = family.grid.c_values.at(ic);
  d.omega = family.grid.omega_values.at(iw);
  const Averages avg = averaged_quantities(*w, family.params);
  d.M = avg.M;
  d.F = avg.F;
  if (family.n_c() < 3 || family.n_omega() < 3)
    throw Error(ErrorKind::TooFewNodes, "family needs at least 3 nodes in c and in omega");

  auto along_c = [&](int i) -> std::optional<Averages> {
    const PeriodicWave* v = wave_at(family, i, iw);
    if (!v) return std::nullopt;
    return averaged_quantities(*v, family.params);
  };
  auto along_w = [&](int i) -> std::optional<Averages> {
    const PeriodicWave* v = wave_at(family, ic, i);
    if (!v) return std::nullopt;
    return averaged_quantities(*v, family.params);
  };
  std::vector<std::optional<Averages>> cs(family.n_c()), ws(family.n_omega());
  for (int i = std::max(0, ic - 2); i <= std::min(family.n_c() - 1, ic + 2); ++i) cs[i] = along_c(i);
  for (int i = std::max(0, iw - 2); i <= std::min(family.n_omega() - 1, iw + 2); ++i) ws[i] = along_w(i);

  auto pick = [](const std::optional<Averages>& a, bool mass) -> std::optional<double> {
    if (!a) return std::nullopt;
    return mass ? a->M : a->F;
  };
  const double hc = family.grid.c_step(), hw = family.grid.omega_step();
  d.M_c = centered([&](int i) { return pick(cs[i], true); }, ic, family.n_c(), hc, options.richardson);
  d.F_c = centered([&](int i) { return pick(cs[i], false); }, ic, family.n_c(), hc, options.richardson);
  d.M_omega = centered([&](int i) { return pick(ws[i], true); }, iw, family.n_omega(), hw, options.richardson);
  d.F_omega = centered([&](int i) { return pick(ws[i], false); }, iw, family.n_omega(), hw, options.richardson);
  return d;
}

WhithamCharacteristics characteristics_from(const AveragedData& d) {
  WhithamCharacteristics ch;
  ch.c = d.c;
  ch.omega = d.omega;
  ch.A << d.M_c.value, d.M_omega.value, 0.0, 1.0;
  ch.B << d.F_c.value, d.F_omega.value, d.omega, d.c;
  const double det = ch.A.determinant();
  if (!(std::abs(det) >= 1e-12 * std::max(1.0, ch.A.cwiseAbs().maxCoeff())))
    throw Error(ErrorKind::DegenerateParametrization, "M_c vanishes; (c, omega) does not parametrize the averaged system");
  const Eigen::Matrix2d S = ch.A.inverse() * ch.B;
  const double tr = S.trace();
  ch.discriminant = tr * tr - 4.0 * S.determinant();
  ch.hyperbolic = ch.discriminant > 0.0;
  ch.eigenvalues = sorted_eigs(S);
  for (int j = 0; j < 2; ++j) {
    ch.speeds[j] = ch.eigenvalues[j].real();
    ch.comoving_speeds[j] = ch.speeds[j] - d.c;
  }

  // Same system with the 2h stencil only, for a step-size error estimate.
  ch.speed_error = kNaN;
  if (std::isfinite(d.M_c.error) && std::isfinite(d.M_omega.error) && std::isfinite(d.F_c.error) &&
      std::isfinite(d.F_omega.error)) {
    ch.speed_error = 0.0;
    Eigen::Matrix2d dA, dB;
    dA << d.M_c.error, d.M_omega.error, 0.0, 0.0;
    dB << d.F_c.error, d.F_omega.error, 0.0, 0.0;
    for (double sgn : {-1.0, 1.0}) {
      const Eigen::Matrix2d Ap = ch.A + 3.0 * sgn * dA;
      if (std::abs(Ap.determinant()) == 0.0) continue;
      const auto e = sorted_eigs(Ap.inverse() * (ch.B + 3.0 * sgn * dB));
      for (int j = 0; j < 2; ++j) ch.speed_error = std::max(ch.speed_error, std::abs(e[j] - ch.eigenvalues[j]));
    }
  }
  return ch;
}

WhithamCharacteristics whitham_characteristics(const WaveFamily& family, int ic, int iw,
                                               const DifferenceOptions& options) {
  return characteristics_from(averaged_data(family, ic, iw, options));
}

std::vector<WhithamNode> whitham_table(const WaveFamily& family, const DifferenceOptions& options) {
  std::vector<WhithamNode> out;
  for (int ic = 0; ic < family.n_c(); ++ic) {
    for (int iw = 0; iw < family.n_omega(); ++iw) {
      try {
        WhithamNode node{ic, iw, averaged_data(family, ic, iw, options), {}};
        node.chars = characteristics_from(node.data);
        out.push_back(std::move(node));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::TooFewNodes && e.kind() != ErrorKind::DegenerateParametrization) throw;
      }
    }
  }
  return out;
}

ReducedKS reduced_ks_scan(const WaveFamily& family) {
  if (!is_burgers(family.params)) throw Error(ErrorKind::InvalidArgument, "reduction requires f(u) = u^2/2");
  int ic = -1;
  for (int i = 0; i < family.n_c(); ++i)
    if (family.grid.c_values[i] == 0.0) ic = i;
  if (ic < 0) throw Error(ErrorKind::InvalidArgument, "family has no c = 0 line");

  ReducedKS out;
  out.omega_step = family.n_omega() > 1 ? family.grid.omega_step() : 0.0;
  std::vector<std::optional<ReducedKSNode>> line(family.n_omega());
  int converged = 0;
  for (int iw = 0; iw < family.n_omega(); ++iw) {
    const PeriodicWave* w = wave_at(family, ic, iw);
    if (!w) continue;
    const Averages a = averaged_quantities(*w, family.params);
    ReducedKSNode n;
    n.omega = family.grid.omega_values[iw];
    n.m = a.M;
    n.H = a.F;
    line[iw] = n;
    ++converged;
  }
  if (converged < 3) throw Error(ErrorKind::TooFewNodes, "need at least 3 converged nodes on the c = 0 line");
  const double h = out.omega_step;
  for (int iw = 0; iw < family.n_omega(); ++iw) {
    if (!line[iw]) continue;
    ReducedKSNode n = *line[iw];
    if (iw > 0 && iw + 1 < family.n_omega() && line[iw - 1] && line[iw + 1]) {
      n.dm = (line[iw + 1]->m - line[iw - 1]->m) / (2.0 * h);
      n.dH = (line[iw + 1]->H - line[iw - 1]->H) / (2.0 * h);
      n.has_derivatives = true;
      n.dH_negative = n.dH < 0.0;
      const double g = n.m - n.omega * n.dm;
      n.wave_equation = g * g + 4.0 * n.omega * n.dH > 0.0;
    }
    out.nodes.push_back(n);
  }
  return out;
}

std::array<cplx, 2> reduced_characteristics(const ReducedKSNode& node, double c) {
  Eigen::Matrix2d S;
  S << c + node.m - node.omega * node.dm, node.dH, node.omega, c;
  return sorted_eigs(S);
}

ViscoelasticReport viscoelastic_check(const CriticalFit& fit, const WhithamCharacteristics& chars, double epsilon,
                                      double tolerance) {
  (void)epsilon;
  ViscoelasticReport r;
  const double bmax = std::max(std::abs(fit.b[0]), std::abs(fit.b[1]));
  r.b_asymmetry = bmax > 0.0 ? std::abs(fit.b[0] - fit.b[1]) / bmax : 0.0;
  r.d = fit.b[0] + fit.b[1];
  const double a1 = chars.comoving_speeds[0], a2 = chars.comoving_speeds[1];
  if (a1 == a2) throw Error(ErrorKind::DegenerateParametrization, "coincident characteristic speeds");
  // lambda = -i a_j xi + mu_j xi^2 solves the quadratic through second order
  // with mu_j = a_j d / (a_k - a_j).
  r.predicted_b[0] = -a1 * r.d / (a2 - a1);
  r.predicted_b[1] = -a2 * r.d / (a1 - a2);
  r.relative_error = 0.0;
  for (int j = 0; j < 2; ++j)
    r.relative_error = std::max(r.relative_error, std::abs(r.predicted_b[j] - fit.b[j]) / std::max(bmax, 1e-300));
  r.pass = r.relative_error <= tolerance;
  return r;
}

WaveFamily galilean_shift(const WaveFamily& family, double sigma) {
  if (!is_burgers(family.params)) throw Error(ErrorKind::InvalidArgument, "Galilean shift requires f(u) = u^2/2");
  WaveFamily out = family;
  for (double& c : out.grid.c_values) c += sigma;
  for (auto& node : out.nodes) {
    node.c += sigma;
    if (node.wave) node.wave = node.wave->galilean_shift(sigma);
  }
  return out;
}

}  // namespace gks
