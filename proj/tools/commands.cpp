#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "gks/bloch.hpp"
#include "gks/error.hpp"
#include "gks/evolve.hpp"
#include "gks/io.hpp"
#include "gks/profile.hpp"
#include "gks/svg.hpp"
#include "gks/version.hpp"
#include "gks/whitham.hpp"

namespace gks::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

fs::path prepare(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

template <class Writer>
void write_stream(const fs::path& path, Writer&& writer) {
  std::ostringstream s;
  writer(s);
  write_text(path, s.str());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

double to_double(const std::string& text, const std::string& flag) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size() || !std::isfinite(v)) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError(flag + ": '" + text + "' is not a number");
  }
}

Dataset orbit_data(const PeriodicWave& wave, const std::string& title) {
  constexpr int points = 256;
  return Dataset{title,
                 {{"u", sample_profile(wave, points, 0)},
                  {"ux", sample_profile(wave, points, 1)},
                  {"uxx", sample_profile(wave, points, 2)}},
                 {}};
}

// Eigenvalue cloud plus the fitted critical curves, the two curves separated
// by a NaN break.
Dataset spectrum_data(const BlochSpectrum& spectrum, const CriticalFit* fit, const std::string& title) {
  Dataset d{title, {}, {}};
  auto& re = d.columns["re_lambda"];
  auto& im = d.columns["im_lambda"];
  for (const auto& row : spectrum.eigenvalues)
    for (const cplx& l : row) {
      re.push_back(l.real());
      im.push_back(l.imag());
    }
  if (fit) {
    auto& fr = d.columns["fit_re"];
    auto& fi = d.columns["fit_im"];
    constexpr int samples = 81;
    for (int j = 0; j < 2; ++j) {
      if (j > 0) {
        fr.push_back(kNaN);
        fi.push_back(kNaN);
      }
      for (int s = 0; s < samples; ++s) {
        const double xi = fit->xi_fit_radius * (2.0 * s / (samples - 1) - 1.0);
        const cplx l = fit->model(j, xi);
        fr.push_back(l.real());
        fi.push_back(l.imag());
      }
    }
  }
  return d;
}

struct FittedVerdict {
  std::optional<CriticalFit> fit;
  std::string fit_error;
  StabilityVerdict verdict;
};

FittedVerdict judge(const BlochSpectrum& spectrum) {
  FittedVerdict out;
  try {
    out.fit = fit_critical_expansion(spectrum);
    out.verdict = verify_conditions(spectrum, *out.fit);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::FitAmbiguity) throw;
    out.fit_error = e.what();
    out.verdict = verify_conditions_unfitted(spectrum);
  }
  return out;
}

std::string verdict_label(const BandNode* node) {
  if (!node || !node->classified) return "unclassified";
  return node->verdict.stable() ? "stable" : "unstable";
}

const BandNode* find_node(const BandReport& band, double c, double omega) {
  for (const BandNode& n : band.nodes)
    if (n.c == c && n.omega == omega) return &n;
  return nullptr;
}

double relative(double value, double reference) { return std::abs(value - reference) / std::abs(reference); }

}  // namespace

std::vector<double> parse_range(const std::string& text, const std::string& flag) {
  std::vector<std::string> parts;
  std::stringstream s(text);
  for (std::string p; std::getline(s, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError(flag + ": expected a:b:n, got '" + text + "'");
  const double a = to_double(parts[0], flag), b = to_double(parts[1], flag);
  const double nd = to_double(parts[2], flag);
  if (nd < 1 || nd != std::floor(nd)) throw UsageError(flag + ": count must be a positive integer");
  const int n = static_cast<int>(nd);
  if (n == 1) return {a};
  if (!(b > a)) throw UsageError(flag + ": need a < b when n > 1");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

std::vector<double> parse_coefficients(const std::string& text, const std::string& flag) {
  std::vector<double> v;
  std::stringstream s(text);
  for (std::string p; std::getline(s, p, ',');) v.push_back(to_double(p, flag));
  if (v.empty()) throw UsageError(flag + ": empty coefficient list");
  return v;
}

void write_manifest(const RunContext& ctx) {
  json doc{{"command", ctx.command}, {"version", version()}, {"resolved", ctx.resolved}};
  write_json(prepare(ctx.out) / (ctx.command + ".manifest.json"), doc);
}

void run_profile(const RunContext& ctx, const ProfileArgs& a) {
  ModelParams params;
  params.epsilon = a.epsilon;
  params.delta = a.delta;
  params.f = Polynomial(parse_coefficients(a.f, "--f"));
  params.validate();
  if (!(a.omega > 0.0)) throw UsageError("--omega must be positive");
  PathOptions path;
  path.solver.modes = a.modes;
  path.solver.gauge = a.gauge == "slope" ? Gauge::Slope : Gauge::Cosine;

  const PeriodicWave wave = solve_from_hopf(params, a.u0, a.c, a.omega, path);
  const fs::path out = prepare(ctx.out);
  const fs::path file = a.output.empty() ? out / "wave.json" : fs::path(a.output);
  if (file.has_parent_path()) prepare(file.parent_path());
  save_wave(file, wave, params);
  std::ostringstream title;
  title << "Profile orbit, ω = " << a.omega << ", c = " << a.c;
  write_text(out / "orbit.svg", emit_svg(orbit_data(wave, title.str()), PlotKind::Orbit));
  std::cout << "wave " << file.string() << "  X=" << wave.X() << " c=" << wave.c() << " q=" << wave.q()
            << " N=" << wave.N() << " residual=" << ode_residual(wave, params) << "\n";
}

void run_continue(const RunContext& ctx, const ContinueArgs& a) {
  const WaveRecord start = load_wave(a.from);
  FamilyGrid grid;
  grid.omega_values = parse_range(a.omega_range, "--omega-range");
  grid.c_values = a.c_range.empty() ? std::vector<double>{start.wave.c()} : parse_range(a.c_range, "--c-range");
  ContinuationOptions opt;
  opt.path.max_step = a.max_step;
  opt.workers = ctx.workers;
  const WaveFamily family = continue_family(start.wave, start.params, grid, opt);
  const fs::path dir = a.output.empty() ? ctx.out / "family" : fs::path(a.output);
  save_family(prepare(dir), family);
  std::cout << "family " << dir.string() << "  " << family.converged_count() << "/" << family.nodes.size()
            << " nodes converged\n";
  if (family.converged_count() == 0) throw Error(ErrorKind::NoConvergence, "no node of the grid converged");
}

void run_spectrum(const RunContext& ctx, const SpectrumArgs& a) {
  const WaveRecord rec = load_wave(a.wave);
  BlochOptions opt;
  opt.n_hill = a.nhill;
  opt.track_fraction = a.track_fraction;
  opt.workers = ctx.workers;
  const BlochSpectrum spectrum =
      compute_bloch_eigs(rec.wave, rec.params, default_xi_grid(rec.wave.X(), a.nxi, a.ncluster), opt);
  const FittedVerdict judged = judge(spectrum);
  const CriticalFit* fit = judged.fit ? &*judged.fit : nullptr;

  const fs::path out = prepare(ctx.out);
  write_stream(out / "spectrum.csv", [&](std::ostream& s) { write_spectrum_csv(s, spectrum); });
  json summary = spectrum_summary(spectrum, fit, judged.verdict);
  if (!judged.fit_error.empty()) summary["fit_error"] = judged.fit_error;
  summary["stable"] = judged.verdict.stable();
  write_json(out / "verdict.json", summary);

  Dataset full = spectrum_data(spectrum, fit, "Bloch spectrum");
  Dataset zoom = spectrum_data(spectrum, fit, "Near the origin");
  zoom.limits["x_min"] = a.re_min;
  std::vector<std::string> panels{emit_svg(full, PlotKind::Spectrum), emit_svg(zoom, PlotKind::Spectrum)};
  std::ostringstream title;
  title << "ω = " << rec.wave.omega() << ", c = " << rec.wave.c() << ": "
        << (judged.verdict.stable() ? "stable" : "unstable");
  write_text(out / "spectrum.svg", compose_svg(panels, 2, title.str()));
  std::cout << (judged.verdict.stable() ? "stable" : "unstable");
  if (fit) std::cout << "  a=(" << fit->a[0] << ", " << fit->a[1] << ") b=(" << fit->b[0] << ", " << fit->b[1] << ")";
  std::cout << "\n";
}

void run_band(const RunContext& ctx, const BandArgs& a) {
  const WaveFamily family = load_family(a.family);
  BandOptions opt;
  opt.bloch.n_hill = a.nhill;
  opt.bloch.workers = 1;
  opt.n_uniform = a.nxi;
  opt.n_cluster = a.ncluster;
  opt.workers = ctx.workers;
  const BandReport band = scan_band(family, opt);
  const fs::path out = prepare(ctx.out);
  write_json(out / "band.json", band_to_json(band));

  // The c-line with the most converged nodes supplies the example panels.
  int best_line = 0, best_count = -1;
  for (int ic = 0; ic < family.n_c(); ++ic) {
    int count = 0;
    for (int iw = 0; iw < family.n_omega(); ++iw) count += family.at(ic, iw).wave.has_value();
    if (count > best_count) best_count = count, best_line = ic;
  }
  std::vector<int> picks;
  for (int iw = 0; iw < family.n_omega(); ++iw)
    if (family.at(best_line, iw).wave) picks.push_back(iw);
  if (static_cast<int>(picks.size()) > a.panels) {
    std::vector<int> spread;
    for (int i = 0; i < a.panels; ++i)
      spread.push_back(picks[a.panels == 1 ? picks.size() / 2 : i * (picks.size() - 1) / (a.panels - 1)]);
    picks = spread;
  }

  std::vector<std::string> orbits, spectra;
  for (int iw : picks) {
    const FamilyNode& node = family.at(best_line, iw);
    std::ostringstream title;
    title << "ω = " << node.omega << ", c = " << node.c;
    orbits.push_back(emit_svg(orbit_data(*node.wave, title.str()), PlotKind::Orbit));
    BlochOptions bo = opt.bloch;
    bo.workers = ctx.workers;
    const BlochSpectrum spectrum =
        compute_bloch_eigs(*node.wave, family.params, default_xi_grid(node.wave->X(), a.nxi, a.ncluster), bo);
    const BandNode* verdict = find_node(band, node.c, node.omega);
    const CriticalFit* fit = verdict && verdict->fitted ? &verdict->fit : nullptr;
    spectra.push_back(emit_svg(spectrum_data(spectrum, fit, title.str() + " (" + verdict_label(verdict) + ")"),
                               PlotKind::Spectrum));
  }
  std::vector<std::string> bands;
  for (int ic = 0; ic < family.n_c(); ++ic) {
    const double c = family.grid.c_values[ic];
    Dataset d;
    std::ostringstream title;
    title << "Stability along c = " << c;
    d.title = title.str();
    for (const BandNode& n : band.nodes) {
      if (n.c != c) continue;
      d.columns["omega"].push_back(n.omega);
      d.columns["max_re"].push_back(n.classified ? n.max_real_part : kNaN);
      d.columns["stable"].push_back(n.classified && n.verdict.stable() ? 1.0 : 0.0);
      d.columns["classified"].push_back(n.classified ? 1.0 : 0.0);
    }
    if (d.columns.empty()) d.columns = {{"omega", {}}, {"max_re", {}}, {"stable", {}}};
    bands.push_back(emit_svg(d, PlotKind::Band));
  }
  std::vector<std::string> panels;
  panels.insert(panels.end(), orbits.begin(), orbits.end());
  panels.insert(panels.end(), spectra.begin(), spectra.end());
  panels.insert(panels.end(), bands.begin(), bands.end());
  const int columns = std::max<int>(1, std::max<std::size_t>(orbits.size(), 1));
  write_text(out / "band.svg", compose_svg(panels, std::min(columns, 4), "Wave family stability"));

  for (const auto& [c, list] : band.stable_intervals)
    for (const StableInterval& s : list)
      std::cout << "c=" << c << " stable omega in [" << s.omega_lo << ", " << s.omega_hi << "] (" << s.nodes
                << " nodes)\n";
  if (band.stable_intervals.empty()) std::cout << "no stable nodes\n";
}

void run_whitham(const RunContext& ctx, const WhithamArgs& a) {
  const WaveFamily family = load_family(a.family);
  DifferenceOptions diff;
  diff.richardson = a.richardson;
  const std::vector<WhithamNode> table = whitham_table(family, diff);
  if (table.empty()) throw Error(ErrorKind::TooFewNodes, "no family node has all four neighbors converged");

  // Bloch data only where the modulation system is defined.
  WaveFamily subset = family;
  for (FamilyNode& n : subset.nodes) {
    if (!n.wave) continue;
    n.wave.reset();
    n.failure = "not an interior node";
  }
  for (const WhithamNode& w : table) {
    subset.at(w.ic, w.iw).wave = family.at(w.ic, w.iw).wave;
    subset.at(w.ic, w.iw).failure.clear();
  }
  BandOptions bopt;
  bopt.bloch.n_hill = a.nhill;
  bopt.n_uniform = a.nxi;
  bopt.n_cluster = a.ncluster;
  bopt.workers = ctx.workers;
  const BandReport band = scan_band(subset, bopt);

  std::optional<ReducedKS> reduced;
  std::string reduced_error;
  try {
    reduced = reduced_ks_scan(family);
  } catch (const Error& e) {
    reduced_error = e.what();
  }
  auto reduced_at = [&](double omega) -> const ReducedKSNode* {
    if (!reduced) return nullptr;
    for (const ReducedKSNode& n : reduced->nodes)
      if (n.omega == omega && n.has_derivatives) return &n;
    return nullptr;
  };

  std::vector<WhithamRow> rows;
  json nodes = json::array();
  double worst = 0.0;
  int compared = 0;
  for (const WhithamNode& w : table) {
    const BandNode* b = find_node(band, w.chars.c, w.chars.omega);
    WhithamRow r;
    r.omega = w.chars.omega;
    r.c = w.chars.c;
    r.M = w.data.M;
    r.F = w.data.F;
    r.speed1 = w.chars.speeds[0];
    r.speed2 = w.chars.speeds[1];
    r.hyperbolic = w.chars.hyperbolic;
    r.a1 = r.a2 = r.b1 = r.b2 = kNaN;
    if (b && b->fitted) {
      r.a1 = b->fit.a[0];
      r.a2 = b->fit.a[1];
      r.b1 = b->fit.b[0];
      r.b2 = b->fit.b[1];
    }
    const ReducedKSNode* rk = w.chars.c == 0.0 ? reduced_at(w.chars.omega) : nullptr;
    r.dH = rk ? rk->dH : kNaN;
    r.verdict = verdict_label(b);
    rows.push_back(r);

    json e{{"c", r.c},
           {"omega", r.omega},
           {"hyperbolic", r.hyperbolic},
           {"comoving_speeds", {w.chars.comoving_speeds[0], w.chars.comoving_speeds[1]}},
           {"verdict", r.verdict}};
    if (b && b->fitted) {
      std::array<double, 2> as{b->fit.a[0], b->fit.a[1]};
      std::sort(as.begin(), as.end());
      const double err = std::max(relative(w.chars.comoving_speeds[0], as[0]), relative(w.chars.comoving_speeds[1], as[1]));
      e["a_sorted"] = as;
      e["relative_error"] = err;
      if (b->verdict.stable()) {
        worst = std::max(worst, err);
        ++compared;
        const ViscoelasticReport v = viscoelastic_check(b->fit, w.chars, family.params.epsilon, a.tolerance);
        e["viscoelastic"] = {{"b_asymmetry", v.b_asymmetry},
                             {"d", v.d},
                             {"predicted_b", v.predicted_b},
                             {"relative_error", v.relative_error},
                             {"pass", v.pass}};
      }
    }
    nodes.push_back(e);
  }

  json reduced_json = nullptr;
  if (reduced) {
    json list = json::array();
    for (const ReducedKSNode& n : reduced->nodes) {
      json e{{"omega", n.omega}, {"m", n.m}, {"H", n.H}};
      if (n.has_derivatives) {
        e["dm"] = n.dm;
        e["dH"] = n.dH;
        e["dH_negative"] = n.dH_negative;
        e["wave_equation"] = n.wave_equation;
      }
      const BandNode* b = find_node(band, 0.0, n.omega);
      e["verdict"] = verdict_label(b);
      list.push_back(e);
    }
    reduced_json = {{"omega_step", reduced->omega_step}, {"nodes", list}};
  }

  const fs::path out = prepare(ctx.out);
  write_stream(out / "whitham.csv", [&](std::ostream& s) { write_whitham_csv(s, rows); });
  json report{{"tolerance", a.tolerance},
              {"richardson", a.richardson},
              {"stable_nodes_compared", compared},
              {"max_relative_error", compared ? json(worst) : json(nullptr)},
              {"agreement", compared > 0 && worst <= a.tolerance},
              {"nodes", nodes},
              {"reduced_ks", reduced_json}};
  if (!reduced_error.empty()) report["reduced_ks_error"] = reduced_error;
  write_json(out / "whitham_report.json", report);
  std::cout << table.size() << " interior nodes, " << compared << " stable";
  if (compared) std::cout << ", max relative speed mismatch " << worst;
  std::cout << "\n";
}

void run_evolve(const RunContext& ctx, const EvolveArgs& a) {
  const WaveRecord rec = load_wave(a.wave);
  const PeriodicWave& wave = rec.wave;
  const double X = wave.X();

  SimConfig cfg;
  cfg.n_periods = a.periods;
  cfg.dt = a.dt;
  cfg.T_final = a.T;
  cfg.snapshot_times = geometric_times(std::min(1.0, a.T), a.T, a.snapshots);
  if (a.grid > 0) {
    cfg.n_grid = a.grid;
  } else {
    const double needed = std::max({32.0 * a.periods * std::max(1.0, X / kTwoPi),
                                    3.0 * (effective_bandwidth(wave, 1e-14) + 1) * a.periods, 64.0 * a.periods});
    cfg.n_grid = 1;
    while (cfg.n_grid < needed) cfg.n_grid *= 2;
  }
  cfg.validate(wave, rec.params);
  const double width = a.width > 0.0 ? a.width : 2.0 * X;
  const BumpKind kind = a.kind == "compact" ? BumpKind::Compact : BumpKind::Gaussian;
  const Perturbation pert = perturb(wave, rec.params, a.periods, cfg.n_grid, kind, a.amplitude, width);

  std::optional<CriticalFit> fit;
  std::vector<std::string> warnings;
  {
    BlochOptions bo;
    bo.n_hill = a.nhill;
    bo.workers = ctx.workers;
    try {
      fit = fit_critical_expansion(compute_bloch_eigs(wave, rec.params, default_xi_grid(X), bo));
    } catch (const Error& e) {
      warnings.push_back(std::string("critical fit unavailable: ") + e.what());
    }
  }

  const Trajectory traj = simulate(wave, rec.params, pert.field, cfg);
  const fs::path out = prepare(ctx.out);
  if (a.dump_snapshots) {
    const fs::path dir = prepare(out / "snapshots");
    for (std::size_t i = 0; i < traj.times.size(); ++i)
      save_snapshot(dir / ("snap_" + std::to_string(i)), traj.fields[i], traj.length, traj.times[i], traj.c);
  }

  const ResidualSeries series = measure_residuals(traj, wave);
  const double growth = series.growth(a.growth_horizon);
  EvolutionReport report;
  bool partial = true;
  if (fit && series.tracking_failures.empty()) {
    DecayOptions dopt;
    if (a.t_fit > 0.0) dopt.t_lo = a.t_fit;
    dopt.t_hi = a.T;
    dopt.center = pert.center;
    dopt.initial_width_squared = 2.0 * width * width;
    try {
      report = measure_decay(traj, wave, rec.params, *fit, dopt);
      partial = false;
    } catch (const Error& e) {
      warnings.push_back(std::string("decay measurement failed: ") + e.what());
    }
  }
  if (partial) {
    report.times = series.times;
    report.residual_L2 = series.residual_L2;
    report.residual_Linf = series.residual_Linf;
    report.unmodulated_Linf = series.unmodulated_Linf;
    report.psi_Linf = series.psi_Linf;
    for (const auto& p : series.psi)
      if (p) report.psi.push_back(*p);
    const double t_lo = a.t_fit > 0.0 ? a.t_fit : std::min(1.0, a.T);
    try {
      report.linf = fit_decay_exponent(series.times, series.residual_Linf, t_lo, a.T);
      report.l2 = fit_decay_exponent(series.times, series.residual_L2, t_lo, a.T);
    } catch (const Error& e) {
      warnings.push_back(std::string("decay fit failed: ") + e.what());
      report.linf.rate = report.l2.rate = kNaN;
    }
    report.pulses.speed = report.pulses.width_slope = {kNaN, kNaN};
    report.pulses.p = {kNaN, kNaN};
    report.separation_time = kNaN;
    for (const auto& f : series.tracking_failures) warnings.push_back(f);
  }
  report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());

  json doc = evolution_to_json(report);
  doc["partial"] = partial;
  doc["growth"] = {{"horizon", a.growth_horizon}, {"factor", std::isfinite(growth) ? json(growth) : json(nullptr)}};
  doc["perturbation"] = {{"kind", a.kind},     {"amplitude", a.amplitude}, {"width", width},
                         {"center", pert.center}, {"L1", pert.L1},        {"L2", pert.L2},
                         {"Linf", pert.Linf}};
  doc["simulation"] = {{"n_periods", cfg.n_periods}, {"n_grid", cfg.n_grid}, {"dt", cfg.dt},
                       {"T_final", cfg.T_final},     {"length", traj.length}, {"frame_speed", traj.c}};
  if (fit) doc["critical_fit"] = fit_to_json(*fit);
  write_json(out / "evolve_report.json", doc);
  write_stream(out / "timeseries.csv", [&](std::ostream& s) { write_timeseries_csv(s, report); });

  Dataset heat{"Phase gradient ψ_x", {}, {}};
  auto& hx = heat.columns["x"];
  auto& ht = heat.columns["t"];
  auto& hv = heat.columns["value"];
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (!series.psi[i]) continue;
    if (hx.empty()) hx = series.psi[i]->nodes;
    ht.push_back(series.times[i]);
    const auto g = series.psi[i]->gradient();
    hv.insert(hv.end(), g.begin(), g.end());
  }
  write_text(out / "psi_x.svg", emit_svg(heat, PlotKind::Heatmap));

  Dataset decay{"Residual decay", {}, {}};
  std::vector<double> t, linf, l2;
  for (std::size_t i = 0; i < report.times.size(); ++i)
    if (report.times[i] > 0.0) {
      t.push_back(report.times[i]);
      linf.push_back(report.residual_Linf[i]);
      l2.push_back(report.residual_L2[i]);
    }
  decay.columns["t"] = t;
  decay.columns["residual_Linf"] = linf;
  decay.columns["residual_L2"] = l2;
  // Fitted power laws through the geometric mean of the fit window.
  auto overlay = [&](const std::vector<double>& y, const ExponentFit& f) {
    std::vector<double> line(t.size(), kNaN);
    if (!std::isfinite(f.rate)) return line;
    const double t_lo = a.t_fit > 0.0 ? a.t_fit : (partial ? 0.0 : report.separation_time);
    double sum = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= t_lo && std::isfinite(y[i]) && y[i] > 0.0) {
        sum += std::log(y[i]) + f.rate * std::log1p(t[i]);
        ++n;
      }
    if (n == 0) return line;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i] >= t_lo) line[i] = std::exp(sum / n - f.rate * std::log1p(t[i]));
    return line;
  };
  decay.columns["fit_Linf"] = overlay(linf, report.linf);
  decay.columns["fit_L2"] = overlay(l2, report.l2);
  write_text(out / "decay.svg", emit_svg(decay, PlotKind::Decay));

  std::cout << "Linf rate " << report.linf.rate << ", L2 rate " << report.l2.rate << ", growth to t="
            << a.growth_horizon << " " << growth << (partial ? " (partial)" : "") << "\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
}

void run_report(const RunContext& ctx, const ReportArgs& a) {
  const fs::path dir = a.dir.empty() ? ctx.out : fs::path(a.dir);
  if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "'" + dir.string() + "' is not a directory");
  std::vector<fs::path> svgs, reports;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".svg") svgs.push_back(entry.path());
    if (ext == ".json") reports.push_back(entry.path());
  }
  std::sort(svgs.begin(), svgs.end());
  std::sort(reports.begin(), reports.end());

  auto escape = [](const std::string& s) {
    std::string o;
    for (char ch : s) {
      if (ch == '<') o += "&lt;";
      else if (ch == '>') o += "&gt;";
      else if (ch == '&') o += "&amp;";
      else o += ch;
    }
    return o;
  };
  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>gks report</title>\n"
       << "<style>body{font-family:sans-serif;margin:2em}pre{background:#f4f4f4;padding:1em;overflow:auto}"
       << "table{border-collapse:collapse}td,th{border:1px solid #ccc;padding:4px 8px}</style></head><body>\n"
       << "<h1>gks " << version() << " report</h1>\n";

  html << "<h2>Key numbers</h2>\n<table>\n";
  auto row = [&](const std::string& k, const json& v) {
    html << "<tr><th>" << escape(k) << "</th><td>" << escape(v.dump()) << "</td></tr>\n";
  };
  for (const auto& path : reports) {
    const std::string name = path.filename().string();
    json doc = json::parse(read_text(path), nullptr, false);
    if (doc.is_discarded()) continue;
    if (name == "verdict.json") {
      row("spectrum: stable", doc.value("stable", json(nullptr)));
      if (doc.contains("fit") && !doc["fit"].is_null()) row("spectrum: critical fit", doc["fit"]);
    } else if (name == "band.json") {
      row("band: stable intervals", doc["stable_intervals"]);
    } else if (name == "whitham_report.json") {
      row("whitham: max relative speed mismatch", doc["max_relative_error"]);
      row("whitham: agreement", doc["agreement"]);
    } else if (name == "evolve_report.json") {
      row("evolve: exponents", doc["exponents"]);
      row("evolve: pulse speeds", doc["pulses"]["speed"]);
      row("evolve: width slopes", doc["pulses"]["width_slope"]);
      row("evolve: growth", doc["growth"]);
    }
  }
  html << "</table>\n";

  for (const auto& path : svgs) {
    html << "<h2>" << escape(path.filename().string()) << "</h2>\n<div>" << read_text(path) << "</div>\n";
  }
  html << "<h2>Runs</h2>\n";
  for (const auto& path : reports) {
    if (path.filename().string().find(".manifest.json") == std::string::npos) continue;
    html << "<h3>" << escape(path.filename().string()) << "</h3>\n<pre>" << escape(read_text(path)) << "</pre>\n";
  }
  html << "</body></html>\n";
  write_text(prepare(ctx.out) / "report.html", html.str());
  std::cout << "report " << (ctx.out / "report.html").string() << " (" << svgs.size() << " figures)\n";
}

}  // namespace gks::cli
