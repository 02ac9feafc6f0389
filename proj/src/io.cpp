#include "gks/io.hpp"

#include <bit>
#include <cstring>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "gks/error.hpp"

namespace gks {

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
T require(const json& doc, const char* key) {
  if (!doc.contains(key)) throw Error(ErrorKind::Io, std::string("missing field '") + key + "'");
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Io, std::string("bad field '") + key + "': " + e.what());
  }
}

json parse_file(const fs::path& path) {
  try {
    return json::parse(read_text(path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Io, path.string() + ": " + e.what());
  }
}

std::string node_file(int ic, int iw) { return "wave_c" + std::to_string(ic) + "_w" + std::to_string(iw) + ".json"; }

// Shortest round-trip text for a double.
std::string fmt(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

json wave_to_json(const PeriodicWave& wave, const ModelParams& params) {
  std::vector<double> re, im;
  for (const cplx& z : wave.coeffs()) {
    re.push_back(z.real());
    im.push_back(z.imag());
  }
  return json{{"X", wave.X()},           {"c", wave.c()},       {"q", wave.q()},
              {"epsilon", params.epsilon}, {"delta", params.delta}, {"f", params.f.coeffs()},
              {"coeffs_re", re},           {"coeffs_im", im}};
}

WaveRecord wave_from_json(const json& doc) {
  ModelParams params;
  params.epsilon = require<double>(doc, "epsilon");
  params.delta = require<double>(doc, "delta");
  params.f = Polynomial(require<std::vector<double>>(doc, "f"));
  params.validate();
  const auto re = require<std::vector<double>>(doc, "coeffs_re");
  const auto im = require<std::vector<double>>(doc, "coeffs_im");
  if (re.size() != im.size()) throw Error(ErrorKind::Io, "coeffs_re and coeffs_im differ in length");
  std::vector<cplx> coeffs(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) coeffs[i] = cplx(re[i], im[i]);
  return {PeriodicWave::from_two_sided(require<double>(doc, "X"), require<double>(doc, "c"),
                                       require<double>(doc, "q"), std::move(coeffs)),
          params};
}

void save_wave(const fs::path& path, const PeriodicWave& wave, const ModelParams& params) {
  write_text(path, wave_to_json(wave, params).dump(2) + "\n");
}

WaveRecord load_wave(const fs::path& path) { return wave_from_json(parse_file(path)); }

void save_family(const fs::path& dir, const WaveFamily& family) {
  fs::create_directories(dir);
  json nodes = json::array(), failures = json::array();
  for (int ic = 0; ic < family.n_c(); ++ic) {
    for (int iw = 0; iw < family.n_omega(); ++iw) {
      const FamilyNode& node = family.at(ic, iw);
      json entry{{"ic", ic}, {"iw", iw}, {"c", node.c}, {"omega", node.omega}};
      if (node.wave) {
        entry["file"] = node_file(ic, iw);
        save_wave(dir / node_file(ic, iw), *node.wave, family.params);
        nodes.push_back(entry);
      } else {
        entry["message"] = node.failure;
        failures.push_back(entry);
      }
    }
  }
  json index{{"grid", {{"c_values", family.grid.c_values}, {"omega_values", family.grid.omega_values}}},
             {"gauge", to_string(family.gauge)},
             {"params", {{"epsilon", family.params.epsilon},
                         {"delta", family.params.delta},
                         {"f", family.params.f.coeffs()}}},
             {"nodes", nodes},
             {"failures", failures}};
  write_text(dir / "index.json", index.dump(2) + "\n");
}

WaveFamily load_family(const fs::path& dir) {
  const json index = parse_file(dir / "index.json");
  WaveFamily family;
  const json& grid = index.at("grid");
  family.grid.c_values = require<std::vector<double>>(grid, "c_values");
  family.grid.omega_values = require<std::vector<double>>(grid, "omega_values");
  family.grid.validate();
  const std::string gauge = require<std::string>(index, "gauge");
  family.gauge = gauge == to_string(Gauge::Slope) ? Gauge::Slope : Gauge::Cosine;
  const json& p = index.at("params");
  family.params.epsilon = require<double>(p, "epsilon");
  family.params.delta = require<double>(p, "delta");
  family.params.f = Polynomial(require<std::vector<double>>(p, "f"));
  family.nodes.resize(family.grid.c_values.size() * family.grid.omega_values.size());
  for (int ic = 0; ic < family.n_c(); ++ic)
    for (int iw = 0; iw < family.n_omega(); ++iw) {
      family.at(ic, iw).c = family.grid.c_values[ic];
      family.at(ic, iw).omega = family.grid.omega_values[iw];
      family.at(ic, iw).failure = "missing from archive";
    }
  for (const json& e : index.at("nodes")) {
    FamilyNode& node = family.at(require<int>(e, "ic"), require<int>(e, "iw"));
    node.wave = load_wave(dir / require<std::string>(e, "file")).wave;
    node.failure.clear();
  }
  for (const json& e : index.at("failures"))
    family.at(require<int>(e, "ic"), require<int>(e, "iw")).failure = require<std::string>(e, "message");
  return family;
}

void write_spectrum_csv(std::ostream& out, const BlochSpectrum& spectrum) {
  out << "xi,re_lambda,im_lambda,surface_id\n";
  for (std::size_t i = 0; i < spectrum.xi.size(); ++i) {
    const auto& ev = spectrum.eigenvalues[i];
    for (std::size_t j = 0; j < ev.size(); ++j)
      out << fmt(spectrum.xi[i]) << ',' << fmt(ev[j].real()) << ',' << fmt(ev[j].imag()) << ',' << j << '\n';
  }
}

json fit_to_json(const CriticalFit& fit) {
  return json{{"a", {fit.a[0], fit.a[1]}},
              {"b", {fit.b[0], fit.b[1]}},
              {"higher", {fit.higher[0], fit.higher[1]}},
              {"fit_residual", fit.fit_residual},
              {"xi_fit_radius", fit.xi_fit_radius},
              {"a_positive", {fit.a_positive[0], fit.a_positive[1]}},
              {"a_negative", {fit.a_negative[0], fit.a_negative[1]}}};
}

json verdict_to_json(const StabilityVerdict& v) {
  json margins = json::object();
  for (const auto& [k, x] : v.margins) margins[k] = number(x);
  return json{{"D1", v.D1}, {"D2", v.D2},         {"theta", number(v.theta)}, {"D3", v.D3},
              {"H3", v.H3}, {"H4", v.H4},         {"stable", v.stable()},     {"margins", margins}};
}

json spectrum_summary(const BlochSpectrum& spectrum, const CriticalFit* fit, const StabilityVerdict& verdict) {
  json zero{{"smallest_moduli", spectrum.zero.smallest_moduli},
            {"s_min", spectrum.zero.s_min},
            {"s_next", spectrum.zero.s_next},
            {"translation_residual", spectrum.zero.translation_residual}};
  json failures = json::object();
  for (const auto& [i, msg] : spectrum.failures) failures[fmt(spectrum.xi[i])] = msg;
  return json{{"n_hill", spectrum.n_hill}, {"X", spectrum.X},
              {"n_xi", spectrum.xi.size()}, {"fit", fit ? fit_to_json(*fit) : json(nullptr)},
              {"verdict", verdict_to_json(verdict)}, {"zero_modes", zero},
              {"failures", failures}};
}

json band_to_json(const BandReport& report) {
  json nodes = json::array();
  for (const BandNode& n : report.nodes) {
    json e{{"c", n.c}, {"omega", n.omega}, {"classified", n.classified}};
    if (n.classified) {
      e["verdict"] = verdict_to_json(n.verdict);
      e["max_real_part"] = number(n.max_real_part);
      e["fit"] = n.fitted ? fit_to_json(n.fit) : json(nullptr);
      if (!n.fitted) e["fit_error"] = n.fit_error;
    } else {
      e["error"] = n.error;
    }
    nodes.push_back(e);
  }
  json intervals = json::array();
  for (const auto& [c, list] : report.stable_intervals)
    for (const StableInterval& s : list)
      intervals.push_back({{"c", c},
                           {"omega_lo", s.omega_lo},
                           {"omega_hi", s.omega_hi},
                           {"bracket_lo", number(s.bracket_lo)},
                           {"bracket_hi", number(s.bracket_hi)},
                           {"nodes", s.nodes}});
  return json{{"nodes", nodes}, {"stable_intervals", intervals}};
}

void write_whitham_csv(std::ostream& out, const std::vector<WhithamRow>& rows) {
  out << "omega,c,M,F,speed1,speed2,hyperbolic,a1,a2,b1,b2,dH,verdict\n";
  for (const WhithamRow& r : rows)
    out << fmt(r.omega) << ',' << fmt(r.c) << ',' << fmt(r.M) << ',' << fmt(r.F) << ',' << fmt(r.speed1) << ','
        << fmt(r.speed2) << ',' << (r.hyperbolic ? 1 : 0) << ',' << fmt(r.a1) << ',' << fmt(r.a2) << ','
        << fmt(r.b1) << ',' << fmt(r.b2) << ',' << fmt(r.dH) << ',' << r.verdict << '\n';
}

json evolution_to_json(const EvolutionReport& r) {
  auto exponent = [](const ExponentFit& f) {
    return json{{"rate", number(f.rate)},       {"std_error", number(f.std_error)},
                {"ci_low", number(f.ci_low)},   {"ci_high", number(f.ci_high)},
                {"samples", f.samples}};
  };
  auto vec = [](const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(number(x));
    return a;
  };
  const PulseTrack& p = r.pulses;
  return json{{"times", vec(r.times)},
              {"residual_L2", vec(r.residual_L2)},
              {"residual_Linf", vec(r.residual_Linf)},
              {"unmodulated_Linf", vec(r.unmodulated_Linf)},
              {"psi_Linf", vec(r.psi_Linf)},
              {"exponents", {{"Linf", exponent(r.linf)}, {"L2", exponent(r.l2)}}},
              {"pulses",
               {{"speed", {number(p.speed[0]), number(p.speed[1])}},
                {"width_slope", {number(p.width_slope[0]), number(p.width_slope[1])}},
                {"p", {number(p.p[0]), number(p.p[1])}},
                {"window", {p.t_first, p.t_last}},
                {"times", vec(p.times)},
                {"centers", {vec(p.centers[0]), vec(p.centers[1])}},
                {"widths_squared", {vec(p.widths_squared[0]), vec(p.widths_squared[1])}},
                {"amplitudes", {vec(p.amplitudes[0]), vec(p.amplitudes[1])}}}},
              {"separation_time", number(r.separation_time)},
              {"warnings", r.warnings}};
}

void write_timeseries_csv(std::ostream& out, const EvolutionReport& r) {
  out << "t,residual_L2,residual_Linf,unmodulated_Linf,psi_Linf\n";
  for (std::size_t i = 0; i < r.times.size(); ++i)
    out << fmt(r.times[i]) << ',' << fmt(r.residual_L2[i]) << ',' << fmt(r.residual_Linf[i]) << ','
        << fmt(r.unmodulated_Linf[i]) << ',' << fmt(r.psi_Linf[i]) << '\n';
}

void save_snapshot(const fs::path& base, const std::vector<double>& field, double length, double time,
                   double frame_speed) {
  static_assert(std::endian::native == std::endian::little, "snapshot writer assumes little-endian hosts");
  fs::path bin = base, side = base;
  bin += ".bin";
  side += ".json";
  if (bin.has_parent_path()) fs::create_directories(bin.parent_path());
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + bin.string());
  out.write(reinterpret_cast<const char*>(field.data()), static_cast<std::streamsize>(field.size() * sizeof(double)));
  json meta{{"points", field.size()},
            {"length", length},
            {"dx", length / field.size()},
            {"time", time},
            {"frame_speed", frame_speed},
            {"dtype", "float64-le"},
            {"data", bin.filename().string()}};
  write_text(side, meta.dump(2) + "\n");
}

std::vector<double> load_snapshot(const fs::path& base) {
  fs::path bin = base, side = base;
  bin += ".bin";
  side += ".json";
  const json meta = parse_file(side);
  const auto points = require<std::size_t>(meta, "points");
  const std::string raw = read_text(bin);
  if (raw.size() != points * sizeof(double)) throw Error(ErrorKind::Io, "snapshot size does not match sidecar");
  std::vector<double> field(points);
  std::memcpy(field.data(), raw.data(), raw.size());
  return field;
}

}  // namespace gks
