#include "gks/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "gks/error.hpp"
#include "gks/model.hpp"

namespace gks {

namespace {

constexpr double kWidth = 640.0, kHeight = 480.0;
constexpr double kLeft = 80.0, kRight = 24.0, kTop = 40.0, kBottom = 60.0;

std::string esc(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

struct Range {
  double lo = 0.0, hi = 1.0;
};

Range data_range(const std::vector<double>& v, bool log_scale) {
  Range r{INFINITY, -INFINITY};
  for (double x : v) {
    if (!std::isfinite(x) || (log_scale && x <= 0.0)) continue;
    r.lo = std::min(r.lo, x);
    r.hi = std::max(r.hi, x);
  }
  if (!(r.lo <= r.hi)) return log_scale ? Range{1.0, 10.0} : Range{0.0, 1.0};
  if (log_scale) {
    if (r.hi <= r.lo * 1.0001) r = {r.lo / 2.0, r.hi * 2.0};
    return r;
  }
  if (r.hi - r.lo < 1e-300 + 1e-12 * std::abs(r.hi)) {
    const double pad = r.hi == 0.0 ? 1.0 : 0.1 * std::abs(r.hi);
    return {r.lo - pad, r.hi + pad};
  }
  const double pad = 0.05 * (r.hi - r.lo);
  return {r.lo - pad, r.hi + pad};
}

class Canvas {
 public:
  Canvas(std::string title, std::string xlabel, std::string ylabel)
      : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)) {}

  void set_x(Range r, bool log_scale = false) { x_ = r, xlog_ = log_scale; }
  void set_y(Range r, bool log_scale = false) { y_ = r, ylog_ = log_scale; }

  double px(double x) const {
    const double a = xlog_ ? std::log10(x) : x, lo = xlog_ ? std::log10(x_.lo) : x_.lo,
                 hi = xlog_ ? std::log10(x_.hi) : x_.hi;
    return kLeft + (a - lo) / (hi - lo) * (kWidth - kLeft - kRight);
  }
  double py(double y) const {
    const double a = ylog_ ? std::log10(y) : y, lo = ylog_ ? std::log10(y_.lo) : y_.lo,
                 hi = ylog_ ? std::log10(y_.hi) : y_.hi;
    return kHeight - kBottom - (a - lo) / (hi - lo) * (kHeight - kTop - kBottom);
  }
  bool inside(double x, double y) const {
    return std::isfinite(x) && std::isfinite(y) && x >= x_.lo && x <= x_.hi && y >= y_.lo && y <= y_.hi &&
           (!xlog_ || x > 0.0) && (!ylog_ || y > 0.0);
  }

  void points(const std::vector<double>& x, const std::vector<double>& y, const std::string& color, double r = 1.6) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (inside(x[i], y[i]))
        body_ << "<circle cx=\"" << num(px(x[i])) << "\" cy=\"" << num(py(y[i])) << "\" r=\"" << r
              << "\" fill=\"" << color << "\"/>\n";
  }

  void line(const std::vector<double>& x, const std::vector<double>& y, const std::string& color,
            double width = 1.5, const std::string& dash = "") {
    std::ostringstream seg;
    auto flush = [&] {
      if (seg.tellp() > 0) {
        body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width << "\""
              << (dash.empty() ? "" : " stroke-dasharray=\"" + dash + "\"") << " points=\"" << seg.str() << "\"/>\n";
        seg.str("");
        seg.clear();
      }
    };
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!inside(x[i], y[i])) {
        flush();
        continue;
      }
      seg << num(px(x[i])) << ',' << num(py(y[i])) << ' ';
    }
    flush();
  }

  void rect(double x0, double y0, double x1, double y1, const std::string& color) {
    const double a = px(x0), b = px(x1), c = py(y1), d = py(y0);
    body_ << "<rect x=\"" << num(std::min(a, b)) << "\" y=\"" << num(std::min(c, d)) << "\" width=\""
          << num(std::abs(b - a) + 0.3) << "\" height=\"" << num(std::abs(d - c) + 0.3) << "\" fill=\"" << color
          << "\"/>\n";
  }

  void origin_marker() {
    if (!inside(0.0, 0.0)) return;
    const double ox = px(0.0), oy = py(0.0);
    body_ << "<line x1=\"" << num(ox - 8) << "\" y1=\"" << num(oy) << "\" x2=\"" << num(ox + 8) << "\" y2=\""
          << num(oy) << "\" stroke=\"black\"/>\n<line x1=\"" << num(ox) << "\" y1=\"" << num(oy - 8)
          << "\" x2=\"" << num(ox) << "\" y2=\"" << num(oy + 8) << "\" stroke=\"black\"/>\n";
  }

  void hline(double y, const std::string& color) {
    if (y < y_.lo || y > y_.hi) return;
    body_ << "<line x1=\"" << kLeft << "\" y1=\"" << num(py(y)) << "\" x2=\"" << kWidth - kRight << "\" y2=\""
          << num(py(y)) << "\" stroke=\"" << color << "\" stroke-dasharray=\"4 3\"/>\n";
  }

  void note(const std::string& text) { notes_.push_back(text); }
  void legend(const std::string& text, const std::string& color) { legend_.emplace_back(text, color); }
  void extra(const std::string& svg) { body_ << svg; }

  std::string render() const {
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << esc(title_)
      << "</text>\n";
    s << "<defs><clipPath id=\"plot\"><rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\""
      << kWidth - kLeft - kRight << "\" height=\"" << kHeight - kTop - kBottom << "\"/></clipPath></defs>\n";
    s << "<g clip-path=\"url(#plot)\">\n" << body_.str() << "</g>\n";
    s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kWidth - kLeft - kRight << "\" height=\""
      << kHeight - kTop - kBottom << "\" fill=\"none\" stroke=\"black\"/>\n";
    ticks(s, true);
    ticks(s, false);
    s << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\">" << esc(xlabel_) << "</text>\n";
    s << "<text transform=\"translate(18," << (kTop + kHeight - kBottom) / 2
      << ") rotate(-90)\" text-anchor=\"middle\">" << esc(ylabel_) << "</text>\n";
    double ly = kTop + 16;
    for (const auto& [text, color] : legend_) {
      s << "<rect x=\"" << kWidth - kRight - 150 << "\" y=\"" << ly - 9 << "\" width=\"10\" height=\"10\" fill=\""
        << color << "\"/><text x=\"" << kWidth - kRight - 135 << "\" y=\"" << ly << "\">" << esc(text)
        << "</text>\n";
      ly += 16;
    }
    for (const auto& n : notes_) {
      s << "<text x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << (kTop + kHeight - kBottom) / 2
        << "\" text-anchor=\"middle\" font-size=\"18\" fill=\"#888\">" << esc(n) << "</text>\n";
    }
    s << "</svg>\n";
    return s.str();
  }

 private:
  void ticks(std::ostringstream& s, bool horizontal) const {
    const Range r = horizontal ? x_ : y_;
    const bool lg = horizontal ? xlog_ : ylog_;
    std::vector<double> at;
    if (lg) {
      for (double e = std::floor(std::log10(r.lo)); e <= std::ceil(std::log10(r.hi)); ++e) {
        const double v = std::pow(10.0, e);
        if (v >= r.lo && v <= r.hi) at.push_back(v);
      }
    } else {
      const double step = nice_step(r.hi - r.lo, 6);
      for (double v = std::ceil(r.lo / step) * step; v <= r.hi + 1e-9 * step; v += step)
        at.push_back(std::abs(v) < 1e-9 * step ? 0.0 : v);
    }
    for (double v : at) {
      if (horizontal) {
        const double x = px(v);
        s << "<line x1=\"" << num(x) << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << num(x) << "\" y2=\""
          << kHeight - kBottom + 5 << "\" stroke=\"black\"/><text x=\"" << num(x) << "\" y=\""
          << kHeight - kBottom + 18 << "\" text-anchor=\"middle\">" << num(v) << "</text>\n";
      } else {
        const double y = py(v);
        s << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << num(y) << "\" x2=\"" << kLeft << "\" y2=\"" << num(y)
          << "\" stroke=\"black\"/><text x=\"" << kLeft - 8 << "\" y=\"" << num(y + 4)
          << "\" text-anchor=\"end\">" << num(v) << "</text>\n";
      }
    }
  }

  std::string title_, xlabel_, ylabel_;
  Range x_, y_;
  bool xlog_ = false, ylog_ = false;
  std::ostringstream body_;
  std::vector<std::string> notes_;
  std::vector<std::pair<std::string, std::string>> legend_;
};

const std::vector<double>& column(const Dataset& d, const std::string& name) {
  auto it = d.columns.find(name);
  if (it == d.columns.end())
    throw Error(ErrorKind::PlotSchema, "missing column '" + name + "' for this plot kind");
  return it->second;
}

const std::vector<double>* optional_column(const Dataset& d, const std::string& name) {
  auto it = d.columns.find(name);
  return it == d.columns.end() ? nullptr : &it->second;
}

void same_length(const Dataset& d, const std::vector<std::string>& names) {
  const std::size_t n = column(d, names.front()).size();
  for (const auto& name : names)
    if (column(d, name).size() != n)
      throw Error(ErrorKind::PlotSchema, "column '" + name + "' differs in length from '" + names.front() + "'");
}

Range with_limits(Range r, const Dataset& d, const char* lo, const char* hi) {
  if (auto it = d.limits.find(lo); it != d.limits.end()) r.lo = it->second;
  if (auto it = d.limits.find(hi); it != d.limits.end()) r.hi = it->second;
  return r;
}

std::vector<double> filtered(const std::vector<double>& v, const std::vector<double>& w, Range r) {
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (w[i] >= r.lo && w[i] <= r.hi) out.push_back(v[i]);
  return out;
}

std::string spectrum_plot(const Dataset& d) {
  same_length(d, {"re_lambda", "im_lambda"});
  const auto& re = column(d, "re_lambda");
  const auto& im = column(d, "im_lambda");
  Canvas cv(d.title.empty() ? "Bloch spectrum" : d.title, "Re λ (1/time)", "Im λ (1/time)");
  Range xr = with_limits(data_range(re, false), d, "x_min", "x_max");
  Range yr = with_limits(data_range(filtered(im, re, xr), false), d, "y_min", "y_max");
  if (xr.lo > 0.0) xr.lo = -0.05 * (xr.hi - xr.lo);
  if (xr.hi < 0.0) xr.hi = 0.05 * (xr.hi - xr.lo);
  cv.set_x(xr);
  cv.set_y(yr);
  cv.points(re, im, "#1f4e9c");
  if (const auto* fr = optional_column(d, "fit_re")) {
    same_length(d, {"fit_re", "fit_im"});
    cv.line(*fr, column(d, "fit_im"), "#d62728", 1.8);
    cv.legend("critical-curve fit", "#d62728");
  }
  cv.legend("eigenvalues", "#1f4e9c");
  cv.origin_marker();
  if (re.empty()) cv.note("no data");
  return cv.render();
}

std::string orbit_plot(const Dataset& d) {
  same_length(d, {"u", "ux", "uxx"});
  const auto& u = column(d, "u");
  const auto& ux = column(d, "ux");
  const auto& uxx = column(d, "uxx");
  // Oblique projection of (u, u', u'') with the u'' axis drawn at 30 degrees.
  const double cx = 0.5 * std::cos(kPi / 6.0), cy = 0.5 * std::sin(kPi / 6.0);
  std::vector<double> X(u.size()), Y(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    X[i] = u[i] + cx * uxx[i];
    Y[i] = ux[i] + cy * uxx[i];
  }
  if (!X.empty()) {
    X.push_back(X.front());
    Y.push_back(Y.front());
  }
  Canvas cv(d.title.empty() ? "Periodic orbit" : d.title, "u + 0.43 u″", "u′ + 0.25 u″");
  Range xr = data_range(X, false), yr = data_range(Y, false);
  cv.set_x(xr);
  cv.set_y(yr);
  cv.line(X, Y, "#1f4e9c", 1.8);
  if (u.empty()) cv.note("no data");
  return cv.render();
}

std::string band_plot(const Dataset& d) {
  same_length(d, {"omega", "max_re", "stable"});
  const auto& om = column(d, "omega");
  const auto& mr = column(d, "max_re");
  const auto& st = column(d, "stable");
  const auto* cl = optional_column(d, "classified");
  if (cl) same_length(d, {"omega", "classified"});
  constexpr double floor_ = 1e-10;
  auto symlog = [](double v) { return std::copysign(std::log10(1.0 + std::abs(v) / floor_), v); };
  std::vector<double> ys(mr.size());
  for (std::size_t i = 0; i < mr.size(); ++i) ys[i] = std::isfinite(mr[i]) ? symlog(mr[i]) : 0.0;
  Canvas cv(d.title.empty() ? "Stability across the family" : d.title, "ω (1/length)",
            "sign(max Re λ) log10(1 + |max Re λ| / 1e-10)");
  cv.set_x(data_range(om, false));
  Range yr = data_range(ys, false);
  yr.lo = std::min(yr.lo, -1.0);
  yr.hi = std::max(yr.hi, 1.0);
  cv.set_y(yr);
  cv.hline(0.0, "#555");
  std::vector<double> xs_s, ys_s, xs_u, ys_u, xs_n, ys_n;
  for (std::size_t i = 0; i < om.size(); ++i) {
    if (cl && (*cl)[i] == 0.0) {
      xs_n.push_back(om[i]);
      ys_n.push_back(0.0);
    } else if (st[i] != 0.0) {
      xs_s.push_back(om[i]);
      ys_s.push_back(ys[i]);
    } else {
      xs_u.push_back(om[i]);
      ys_u.push_back(ys[i]);
    }
  }
  cv.line(om, ys, "#999", 1.0);
  cv.points(xs_s, ys_s, "#2ca02c", 4.0);
  cv.points(xs_u, ys_u, "#d62728", 4.0);
  cv.points(xs_n, ys_n, "#7f7f7f", 4.0);
  cv.legend("stable", "#2ca02c");
  cv.legend("unstable", "#d62728");
  if (cl) cv.legend("unclassified", "#7f7f7f");
  if (om.empty()) cv.note("no data");
  return cv.render();
}

std::string diverging(double v) {
  const double a = std::clamp(v, -1.0, 1.0);
  const int r = a < 0 ? static_cast<int>(255 * (1 + a)) : 255;
  const int b = a > 0 ? static_cast<int>(255 * (1 - a)) : 255;
  const int g = static_cast<int>(255 * (1 - std::abs(a)));
  std::ostringstream s;
  s << "rgb(" << r << ',' << g << ',' << b << ')';
  return s.str();
}

std::string heatmap_plot(const Dataset& d) {
  const auto& x = column(d, "x");
  const auto& t = column(d, "t");
  const auto& v = column(d, "value");
  if (v.size() != x.size() * t.size())
    throw Error(ErrorKind::PlotSchema, "column 'value' must hold len(x) * len(t) entries");
  Canvas cv(d.title.empty() ? "ψ_x" : d.title, "x (length)", "t (time)");
  if (x.empty() || t.empty()) {
    cv.note("no data");
    return cv.render();
  }
  double vmax = 0.0;
  for (double s : v)
    if (std::isfinite(s)) vmax = std::max(vmax, std::abs(s));
  if (vmax == 0.0) vmax = 1.0;
  auto edges = [](const std::vector<double>& c) {
    std::vector<double> e(c.size() + 1);
    for (std::size_t i = 1; i < c.size(); ++i) e[i] = 0.5 * (c[i - 1] + c[i]);
    const double h0 = c.size() > 1 ? c[1] - c[0] : 1.0, h1 = c.size() > 1 ? c.back() - c[c.size() - 2] : 1.0;
    e[0] = c.front() - 0.5 * h0;
    e.back() = c.back() + 0.5 * h1;
    return e;
  };
  const auto ex = edges(x), et = edges(t);
  cv.set_x({ex.front(), ex.back()});
  cv.set_y({et.front(), et.back()});
  for (std::size_t it = 0; it < t.size(); ++it)
    for (std::size_t ix = 0; ix < x.size(); ++ix) {
      const double s = v[it * x.size() + ix];
      if (std::isfinite(s)) cv.rect(ex[ix], et[it], ex[ix + 1], et[it + 1], diverging(s / vmax));
    }
  cv.legend("+" + num(vmax), diverging(1.0));
  cv.legend("-" + num(vmax), diverging(-1.0));
  return cv.render();
}

std::string decay_plot(const Dataset& d) {
  same_length(d, {"t", "residual_Linf", "residual_L2"});
  const auto& t = column(d, "t");
  const auto& li = column(d, "residual_Linf");
  const auto& l2 = column(d, "residual_L2");
  Canvas cv(d.title.empty() ? "Modulated residual" : d.title, "t (time)", "norm");
  std::vector<double> all(li);
  all.insert(all.end(), l2.begin(), l2.end());
  cv.set_x(with_limits(data_range(t, true), d, "x_min", "x_max"), true);
  cv.set_y(data_range(all, true), true);
  cv.points(t, li, "#1f4e9c", 2.5);
  cv.points(t, l2, "#ff7f0e", 2.5);
  cv.legend("L∞", "#1f4e9c");
  cv.legend("L²", "#ff7f0e");
  if (const auto* f = optional_column(d, "fit_Linf")) {
    same_length(d, {"t", "fit_Linf"});
    cv.line(t, *f, "#1f4e9c", 1.2, "5 3");
  }
  if (const auto* f = optional_column(d, "fit_L2")) {
    same_length(d, {"t", "fit_L2"});
    cv.line(t, *f, "#ff7f0e", 1.2, "5 3");
  }
  if (t.empty()) cv.note("no data");
  return cv.render();
}

}  // namespace

const char* to_string(PlotKind kind) {
  switch (kind) {
    case PlotKind::Spectrum: return "spectrum";
    case PlotKind::Orbit: return "orbit";
    case PlotKind::Band: return "band";
    case PlotKind::Heatmap: return "heatmap";
    case PlotKind::Decay: return "decay";
  }
  return "unknown";
}

std::string emit_svg(const Dataset& data, PlotKind kind) {
  switch (kind) {
    case PlotKind::Spectrum: return spectrum_plot(data);
    case PlotKind::Orbit: return orbit_plot(data);
    case PlotKind::Band: return band_plot(data);
    case PlotKind::Heatmap: return heatmap_plot(data);
    case PlotKind::Decay: return decay_plot(data);
  }
  throw Error(ErrorKind::PlotSchema, "unknown plot kind");
}

std::string compose_svg(const std::vector<std::string>& panels, int columns, const std::string& title) {
  if (columns < 1) throw Error(ErrorKind::InvalidArgument, "columns must be positive");
  const int rows = static_cast<int>((panels.size() + columns - 1) / columns);
  const double W = kWidth * columns, H = kHeight * rows + 40.0;
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << W / 2 << "\" y=\"26\" text-anchor=\"middle\" font-size=\"18\">" << esc(title) << "</text>\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const double x = kWidth * (i % columns), y = 40.0 + kHeight * (i / columns);
    std::string inner = panels[i];
    // Clip-path ids must stay unique once panels share a document.
    const std::string id = "plot" + std::to_string(i);
    for (std::size_t p = inner.find("id=\"plot\""); p != std::string::npos; p = inner.find("id=\"plot\"", p))
      inner.replace(p, 9, "id=\"" + id + "\"");
    for (std::size_t p = inner.find("url(#plot)"); p != std::string::npos; p = inner.find("url(#plot)", p))
      inner.replace(p, 10, "url(#" + id + ")");
    const auto open = inner.find("<svg ");
    if (open != std::string::npos)
      inner.replace(open, 5, "<svg x=\"" + num(x) + "\" y=\"" + num(y) + "\" ");
    s << inner;
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace gks
