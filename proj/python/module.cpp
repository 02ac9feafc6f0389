#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gks/bloch.hpp"
#include "gks/error.hpp"
#include "gks/evolve.hpp"
#include "gks/io.hpp"
#include "gks/profile.hpp"
#include "gks/version.hpp"
#include "gks/whitham.hpp"

namespace py = pybind11;
using namespace gks;

namespace {

py::dict fit_dict(const CriticalFit& f) {
  py::dict d;
  d["a"] = f.a;
  d["b"] = f.b;
  d["fit_residual"] = f.fit_residual;
  d["xi_fit_radius"] = f.xi_fit_radius;
  return d;
}

py::dict verdict_dict(const StabilityVerdict& v) {
  py::dict d;
  d["D1"] = v.D1;
  d["D2"] = v.D2;
  d["D3"] = v.D3;
  d["H3"] = v.H3;
  d["H4"] = v.H4;
  d["theta"] = v.theta;
  d["margins"] = v.margins;
  d["stable"] = v.stable();
  return d;
}

}  // namespace

PYBIND11_MODULE(_gks, m) {
  m.doc() = "Periodic traveling waves of the generalized Kuramoto-Sivashinsky equation";
  m.attr("__version__") = version();

  static py::exception<Error> error(m, "GksError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init([](double epsilon, double delta, std::vector<double> f) {
             ModelParams p;
             p.epsilon = epsilon;
             p.delta = delta;
             p.f = Polynomial(std::move(f));
             p.validate();
             return p;
           }),
           py::arg("epsilon") = 0.0, py::arg("delta") = 1.0, py::arg("f") = std::vector<double>{0.0, 0.0, 0.5})
      .def_readonly("epsilon", &ModelParams::epsilon)
      .def_readonly("delta", &ModelParams::delta)
      .def_property_readonly("f", [](const ModelParams& p) { return p.f.coeffs(); })
      .def("__repr__", [](const ModelParams& p) {
        return "ModelParams(epsilon=" + std::to_string(p.epsilon) + ", delta=" + std::to_string(p.delta) + ")";
      });

  py::class_<PeriodicWave>(m, "PeriodicWave")
      .def_property_readonly("X", &PeriodicWave::X)
      .def_property_readonly("omega", &PeriodicWave::omega)
      .def_property_readonly("c", &PeriodicWave::c)
      .def_property_readonly("q", &PeriodicWave::q)
      .def_property_readonly("N", &PeriodicWave::N)
      .def_property_readonly("coeffs", &PeriodicWave::coeffs, "Two-sided Fourier coefficients, k = -N..N")
      .def("sample", &sample_profile, py::arg("points") = 256, py::arg("derivative") = 0)
      .def("residual", &ode_residual, py::arg("params"));

  m.def("solve_from_hopf",
        [](const ModelParams& p, double omega, double c, double u0, double max_step) {
          PathOptions opt;
          opt.max_step = max_step;
          return solve_from_hopf(p, u0, c, omega, opt);
        },
        py::arg("params"), py::arg("omega"), py::arg("c") = 0.0, py::arg("u0") = 0.0, py::arg("max_step") = 2e-3,
        "Wave at (c, omega) on the branch born at the Hopf point of u0.");

  m.def("solve_profile",
        [](const PeriodicWave& guess, const ModelParams& p, double c, double omega, int modes) {
          SolverOptions opt;
          opt.modes = modes;
          return solve_profile(guess.resized(std::max(modes, guess.N())), p, c, omega, opt);
        },
        py::arg("guess"), py::arg("params"), py::arg("c"), py::arg("omega"), py::arg("modes") = 32);

  py::class_<WaveFamily>(m, "WaveFamily")
      .def_property_readonly("c_values", [](const WaveFamily& f) { return f.grid.c_values; })
      .def_property_readonly("omega_values", [](const WaveFamily& f) { return f.grid.omega_values; })
      .def_property_readonly("params", [](const WaveFamily& f) { return f.params; })
      .def("wave", [](const WaveFamily& f, int ic, int iw) { return f.at(ic, iw).wave; }, py::arg("ic"), py::arg("iw"))
      .def("converged_count", &WaveFamily::converged_count);

  m.def("continue_family",
        [](const PeriodicWave& start, const ModelParams& p, std::vector<double> c_values,
           std::vector<double> omega_values, int workers) {
          FamilyGrid g{std::move(c_values), std::move(omega_values)};
          ContinuationOptions opt;
          opt.workers = workers;
          py::gil_scoped_release release;
          return continue_family(start, p, g, opt);
        },
        py::arg("start"), py::arg("params"), py::arg("c_values"), py::arg("omega_values"), py::arg("workers") = 1);

  m.def("xi_grid", &default_xi_grid, py::arg("X"), py::arg("n_uniform") = 64, py::arg("n_cluster") = 12);

  m.def("bloch_spectrum",
        [](const PeriodicWave& w, const ModelParams& p, std::optional<std::vector<double>> xi, int n_hill) {
          BlochOptions opt;
          opt.n_hill = n_hill;
          BlochSpectrum s;
          {
            py::gil_scoped_release release;
            s = compute_bloch_eigs(w, p, xi ? *xi : default_xi_grid(w.X()), opt);
          }
          py::dict d;
          d["xi"] = s.xi;
          d["eigenvalues"] = s.eigenvalues;
          try {
            const CriticalFit fit = fit_critical_expansion(s);
            d["fit"] = fit_dict(fit);
            d["verdict"] = verdict_dict(verify_conditions(s, fit));
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::FitAmbiguity && e.kind() != ErrorKind::InsufficientResolution) throw;
            d["fit"] = py::none();
            d["verdict"] = py::none();
            d["fit_error"] = std::string(e.what());
          }
          return d;
        },
        py::arg("wave"), py::arg("params"), py::arg("xi") = py::none(), py::arg("n_hill") = 48,
        "Bloch eigenvalues per xi, the critical-curve fit and the stability verdict.");

  m.def("fd_spectrum", &oracle_fd_spectrum, py::arg("wave"), py::arg("params"), py::arg("xi"),
        py::arg("points") = 512, "Finite-difference eigenvalues with Bloch boundary conditions.");

  m.def("scan_band",
        [](const WaveFamily& f, int n_hill) {
          BandOptions opt;
          opt.bloch.n_hill = n_hill;
          BandReport r;
          {
            py::gil_scoped_release release;
            r = scan_band(f, opt);
          }
          py::list nodes;
          for (const BandNode& n : r.nodes) {
            py::dict d;
            d["c"] = n.c;
            d["omega"] = n.omega;
            d["classified"] = n.classified;
            d["stable"] = n.classified && n.verdict.stable();
            d["max_real_part"] = n.max_real_part;
            d["fit"] = n.fitted ? py::object(fit_dict(n.fit)) : py::none();
            nodes.append(d);
          }
          py::list intervals;
          for (const auto& [c, list] : r.stable_intervals)
            for (const StableInterval& s : list)
              intervals.append(py::dict(py::arg("c") = c, py::arg("omega_lo") = s.omega_lo,
                                        py::arg("omega_hi") = s.omega_hi, py::arg("nodes") = s.nodes));
          return py::dict(py::arg("nodes") = nodes, py::arg("stable_intervals") = intervals);
        },
        py::arg("family"), py::arg("n_hill") = 48);

  m.def("whitham_speeds",
        [](const WaveFamily& f, int ic, int iw, bool richardson) {
          const WhithamCharacteristics ch = whitham_characteristics(f, ic, iw, {.richardson = richardson});
          return py::dict(py::arg("speeds") = ch.speeds, py::arg("comoving_speeds") = ch.comoving_speeds,
                          py::arg("hyperbolic") = ch.hyperbolic, py::arg("eigenvalues") = ch.eigenvalues);
        },
        py::arg("family"), py::arg("ic"), py::arg("iw"), py::arg("richardson") = false,
        "Characteristic speeds of the averaged system at a family node.");

  m.def("evolve",
        [](const PeriodicWave& w, const ModelParams& p, int periods, double T, double amplitude, int n_grid,
           double dt, int snapshots) {
          SimConfig cfg;
          cfg.n_periods = periods;
          cfg.n_grid = n_grid;
          cfg.dt = dt;
          cfg.T_final = T;
          cfg.snapshot_times = geometric_times(std::min(1.0, T), T, snapshots);
          ResidualSeries r;
          {
            py::gil_scoped_release release;
            const Perturbation pert = perturb(w, p, periods, n_grid, BumpKind::Gaussian, amplitude, 2.0 * w.X());
            r = measure_residuals(simulate(w, p, pert.field, cfg), w);
          }
          return py::dict(py::arg("times") = r.times, py::arg("residual_Linf") = r.residual_Linf,
                          py::arg("residual_L2") = r.residual_L2, py::arg("psi_Linf") = r.psi_Linf,
                          py::arg("tracking_failures") = r.tracking_failures);
        },
        py::arg("wave"), py::arg("params"), py::arg("periods") = 16, py::arg("T") = 50.0,
        py::arg("amplitude") = 1e-2, py::arg("n_grid") = 1024, py::arg("dt") = 0.05, py::arg("snapshots") = 20,
        "Perturbed wave train in the co-moving frame; residual against the modulated wave.");

  m.def("decay_exponent", &fit_decay_exponent, py::arg("times"), py::arg("values"), py::arg("t_lo"),
        py::arg("t_hi"));
  py::class_<ExponentFit>(m, "ExponentFit")
      .def_readonly("rate", &ExponentFit::rate)
      .def_readonly("std_error", &ExponentFit::std_error)
      .def_readonly("ci_low", &ExponentFit::ci_low)
      .def_readonly("ci_high", &ExponentFit::ci_high)
      .def_readonly("samples", &ExponentFit::samples);

  m.def("save_wave", &save_wave, py::arg("path"), py::arg("wave"), py::arg("params"));
  m.def("load_wave", [](const fs::path& path) {
    WaveRecord r = load_wave(path);
    return py::make_tuple(r.wave, r.params);
  });
  m.def("save_family", &save_family, py::arg("dir"), py::arg("family"));
  m.def("load_family", &load_family, py::arg("dir"));
}
