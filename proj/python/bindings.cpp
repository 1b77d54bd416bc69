// Python bindings for the simulator's main operations: config handling,
// running simulations (in memory or with the usual file outputs), the
// diagnostics ledger, and the Madelung post-processing used to inspect
// quantized vortices. Field data crosses the boundary as numpy arrays of
// physical-space samples shaped like the grid.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfsim/config.hpp"
#include "sfsim/diagnostics.hpp"
#include "sfsim/field.hpp"
#include "sfsim/grid.hpp"
#include "sfsim/params.hpp"
#include "sfsim/run.hpp"

namespace py = pybind11;
using namespace sfsim;

namespace {

std::vector<py::ssize_t> grid_shape(const Grid& g) {
  std::vector<py::ssize_t> shape;
  for (int a = 0; a < g.dim(); ++a) shape.push_back(g.extent(a));
  return shape;
}

py::array_t<std::complex<double>> complex_samples(const SpectralField& f) {
  std::vector<Complex> values = f.physical();
  py::array_t<std::complex<double>> out(grid_shape(*f.grid()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

py::array_t<double> real_samples(const SpectralField& f) {
  std::vector<double> values = f.physical_real();
  py::array_t<double> out(grid_shape(*f.grid()));
  std::copy(values.begin(), values.end(), out.mutable_data());
  return out;
}

// Build a spectral field from physical samples shaped like the grid the
// lengths describe. The sample count along each axis fixes the resolution.
SpectralField field_from_array(const py::array_t<std::complex<double>,
                                                 py::array::c_style |
                                                     py::array::forcecast>& a,
                               const std::vector<double>& lengths) {
  if (a.ndim() < 1 || a.ndim() > 3)
    throw std::invalid_argument("field array must have 1, 2, or 3 axes");
  if (lengths.size() != static_cast<std::size_t>(a.ndim()))
    throw std::invalid_argument("lengths must list one period per array axis");
  std::array<int, 3> n{1, 1, 1};
  std::array<double, 3> box{2.0 * 3.14159265358979323846, 2.0 * 3.14159265358979323846,
                            2.0 * 3.14159265358979323846};
  for (py::ssize_t a_i = 0; a_i < a.ndim(); ++a_i) {
    n[a_i] = static_cast<int>(a.shape(a_i));
    box[a_i] = lengths[a_i];
  }
  GridPtr grid = Grid::create(static_cast<int>(a.ndim()), n, box);
  std::vector<Complex> values(a.data(), a.data() + a.size());
  return SpectralField::from_physical(grid, std::move(values));
}

RunReport run_wrapper(const RunConfig& config, const std::string& output_dir,
                      const std::string& resume, bool keep_history,
                      bool write_files) {
  RunOptions opts;
  opts.output_dir_override = output_dir;
  opts.resume_path = resume;
  opts.keep_history = keep_history;
  opts.write_files = write_files;
  py::gil_scoped_release release;
  return run_simulation(config, opts);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Pseudo-spectral semi-Galerkin simulator for the Pitaevskii model of "
      "superfluidity";

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<>())
      .def_readwrite("lambda_", &ModelParams::lambda,
                     "coupling strength (lambda)")
      .def_readwrite("mu", &ModelParams::mu)
      .def_readwrite("nu", &ModelParams::nu)
      .def_readwrite("m", &ModelParams::m)
      .def_readwrite("M", &ModelParams::M)
      .def_readwrite("eps", &ModelParams::eps)
      .def("validate", &ModelParams::validate)
      .def("__repr__", [](const ModelParams& p) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "ModelParams(lambda_=%g, mu=%g, nu=%g, m=%g, M=%g, "
                      "eps=%g)",
                      p.lambda, p.mu, p.nu, p.m, p.M, p.eps);
        return std::string(buf);
      });

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("dim", &RunConfig::dim)
      .def_readwrite("resolution", &RunConfig::resolution)
      .def_readwrite("lengths", &RunConfig::lengths)
      .def_readwrite("cutoff", &RunConfig::cutoff)
      .def_readwrite("params", &RunConfig::params)
      .def_readwrite("dt", &RunConfig::dt)
      .def_readwrite("t_end", &RunConfig::t_end)
      .def_readwrite("output_interval", &RunConfig::output_interval)
      .def_readwrite("checkpoint_interval", &RunConfig::checkpoint_interval)
      .def_readwrite("output_dir", &RunConfig::output_dir)
      .def("serialize", &serialize_config,
           "Canonical INI text; parse(serialize(c)) reproduces c exactly.")
      .def("validate", &validate_config)
      .def("__repr__", [](const RunConfig& c) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "RunConfig(dim=%d, resolution=%dx%dx%d, cutoff=%d, "
                      "dt=%g, t_end=%g)",
                      c.dim, c.resolution[0], c.resolution[1], c.resolution[2],
                      c.cutoff, c.dt, c.t_end);
        return std::string(buf);
      });

  py::class_<DiagnosticsRecord>(m, "DiagnosticsRecord")
      .def_readonly("t", &DiagnosticsRecord::t)
      .def_readonly("mass_psi", &DiagnosticsRecord::mass_psi)
      .def_readonly("mass_rho", &DiagnosticsRecord::mass_rho)
      .def_readonly("mass_total", &DiagnosticsRecord::mass_total)
      .def_readonly("energy_kinetic", &DiagnosticsRecord::energy_kinetic)
      .def_readonly("energy_gradient", &DiagnosticsRecord::energy_gradient)
      .def_readonly("energy_potential", &DiagnosticsRecord::energy_potential)
      .def_readonly("dissipation_viscous", &DiagnosticsRecord::acc_visc)
      .def_readonly("dissipation_coupling", &DiagnosticsRecord::acc_coup)
      .def_readonly("energy_residual", &DiagnosticsRecord::energy_residual)
      .def_readonly("rho_min", &DiagnosticsRecord::rho_min)
      .def_readonly("rho_max", &DiagnosticsRecord::rho_max)
      .def_readonly("gronwall_x", &DiagnosticsRecord::gronwall_x)
      .def_readonly("gronwall_y", &DiagnosticsRecord::gronwall_y)
      .def_readonly("bpsi_sup", &DiagnosticsRecord::bpsi_sup)
      .def("__repr__", [](const DiagnosticsRecord& r) {
        char buf[120];
        std::snprintf(buf, sizeof(buf),
                      "DiagnosticsRecord(t=%g, mass_total=%.12g, "
                      "energy_residual=%.3g)",
                      r.t, r.mass_total, r.energy_residual);
        return std::string(buf);
      });

  py::class_<GronwallReport>(m, "GronwallReport")
      .def_readonly("x0", &GronwallReport::x0)
      .def_readonly("max_x_ratio", &GronwallReport::max_x_ratio)
      .def_readonly("x_within_bound", &GronwallReport::x_within_bound)
      .def_readonly("y_integral", &GronwallReport::y_integral)
      .def_readonly("y_ratio", &GronwallReport::y_ratio)
      .def_readonly("y_within_bound", &GronwallReport::y_within_bound);

  py::class_<RunReport>(m, "RunReport")
      .def_property_readonly(
          "outcome", [](const RunReport& r) { return outcome_name(r.outcome); })
      .def_readonly("t_final", &RunReport::t_final)
      .def_readonly("steps", &RunReport::steps)
      .def_readonly("output_dir", &RunReport::output_dir)
      .def_readonly("records", &RunReport::records)
      .def_readonly("e0", &RunReport::e0)
      .def_readonly("x0", &RunReport::x0)
      .def_property_readonly(
          "psi",
          [](const RunReport& r) { return complex_samples(r.final_state.psi); },
          "Final wavefunction samples, shaped like the grid.")
      .def_property_readonly(
          "rho",
          [](const RunReport& r) { return real_samples(r.final_state.rho); },
          "Final normal-fluid density samples.")
      .def_property_readonly(
          "velocity",
          [](const RunReport& r) {
            py::list comps;
            for (int a = 0; a < r.final_state.u.dim(); ++a)
              comps.append(real_samples(r.final_state.u.comp(a)));
            return comps;
          },
          "Final velocity components, one array per axis.")
      .def("__repr__", [](const RunReport& r) {
        char buf[120];
        std::snprintf(buf, sizeof(buf), "RunReport(outcome=%s, t_final=%g, steps=%llu)",
                      outcome_name(r.outcome), r.t_final,
                      static_cast<unsigned long long>(r.steps));
        return std::string(buf);
      });

  m.def("parse_config", &parse_config, py::arg("text"),
        "Parse sectioned INI text into a RunConfig (format_error on bad input).");
  m.def("load_config", &load_config, py::arg("path"));
  m.def("serialize_config", &serialize_config, py::arg("config"));
  m.def("validate_config", &validate_config, py::arg("config"));

  m.def("run", &run_wrapper, py::arg("config"), py::arg("output_dir") = "",
        py::arg("resume") = "", py::arg("keep_history") = false,
        py::arg("write_files") = true,
        "Integrate the configured problem; returns a RunReport. With "
        "write_files=False nothing touches the filesystem.");

  m.def("read_diagnostics", &read_diagnostics, py::arg("path"),
        "Parse a diagnostics.csv back into records (exact round trip).");

  m.def("gronwall_monitor", &gronwall_monitor, py::arg("records"),
        "A-posteriori check of the small-data regularity bounds "
        "(X <= 2 X0, integral Y <= 31 X0) over a diagnostics ledger.");

  m.def(
      "madelung",
      [](const py::array_t<std::complex<double>,
                           py::array::c_style | py::array::forcecast>& psi,
         const std::vector<double>& lengths, double threshold) {
        SpectralField f = field_from_array(psi, lengths);
        MadelungField mf = madelung(f, threshold);
        const Grid& g = *f.grid();
        py::array_t<double> density(grid_shape(g));
        std::copy(mf.density.begin(), mf.density.end(), density.mutable_data());
        py::list velocity;
        for (int a = 0; a < g.dim(); ++a) {
          py::array_t<double> v(grid_shape(g));
          std::copy(mf.velocity[a].begin(), mf.velocity[a].end(),
                    v.mutable_data());
          velocity.append(v);
        }
        py::array_t<bool> valid(grid_shape(g));
        std::copy(mf.valid.begin(), mf.valid.end(), valid.mutable_data());
        return py::make_tuple(density, velocity, valid);
      },
      py::arg("psi"), py::arg("lengths"), py::arg("threshold") = 1e-9,
      "Madelung decomposition (density, velocity components, validity mask) "
      "of wavefunction samples on a periodic grid.");

  m.def(
      "circulation",
      [](const py::array_t<std::complex<double>,
                           py::array::c_style | py::array::forcecast>& psi,
         const std::vector<double>& lengths, std::array<double, 3> center,
         double radius, int segments) {
        return circulation(field_from_array(psi, lengths), center, radius,
                           segments);
      },
      py::arg("psi"), py::arg("lengths"), py::arg("center"), py::arg("radius"),
      py::arg("segments") = 256,
      "Circulation of the Madelung phase around a circle; quantized to "
      "multiples of 2 pi away from zeros of psi.");
}
