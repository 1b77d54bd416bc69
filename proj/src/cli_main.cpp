// Command-line front end.
//
//   sfsim run      --config <path> [--output <dir>] [--resume <ckpt>]
//   sfsim validate --config <path>
//   sfsim oracle   --config <path> --against <run-dir>
//   sfsim report   <run-dir>
//
// Exit codes: 0 completed, 2 halted at the density floor (a correct outcome,
// distinguished so scripts can branch on it), 1 any error.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sfsim/checkpoint.hpp"
#include "sfsim/config.hpp"
#include "sfsim/diagnostics.hpp"
#include "sfsim/errors.hpp"
#include "sfsim/field.hpp"
#include "sfsim/run.hpp"
#include "sfsim/transport.hpp"

namespace {

namespace fs = std::filesystem;
using namespace sfsim;

std::string stem_of(const std::string& config_path) {
  return fs::path(config_path).stem().string();
}

int cmd_run(const std::string& config_path, const std::string& output,
            const std::string& resume) {
  RunConfig config = load_config(config_path);
  RunOptions opts;
  opts.output_dir_override = output;
  opts.resume_path = resume;
  opts.config_stem = stem_of(config_path);
  RunReport report = run_simulation(config, opts);
  std::printf("outcome: %s\n", outcome_name(report.outcome));
  std::printf("t_final: %.17g\n", report.t_final);
  std::printf("steps: %llu\n", static_cast<unsigned long long>(report.steps));
  std::printf("rows: %zu\n", report.records.size());
  std::printf("output: %s\n", report.output_dir.c_str());
  switch (report.outcome) {
    case RunOutcome::Completed: return 0;
    case RunOutcome::HaltedDensityFloor: return 2;
    case RunOutcome::StepperFailure:
      std::fprintf(stderr, "error: stepper failed at t = %.17g\n", report.t_final);
      return 1;
  }
  return 1;
}

int cmd_validate(const std::string& config_path) {
  RunConfig config = load_config(config_path);
  // Dry-build the initial state so bad initial data is caught here, not
  // minutes into a queued run.
  GridPtr grid = make_grid(config);
  GalerkinTruncation trunc{config.cutoff};
  SimState s0 = build_initial_state(grid, config.initial, trunc, config.params);
  double e0 = total_energy(s0, config.params);
  std::printf("config ok: %s\n", config_path.c_str());
  std::printf("grid: dim %d, resolution", config.dim);
  for (int a = 0; a < config.dim; ++a) std::printf(" %d", config.resolution[a]);
  std::printf(", cutoff %d\n", config.cutoff);
  std::printf("steps: %llu, dt %.17g\n",
              static_cast<unsigned long long>(step_count(config)), config.dt);
  std::printf("initial energy: %.17g\n", e0);
  std::printf("initial density range: [%.17g, %.17g]\n",
              field_min(s0.rho), field_max(s0.rho));
  return 0;
}

// Cross-check a finished run against the method-of-characteristics density
// oracle: re-integrate the same config while recording the flow history,
// verify the re-run reproduces the stored final state, then compare the
// spectral density against the integrated-along-characteristics value on a
// probe lattice at the final recorded time.
int cmd_oracle(const std::string& config_path, const std::string& run_dir) {
  RunConfig config = load_config(config_path);
  RunOptions opts;
  opts.keep_history = true;
  opts.write_files = false;
  opts.config_stem = stem_of(config_path);
  RunReport report = run_simulation(config, opts);

  CheckpointData stored = read_checkpoint((fs::path(run_dir) / "final.ckpt").string());
  if (stored.state.t != report.t_final)
    throw validation_error("stored run ends at a different time than the re-run");

  auto coef_diff = [](const SpectralField& a, const SpectralField& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.coef().size(); ++i)
      d = std::max(d, std::abs(a.coef()[i] - b.coef()[i]));
    return d;
  };
  double replay = std::max(coef_diff(stored.state.psi, report.final_state.psi),
                           coef_diff(stored.state.rho, report.final_state.rho));
  for (int a = 0; a < config.dim; ++a)
    replay = std::max(replay,
                      coef_diff(stored.state.u.comp(a), report.final_state.u.comp(a)));
  std::printf("replay max coefficient diff: %.3e\n", replay);
  if (replay != 0.0) {
    std::fprintf(stderr,
                 "error: re-run does not reproduce the stored final state; "
                 "the run directory was produced by a different config or build\n");
    return 1;
  }

  GridPtr grid = make_grid(config);
  std::vector<std::array<double, 3>> points;
  const int probes = 8;
  for (int i = 0; i < probes; ++i)
    for (int j = 0; j < (config.dim >= 2 ? probes : 1); ++j)
      for (int k = 0; k < (config.dim >= 3 ? probes : 1); ++k)
        points.push_back({(i + 0.37) * grid->length(0) / probes,
                          config.dim >= 2 ? (j + 0.37) * grid->length(1) / probes : 0.0,
                          config.dim >= 3 ? (k + 0.37) * grid->length(2) / probes : 0.0});

  std::vector<double> oracle =
      density_oracle(report.history, points, report.t_final, 0.25 * config.dt);
  FieldEvaluator rho_eval(report.final_state.rho);
  double max_diff = 0.0;
  for (std::size_t q = 0; q < points.size(); ++q)
    max_diff = std::max(max_diff, std::abs(oracle[q] - rho_eval(points[q]).real()));

  const double tol = 1e-4;
  std::printf("density oracle max diff: %.6e (tolerance %.1e) -> %s\n", max_diff,
              tol, max_diff <= tol ? "PASS" : "FAIL");
  return max_diff <= tol ? 0 : 1;
}

int cmd_report(const std::string& run_dir) {
  std::vector<DiagnosticsRecord> records =
      read_diagnostics((fs::path(run_dir) / "diagnostics.csv").string());
  if (records.empty()) {
    std::printf("no rows\n");
    return 0;
  }
  const DiagnosticsRecord& first = records.front();
  const DiagnosticsRecord& last = records.back();
  std::printf("rows: %zu, t in [%.17g, %.17g]\n", records.size(), first.t, last.t);
  std::printf("mass_total: %.17g -> %.17g (drift %.3e)\n", first.mass_total,
              last.mass_total, last.mass_total - first.mass_total);
  std::printf("energy_residual(final): %.3e\n", last.energy_residual);
  std::printf("rho range(final): [%.17g, %.17g]\n", last.rho_min, last.rho_max);
  GronwallReport g = gronwall_monitor(records);
  std::printf("gronwall: x0 %.17g, max X ratio %.17g (%s), int Y %.17g (%s)\n",
              g.x0, g.max_x_ratio, g.x_within_bound ? "within bound" : "EXCEEDS bound",
              g.y_integral, g.y_within_bound ? "within bound" : "EXCEEDS bound");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pseudo-spectral simulator for the coupled superfluid model"};
  app.require_subcommand(1);

  std::string config_path, output, resume, run_dir;

  CLI::App* run = app.add_subcommand("run", "integrate a configured problem");
  run->add_option("--config", config_path, "configuration file")->required();
  run->add_option("--output", output, "output directory (wins over the config)");
  run->add_option("--resume", resume, "checkpoint to continue from");

  CLI::App* validate = app.add_subcommand("validate", "check a configuration");
  validate->add_option("--config", config_path, "configuration file")->required();

  CLI::App* oracle = app.add_subcommand(
      "oracle", "cross-check a finished run against the transport oracle");
  oracle->add_option("--config", config_path, "configuration file")->required();
  oracle->add_option("--against", run_dir, "run directory to check")->required();

  CLI::App* report = app.add_subcommand("report", "summarize a run directory");
  report->add_option("run_dir", run_dir, "run directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, output, resume);
    if (validate->parsed()) return cmd_validate(config_path);
    if (oracle->parsed()) return cmd_oracle(config_path, run_dir);
    if (report->parsed()) return cmd_report(run_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
