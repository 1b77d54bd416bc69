#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sfsim/config.hpp"
#include "sfsim/diagnostics.hpp"
#include "sfsim/transport.hpp"

namespace sfsim {

// How a run ended. Halting at the density floor is a *correct* outcome (the
// model's existence theory is conditional on density positivity, and the
// solver's job includes detecting the loss), so it is distinguished from both
// completion and numerical failure.
enum class RunOutcome { Completed, HaltedDensityFloor, StepperFailure };

struct RunOptions {
  std::string output_dir_override;  // --output; wins over the config
  std::string resume_path;          // checkpoint to continue from
  std::string config_stem;          // config-file stem, used for default dirs
  bool keep_history = false;        // record (t, u, source, rho) per step
  bool write_files = true;          // false: in-memory only (tests, oracle)
};

struct RunReport {
  RunOutcome outcome = RunOutcome::Completed;
  double t_final = 0.0;
  std::uint64_t steps = 0;  // global index of the last accepted state
  std::string output_dir;
  std::vector<DiagnosticsRecord> records;
  double e0 = 0.0;
  double x0 = 0.0;
  SimState final_state;
  FlowHistory history;  // populated when keep_history
};

// Default output directory: override > config [output] directory >
// $SFSIM_OUTPUT_DIR/<stem> > ./<stem>  (stem falls back to "run").
std::string resolve_output_dir(const RunConfig& config, const RunOptions& opts);

// Integrate the configured problem from t = 0 (or from the resume checkpoint,
// whose embedded config then governs the dynamics) to t_end. Emits a
// diagnostics row every output interval plus one at the final state whatever
// the outcome; writes scheduled checkpoints and a final one; a step whose
// stage evaluations reject retries with halved dt (six levels deep) before
// the run is declared a stepper failure. The density watchdog runs on every
// accepted state. Identical config and seed give a bit-identical CSV.
RunReport run_simulation(const RunConfig& config, const RunOptions& opts = {});

// CSV serialization of the diagnostics ledger: fixed header, one row per
// record, every value printed with 17 significant digits, written atomically
// (temp file then rename). read_diagnostics inverts it exactly.
void emit_diagnostics(const std::vector<DiagnosticsRecord>& records,
                      const std::string& path);
std::vector<DiagnosticsRecord> read_diagnostics(const std::string& path);

const char* outcome_name(RunOutcome o);

}  // namespace sfsim
