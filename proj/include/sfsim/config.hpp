#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "sfsim/grid.hpp"
#include "sfsim/initial_data.hpp"
#include "sfsim/params.hpp"

namespace sfsim {

enum class StepperKind { RK4, Picard };

// Complete description of one simulation run. Parsed from a strict
// sectioned key = value text format (unknown keys and sections are errors,
// reported with their line number); serialize_config renders the canonical
// form, and parse(serialize(c)) reproduces c exactly.
struct RunConfig {
  int dim = 2;
  std::array<int, 3> resolution{32, 32, 1};
  std::array<double, 3> lengths{2.0 * 3.14159265358979323846,
                                2.0 * 3.14159265358979323846,
                                2.0 * 3.14159265358979323846};
  int cutoff = 5;
  ModelParams params;
  InitialDataSpec initial;
  StepperKind stepper = StepperKind::RK4;
  double dt = 1e-3;
  double t_end = 1.0;
  double picard_tol = 1e-8;
  int picard_max_iter = 50;
  int output_interval = 10;      // steps between diagnostics rows
  int checkpoint_interval = 0;   // steps between checkpoints; 0 = final only
  std::string output_dir;        // empty: resolved at run time
};

// Parse/serialize/load. load_config reads the file and validates.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& c);

// Invariant checks (also called by load_config): positive dt, t_end >= 0 and
// an integer multiple of dt, cutoff within the dealias band, model-parameter
// admissibility (the density floor must sit strictly inside (0, m)), stepper
// and output settings sane. Throws validation_error.
void validate_config(const RunConfig& c);

// Grid described by the config.
GridPtr make_grid(const RunConfig& c);

// Number of time steps the run takes (t_end / dt, validated integral).
std::uint64_t step_count(const RunConfig& c);

}  // namespace sfsim
