#pragma once

#include <cstdint>
#include <string>

#include "sfsim/config.hpp"
#include "sfsim/galerkin.hpp"

namespace sfsim {

// Binary snapshot of a run: full spectral state plus the run configuration
// (embedded as its canonical text form) and the scalars a resumed run needs
// to reproduce the remaining diagnostics rows bit for bit.
//
// Layout (all integers and doubles little-endian, doubles IEEE-754 binary64):
//   bytes 0..3   magic "SFS1"
//   u32          format version (1)
//   u32          dim
//   u32[3]       grid resolution
//   f64[3]       domain lengths
//   u32          truncation cutoff
//   f64          time t
//   u64          step index
//   f64          accumulated viscous dissipation
//   f64          accumulated coupling dissipation
//   f64          initial total energy E0
//   f64          initial Gronwall functional X0
//   u32          config text length, followed by that many bytes
//   f64 pairs    psi coefficients (re, im), row-major flat order
//   f64 pairs    rho coefficients
//   f64 pairs    u component coefficients, one block per axis (dim blocks)
struct CheckpointData {
  SimState state;
  RunConfig config;
  std::uint64_t step = 0;
  double e0 = 0.0;
  double x0 = 0.0;
};

// Writes atomically (temp file in the same directory, then rename).
void write_checkpoint(const std::string& path, const SimState& state,
                      const RunConfig& config, std::uint64_t step, double e0,
                      double x0);

// Throws format_error on bad magic, unsupported version, or truncation;
// nothing is partially constructed on failure.
CheckpointData read_checkpoint(const std::string& path);

}  // namespace sfsim
