// Configuration parsing, checkpointing, the run loop's outcome contract, CSV
// round trips, and the installed command-line front end.

#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "sfsim/checkpoint.hpp"
#include "sfsim/config.hpp"
#include "sfsim/errors.hpp"
#include "sfsim/field.hpp"
#include "sfsim/run.hpp"

using namespace sfsim;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("sfsim_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

void spit(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

// A small coupled problem that exercises every term: random smooth wave
// function over a Taylor-Green flow with perturbed density.
RunConfig coupled_config() {
  RunConfig c;
  c.dim = 2;
  c.resolution = {32, 32, 1};
  c.cutoff = 5;
  c.params = make_params(1.0, 1.0, 0.1, 0.5, 2.0, 0.1);
  c.initial.kind = StateKind::Composite;
  c.initial.psi_kind = StateKind::RandomSmooth;
  c.initial.psi_amplitude = 0.3;
  c.initial.decay = 6.0;
  c.initial.seed = 42;
  c.initial.u_kind = StateKind::TaylorGreen;
  c.initial.u_amplitude = 0.2;
  c.initial.u_wavevector = {1, 1, 0};
  c.initial.density = DensityKind::SinePerturbed;
  c.initial.density_base = 1.0;
  c.initial.density_amplitude = 0.2;
  c.initial.density_wavevector = {1, 0, 0};
  c.dt = 1e-3;
  c.t_end = 0.03;
  c.output_interval = 10;
  c.checkpoint_interval = 0;
  return c;
}

RunOptions memory_only() {
  RunOptions o;
  o.write_files = false;
  return o;
}

#ifdef SFSIM_CLI_PATH
int run_cli(const std::string& args, const fs::path& log) {
  std::string cmd = std::string(SFSIM_CLI_PATH) + " " + args + " > " +
                    log.string() + " 2>&1";
  int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
#endif

}  // namespace

TEST_CASE("config: defaults survive a serialize/parse round trip") {
  RunConfig def;
  std::string text = serialize_config(def);
  RunConfig back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(back.dim == 2);
  CHECK(back.resolution == std::array<int, 3>{32, 32, 1});
  CHECK(back.lengths[0] == 2.0 * kPi);
  CHECK(back.cutoff == 5);
  CHECK(back.dt == 1e-3);
  CHECK(back.t_end == 1.0);
  CHECK(back.stepper == StepperKind::RK4);
  CHECK(back.output_interval == 10);
  CHECK_NOTHROW(validate_config(back));
}

TEST_CASE("config: a fully customized config round-trips exactly") {
  RunConfig c;
  c.dim = 3;
  c.resolution = {16, 32, 16};
  c.lengths = {2.0 * kPi, 4.0 * kPi, 1.0};
  c.cutoff = 4;
  c.params = make_params(2.5, 0.7, 0.013, 0.25, 3.5, 0.2);
  c.initial.kind = StateKind::Composite;
  c.initial.amplitude = 0.125;
  c.initial.wavevector = {0, 0, 0};
  c.initial.extra_waves = {{0.4, {1, 0, 0}}, {0.4, {-1, 0, 0}}, {-0.25, {0, 2, 1}}};
  c.initial.decay = 4.75;
  c.initial.seed = 123456789;
  c.initial.psi_kind = StateKind::RandomSmooth;
  c.initial.psi_amplitude = 0.05;
  c.initial.u_kind = StateKind::ShearMode;
  c.initial.u_amplitude = 0.3;
  c.initial.u_wavevector = {0, 2, 0};
  c.initial.density = DensityKind::Mollified;
  c.initial.density_base = 0.5;
  c.initial.density_amplitude = 1.5;
  c.initial.mollify_width = 0.0625;
  c.stepper = StepperKind::Picard;
  c.dt = 1.0 / 1024.0;
  c.t_end = 0.25;
  c.picard_tol = 1e-11;
  c.picard_max_iter = 80;
  c.output_interval = 16;
  c.checkpoint_interval = 64;
  c.output_dir = "some/dir";

  std::string text = serialize_config(c);
  RunConfig back = parse_config(text);
  CHECK(serialize_config(back) == text);
  CHECK(back.initial.extra_waves.size() == 3);
  CHECK(back.initial.extra_waves[2].amplitude == -0.25);
  CHECK(back.initial.extra_waves[2].wavevector == std::array<int, 3>{0, 2, 1});
  CHECK(back.params.eps == 0.2);
  CHECK(back.stepper == StepperKind::Picard);
  CHECK(back.picard_tol == 1e-11);
  CHECK(back.output_dir == "some/dir");
}

TEST_CASE("config: minimal text gets defaults, comments and blanks ignored") {
  RunConfig c = parse_config(
      "# half-period run\n"
      "[grid]\n"
      "dim = 2            # two dimensional\n"
      "resolution = 16\n"
      "\n"
      "[stepper]\n"
      "dt = 0.01\n"
      "t_end = 0.5\n");
  CHECK(c.resolution == std::array<int, 3>{16, 1, 1});
  CHECK(c.dt == 0.01);
  CHECK(c.t_end == 0.5);
  CHECK(c.params.mu == 1.0);       // default
  CHECK(c.output_interval == 10);  // default
  // resolution filled with 1 on the unspecified axis is invalid for dim 2
  CHECK_THROWS_AS(validate_config(c), validation_error);
  c.resolution = {16, 16, 1};
  c.cutoff = 5;
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("config: errors carry line numbers and name the violated invariant") {
  auto message_of = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const format_error& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };

  CHECK(message_of("[grid]\ndim = 2\nbogus = 3\n").find("line 3") != std::string::npos);
  CHECK(message_of("[grid]\ndim = 2\nbogus = 3\n").find("bogus") != std::string::npos);
  CHECK(message_of("[nope]\n").find("line 1") != std::string::npos);
  CHECK(message_of("[grid]\ndim = two\n").find("line 2") != std::string::npos);
  CHECK(message_of("dim = 2\n").find("outside any section") != std::string::npos);
  CHECK(message_of("[stepper]\ndt 0.01\n").find("key = value") != std::string::npos);

  RunConfig c;
  c.params.eps = 0.7;
  c.params.m = 0.5;  // floor above the lower bound
  try {
    validate_config(c);
    FAIL("expected a validation error");
  } catch (const validation_error& e) {
    CHECK(std::string(e.what()).find("density floor") != std::string::npos);
  }

  c = RunConfig{};
  c.dt = 0.0;
  CHECK_THROWS_AS(validate_config(c), validation_error);
  c = RunConfig{};
  c.t_end = 0.0105;  // not a multiple of dt = 1e-3
  CHECK_THROWS_AS(validate_config(c), validation_error);
  c = RunConfig{};
  c.cutoff = 11;  // dealias band at 32 is 10
  CHECK_THROWS_AS(validate_config(c), validation_error);
  c = RunConfig{};
  c.t_end = 0.0;  // degenerate but allowed: completes immediately
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("checkpoint: write/read round trip is bit-exact") {
  RunConfig c = coupled_config();
  GridPtr grid = make_grid(c);
  GalerkinTruncation trunc{c.cutoff};
  SimState s = build_initial_state(grid, c.initial, trunc, c.params);
  s.t = 0.125;
  s.acc_visc = 3.0e-4;
  s.acc_coup = 7.0e-4;

  fs::path dir = temp_dir("ckpt_roundtrip");
  std::string path = (dir / "state.ckpt").string();
  write_checkpoint(path, s, c, 125, 1.0657, 1.702);
  CheckpointData back = read_checkpoint(path);

  CHECK(back.step == 125);
  CHECK(back.e0 == 1.0657);
  CHECK(back.x0 == 1.702);
  CHECK(back.state.t == 0.125);
  CHECK(back.state.acc_visc == 3.0e-4);
  CHECK(back.state.acc_coup == 7.0e-4);
  CHECK(serialize_config(back.config) == serialize_config(c));
  REQUIRE(back.state.psi.coef().size() == s.psi.coef().size());
  for (std::size_t i = 0; i < s.psi.coef().size(); ++i) {
    CHECK(back.state.psi.coef()[i] == s.psi.coef()[i]);
    CHECK(back.state.rho.coef()[i] == s.rho.coef()[i]);
    CHECK(back.state.u.comp(0).coef()[i] == s.u.comp(0).coef()[i]);
    CHECK(back.state.u.comp(1).coef()[i] == s.u.comp(1).coef()[i]);
  }
  CHECK(back.state.rho.is_real());
  CHECK(back.state.u.comp(0).is_real());

  // Writing the read-back state reproduces the file byte for byte.
  std::string again = (dir / "again.ckpt").string();
  write_checkpoint(again, back.state, back.config, back.step, back.e0, back.x0);
  CHECK(slurp(path) == slurp(again));
}

TEST_CASE("checkpoint: corrupt magic and truncation are rejected cleanly") {
  RunConfig c = coupled_config();
  GridPtr grid = make_grid(c);
  SimState s = build_initial_state(grid, c.initial, GalerkinTruncation{c.cutoff},
                                   c.params);
  fs::path dir = temp_dir("ckpt_corrupt");
  std::string path = (dir / "state.ckpt").string();
  write_checkpoint(path, s, c, 0, 1.0, 1.0);

  std::string bytes = slurp(path);
  std::string corrupt = bytes;
  corrupt[0] = 'X';
  spit(dir / "bad_magic.ckpt", corrupt);
  CHECK_THROWS_AS(read_checkpoint((dir / "bad_magic.ckpt").string()), format_error);

  std::string wrong_version = bytes;
  wrong_version[4] = 9;  // little-endian low byte of the version word
  spit(dir / "bad_version.ckpt", wrong_version);
  try {
    read_checkpoint((dir / "bad_version.ckpt").string());
    FAIL("expected a version error");
  } catch (const format_error& e) {
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }

  spit(dir / "short.ckpt", bytes.substr(0, bytes.size() / 2));
  CHECK_THROWS_AS(read_checkpoint((dir / "short.ckpt").string()), format_error);

  spit(dir / "trailing.ckpt", bytes + "junk");
  CHECK_THROWS_AS(read_checkpoint((dir / "trailing.ckpt").string()), format_error);

  CHECK_THROWS_AS(read_checkpoint((dir / "missing.ckpt").string()), format_error);
}

TEST_CASE("diagnostics csv: records round-trip exactly, empty gives header only") {
  std::vector<DiagnosticsRecord> records;
  DiagnosticsRecord r;
  r.t = 0.1;
  r.mass_psi = 5.3537703318222452;
  r.mass_rho = 39.478417604357432;
  r.mass_total = r.mass_psi + r.mass_rho;
  r.energy_kinetic = 0.39478417604357602;
  r.energy_gradient = 1.0 / 3.0;
  r.energy_potential = 0.4413746902308075;
  r.acc_visc = 1.575173260678419e-3;
  r.acc_coup = 9.0552692238879667e-3;
  r.energy_residual = -1.4792352314974608e-14;
  r.rho_min = 0.79977963847180011;
  r.rho_max = 1.2020062253134725;
  r.gronwall_x = 1.6886636598549609;
  r.gronwall_y = 0.49538746786432025;
  r.bpsi_sup = 0.25255278616411075;
  records.push_back(r);
  DiagnosticsRecord r2 = r;
  r2.t = 0.2;
  r2.energy_residual = 0.0;
  records.push_back(r2);

  fs::path dir = temp_dir("csv_roundtrip");
  std::string path = (dir / "diag.csv").string();
  emit_diagnostics(records, path);
  std::vector<DiagnosticsRecord> back = read_diagnostics(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].t == r.t);
  CHECK(back[0].mass_psi == r.mass_psi);
  CHECK(back[0].mass_rho == r.mass_rho);
  CHECK(back[0].mass_total == r.mass_total);
  CHECK(back[0].energy_kinetic == r.energy_kinetic);
  CHECK(back[0].energy_gradient == r.energy_gradient);
  CHECK(back[0].energy_potential == r.energy_potential);
  CHECK(back[0].acc_visc == r.acc_visc);
  CHECK(back[0].acc_coup == r.acc_coup);
  CHECK(back[0].energy_residual == r.energy_residual);
  CHECK(back[0].rho_min == r.rho_min);
  CHECK(back[0].rho_max == r.rho_max);
  CHECK(back[0].gronwall_x == r.gronwall_x);
  CHECK(back[0].gronwall_y == r.gronwall_y);
  CHECK(back[0].bpsi_sup == r.bpsi_sup);
  CHECK(back[1].t == 0.2);

  emit_diagnostics({}, path);
  std::string text = slurp(path);
  CHECK(text.find("t,mass_psi,") == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(read_diagnostics(path).empty());
}

TEST_CASE("run: identical config gives bit-identical CSV, different seed differs") {
  RunConfig c = coupled_config();
  fs::path dir = temp_dir("determinism");
  RunOptions o1, o2;
  o1.output_dir_override = (dir / "a").string();
  o2.output_dir_override = (dir / "b").string();
  RunReport r1 = run_simulation(c, o1);
  RunReport r2 = run_simulation(c, o2);
  CHECK(r1.outcome == RunOutcome::Completed);
  CHECK(slurp(dir / "a" / "diagnostics.csv") == slurp(dir / "b" / "diagnostics.csv"));
  CHECK(slurp(dir / "a" / "final.ckpt") == slurp(dir / "b" / "final.ckpt"));

  RunConfig c3 = c;
  c3.initial.seed = 43;
  RunOptions o3;
  o3.output_dir_override = (dir / "c").string();
  run_simulation(c3, o3);
  CHECK(slurp(dir / "a" / "diagnostics.csv") != slurp(dir / "c" / "diagnostics.csv"));
}

TEST_CASE("run: resuming mid-run reproduces the uninterrupted tail exactly") {
  RunConfig c = coupled_config();
  c.t_end = 0.04;           // 40 steps
  c.checkpoint_interval = 20;
  fs::path dir = temp_dir("resume");

  RunOptions full;
  full.output_dir_override = (dir / "full").string();
  RunReport base = run_simulation(c, full);
  CHECK(base.outcome == RunOutcome::Completed);
  CHECK(base.steps == 40);

  RunOptions resume;
  resume.output_dir_override = (dir / "tail").string();
  resume.resume_path = (dir / "full" / "ckpt_20.ckpt").string();
  RunReport tail = run_simulation(c, resume);
  CHECK(tail.outcome == RunOutcome::Completed);
  CHECK(tail.steps == 40);

  // Final CSV row and final checkpoint match to the last bit.
  std::string full_csv = slurp(dir / "full" / "diagnostics.csv");
  std::string tail_csv = slurp(dir / "tail" / "diagnostics.csv");
  auto last_line = [](const std::string& text) {
    auto end = text.find_last_not_of('\n');
    auto begin = text.rfind('\n', end);
    return text.substr(begin + 1, end - begin);
  };
  CHECK(last_line(full_csv) == last_line(tail_csv));
  CHECK(slurp(dir / "full" / "final.ckpt") == slurp(dir / "tail" / "final.ckpt"));

  // The tail's ledger is the suffix of the full ledger (rows 20, 30, 40).
  std::vector<DiagnosticsRecord> full_rows =
      read_diagnostics((dir / "full" / "diagnostics.csv").string());
  std::vector<DiagnosticsRecord> tail_rows =
      read_diagnostics((dir / "tail" / "diagnostics.csv").string());
  REQUIRE(full_rows.size() == 5);
  REQUIRE(tail_rows.size() == 3);
  for (std::size_t i = 0; i < tail_rows.size(); ++i) {
    CHECK(tail_rows[i].t == full_rows[i + 2].t);
    CHECK(tail_rows[i].energy_residual == full_rows[i + 2].energy_residual);
  }
}

TEST_CASE("run: t_end zero completes immediately with a single row") {
  RunConfig c = coupled_config();
  c.t_end = 0.0;
  RunReport r = run_simulation(c, memory_only());
  CHECK(r.outcome == RunOutcome::Completed);
  CHECK(r.steps == 0);
  CHECK(r.t_final == 0.0);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].t == 0.0);
  CHECK(r.records[0].energy_residual == 0.0);
}

TEST_CASE("run: free plane wave matches the analytic phase") {
  RunConfig c;
  c.dim = 2;
  c.resolution = {32, 32, 1};
  c.cutoff = 5;
  c.params = make_params(0.0, 1.0, 0.1, 0.5, 2.0, 0.1);  // lambda = 0
  c.initial.kind = StateKind::PlaneWave;
  c.initial.amplitude = 1.0;
  c.initial.wavevector = {1, 0, 0};
  c.dt = 1e-3;
  c.t_end = 0.2;
  RunReport r = run_simulation(c, memory_only());
  CHECK(r.outcome == RunOutcome::Completed);
  // omega = |k|^2/2 + mu |A|^2 = 1.5
  std::complex<double> expected =
      std::exp(std::complex<double>(0.0, -1.5 * r.t_final));
  std::complex<double> got = r.final_state.psi.coefficient({1, 0, 0});
  CHECK(std::abs(got - expected) <= 1e-10);
}

TEST_CASE("run: outcomes classify halts and contraction failures distinctly") {
  // Strong coupling against a standing amplitude minimum: density floor.
  RunConfig halt = load_config(std::string(SFSIM_CONFIG_DIR) + "/halt_sweep.ini");
  halt.output_interval = 50;
  RunReport r = run_simulation(halt, memory_only());
  CHECK(r.outcome == RunOutcome::HaltedDensityFloor);
  CHECK(r.t_final > 0.0);
  CHECK(r.t_final < halt.t_end);
  CHECK(!r.records.empty());
  // The final row reports the pinned state, still at or above the floor.
  CHECK(r.records.back().rho_min >= halt.params.eps - 1e-9);

  // A fixed-point iteration that is never allowed to converge.
  RunConfig c = coupled_config();
  c.stepper = StepperKind::Picard;
  c.picard_tol = 1e-30;
  c.picard_max_iter = 1;
  RunReport p = run_simulation(c, memory_only());
  CHECK(p.outcome == RunOutcome::StepperFailure);
  CHECK(p.t_final == 0.0);
}

TEST_CASE("run: output directory resolution order") {
  RunConfig c;
  RunOptions o;
  o.config_stem = "case";
  c.output_dir = "from_config";
  o.output_dir_override = "from_flag";
  CHECK(resolve_output_dir(c, o) == "from_flag");
  o.output_dir_override.clear();
  CHECK(resolve_output_dir(c, o) == "from_config");
  c.output_dir.clear();
  setenv("SFSIM_OUTPUT_DIR", "/tmp/sfsim_base", 1);
  CHECK(resolve_output_dir(c, o) == std::string("/tmp/sfsim_base") + "/case");
  unsetenv("SFSIM_OUTPUT_DIR");
  std::string local = resolve_output_dir(c, o);
  CHECK(local.find("case") != std::string::npos);
  CHECK(local.find('/') != std::string::npos);
}

#ifdef SFSIM_CLI_PATH

TEST_CASE("cli: run, validate, report, oracle, and exit codes") {
  fs::path dir = temp_dir("cli");
  fs::path log = dir / "log.txt";
  std::string cfg = std::string(SFSIM_CONFIG_DIR) + "/quickstart.ini";

  CHECK(run_cli("validate --config " + cfg, log) == 0);
  CHECK(slurp(log).find("config ok") != std::string::npos);

  fs::path run_dir = dir / "out";
  CHECK(run_cli("run --config " + cfg + " --output " + run_dir.string(), log) == 0);
  CHECK(slurp(log).find("outcome: completed") != std::string::npos);
  CHECK(fs::exists(run_dir / "diagnostics.csv"));
  CHECK(fs::exists(run_dir / "final.ckpt"));
  CHECK(fs::exists(run_dir / "summary.txt"));

  CHECK(run_cli("report " + run_dir.string(), log) == 0);
  CHECK(slurp(log).find("gronwall") != std::string::npos);

  CHECK(run_cli("oracle --config " + cfg + " --against " + run_dir.string(), log) == 0);
  CHECK(slurp(log).find("PASS") != std::string::npos);

  // Resume from the scheduled checkpoint: identical final row.
  fs::path tail_dir = dir / "tail";
  CHECK(run_cli("run --config " + cfg + " --resume " +
                    (run_dir / "ckpt_25.ckpt").string() + " --output " +
                    tail_dir.string(),
                log) == 0);
  auto last_line = [](const std::string& text) {
    auto end = text.find_last_not_of('\n');
    auto begin = text.rfind('\n', end);
    return text.substr(begin + 1, end - begin);
  };
  CHECK(last_line(slurp(run_dir / "diagnostics.csv")) ==
        last_line(slurp(tail_dir / "diagnostics.csv")));

  // Halt exit code is 2, distinct from success and from error.
  std::string halt_cfg = std::string(SFSIM_CONFIG_DIR) + "/halt_sweep.ini";
  CHECK(run_cli("run --config " + halt_cfg + " --output " +
                    (dir / "halt").string(),
                log) == 2);
  CHECK(slurp(log).find("halted_density_floor") != std::string::npos);

  // Errors exit 1: missing file, bad config text.
  CHECK(run_cli("run --config " + (dir / "absent.ini").string(), log) == 1);
  spit(dir / "bad.ini", "[grid]\nbogus = 1\n");
  CHECK(run_cli("validate --config " + (dir / "bad.ini").string(), log) == 1);
  CHECK(slurp(log).find("line 2") != std::string::npos);
}

#endif  // SFSIM_CLI_PATH
