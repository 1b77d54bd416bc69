#include "sfsim/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "sfsim/errors.hpp"

namespace sfsim {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw format_error("config line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters after number '" + v + "'");
    return x;
  } catch (const format_error&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    long long x = std::stoll(v, &pos);
    if (pos != v.size()) fail(line, "trailing characters after integer '" + v + "'");
    return x;
  } catch (const format_error&) {
    throw;
  } catch (const std::exception&) {
    fail(line, "expected an integer, got '" + v + "'");
  }
}

std::vector<std::string> split_ws(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

// 1-3 whitespace-separated integers; unspecified trailing entries take `fill`.
std::array<int, 3> parse_int3(const std::string& v, int line, int fill) {
  auto toks = split_ws(v);
  if (toks.empty() || toks.size() > 3) fail(line, "expected 1 to 3 integers, got '" + v + "'");
  std::array<int, 3> out{fill, fill, fill};
  for (std::size_t i = 0; i < toks.size(); ++i)
    out[i] = static_cast<int>(parse_int(toks[i], line));
  return out;
}

std::array<double, 3> parse_double3(const std::string& v, int line, double fill) {
  auto toks = split_ws(v);
  if (toks.empty() || toks.size() > 3) fail(line, "expected 1 to 3 numbers, got '" + v + "'");
  std::array<double, 3> out{fill, fill, fill};
  for (std::size_t i = 0; i < toks.size(); ++i) out[i] = parse_double(toks[i], line);
  return out;
}

StateKind parse_state_kind(const std::string& v, int line) {
  if (v == "plane_wave") return StateKind::PlaneWave;
  if (v == "taylor_green") return StateKind::TaylorGreen;
  if (v == "shear_mode") return StateKind::ShearMode;
  if (v == "random_smooth") return StateKind::RandomSmooth;
  if (v == "composite") return StateKind::Composite;
  fail(line, "unknown state kind '" + v + "'");
}

DensityKind parse_density_kind(const std::string& v, int line) {
  if (v == "constant") return DensityKind::Constant;
  if (v == "sine_perturbed") return DensityKind::SinePerturbed;
  if (v == "mollified") return DensityKind::Mollified;
  fail(line, "unknown density kind '" + v + "'");
}

const char* state_kind_name(StateKind k) {
  switch (k) {
    case StateKind::PlaneWave: return "plane_wave";
    case StateKind::TaylorGreen: return "taylor_green";
    case StateKind::ShearMode: return "shear_mode";
    case StateKind::RandomSmooth: return "random_smooth";
    case StateKind::Composite: return "composite";
  }
  return "plane_wave";
}

const char* density_kind_name(DensityKind k) {
  switch (k) {
    case DensityKind::Constant: return "constant";
    case DensityKind::SinePerturbed: return "sine_perturbed";
    case DensityKind::Mollified: return "mollified";
  }
  return "constant";
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt3i(const std::array<int, 3>& a, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += std::to_string(a[i]);
  }
  return out;
}

std::string fmt3d(const std::array<double, 3>& a, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += fmt(a[i]);
  }
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::istringstream input(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(input, raw)) {
    ++line;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(line, "unterminated section header '" + s + "'");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "grid" && section != "model" && section != "truncation" &&
          section != "initial" && section != "stepper" && section != "output")
        fail(line, "unknown section [" + section + "]");
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) fail(line, "expected 'key = value', got '" + s + "'");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty()) fail(line, "empty key");
    if (section.empty()) fail(line, "key '" + key + "' outside any section");

    if (section == "grid") {
      if (key == "dim") c.dim = static_cast<int>(parse_int(value, line));
      else if (key == "resolution") c.resolution = parse_int3(value, line, 1);
      else if (key == "length") c.lengths = parse_double3(value, line, c.lengths[0]);
      else fail(line, "unknown key '" + key + "' in section [grid]");
    } else if (section == "model") {
      if (key == "lambda") c.params.lambda = parse_double(value, line);
      else if (key == "mu") c.params.mu = parse_double(value, line);
      else if (key == "nu") c.params.nu = parse_double(value, line);
      else if (key == "m") c.params.m = parse_double(value, line);
      else if (key == "M") c.params.M = parse_double(value, line);
      else if (key == "epsilon") c.params.eps = parse_double(value, line);
      else fail(line, "unknown key '" + key + "' in section [model]");
    } else if (section == "truncation") {
      if (key == "cutoff") c.cutoff = static_cast<int>(parse_int(value, line));
      else fail(line, "unknown key '" + key + "' in section [truncation]");
    } else if (section == "initial") {
      if (key == "kind") c.initial.kind = parse_state_kind(value, line);
      else if (key == "amplitude") c.initial.amplitude = parse_double(value, line);
      else if (key == "wavevector") c.initial.wavevector = parse_int3(value, line, 0);
      else if (key == "wave") {
        // Extra PlaneWave component: amplitude followed by 1-3 integers.
        auto toks = split_ws(value);
        if (toks.size() < 2 || toks.size() > 4)
          fail(line, "wave needs an amplitude and 1 to 3 integers, got '" + value + "'");
        WaveComponent w;
        w.amplitude = parse_double(toks[0], line);
        for (std::size_t i = 1; i < toks.size(); ++i)
          w.wavevector[i - 1] = static_cast<int>(parse_int(toks[i], line));
        c.initial.extra_waves.push_back(w);
      }
      else if (key == "decay") c.initial.decay = parse_double(value, line);
      else if (key == "seed") c.initial.seed = static_cast<std::uint64_t>(parse_int(value, line));
      else if (key == "psi_kind") c.initial.psi_kind = parse_state_kind(value, line);
      else if (key == "psi_amplitude") c.initial.psi_amplitude = parse_double(value, line);
      else if (key == "psi_wavevector") c.initial.psi_wavevector = parse_int3(value, line, 0);
      else if (key == "u_kind") c.initial.u_kind = parse_state_kind(value, line);
      else if (key == "u_amplitude") c.initial.u_amplitude = parse_double(value, line);
      else if (key == "u_wavevector") c.initial.u_wavevector = parse_int3(value, line, 0);
      else if (key == "density") c.initial.density = parse_density_kind(value, line);
      else if (key == "density_base") c.initial.density_base = parse_double(value, line);
      else if (key == "density_amplitude") c.initial.density_amplitude = parse_double(value, line);
      else if (key == "density_wavevector") c.initial.density_wavevector = parse_int3(value, line, 0);
      else if (key == "mollify_width") c.initial.mollify_width = parse_double(value, line);
      else fail(line, "unknown key '" + key + "' in section [initial]");
    } else if (section == "stepper") {
      if (key == "type") {
        if (value == "rk4") c.stepper = StepperKind::RK4;
        else if (value == "picard") c.stepper = StepperKind::Picard;
        else fail(line, "unknown stepper type '" + value + "'");
      } else if (key == "dt") c.dt = parse_double(value, line);
      else if (key == "t_end") c.t_end = parse_double(value, line);
      else if (key == "picard_tol") c.picard_tol = parse_double(value, line);
      else if (key == "picard_max_iter") c.picard_max_iter = static_cast<int>(parse_int(value, line));
      else fail(line, "unknown key '" + key + "' in section [stepper]");
    } else {  // output
      if (key == "directory") c.output_dir = value;
      else if (key == "interval") c.output_interval = static_cast<int>(parse_int(value, line));
      else if (key == "checkpoint_interval") c.checkpoint_interval = static_cast<int>(parse_int(value, line));
      else fail(line, "unknown key '" + key + "' in section [output]");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  RunConfig c = parse_config(buf.str());
  validate_config(c);
  return c;
}

std::string serialize_config(const RunConfig& c) {
  std::ostringstream out;
  const int n = c.dim;
  out << "[grid]\n";
  out << "dim = " << c.dim << "\n";
  out << "resolution = " << fmt3i(c.resolution, n) << "\n";
  out << "length = " << fmt3d(c.lengths, n) << "\n";
  out << "\n[model]\n";
  out << "lambda = " << fmt(c.params.lambda) << "\n";
  out << "mu = " << fmt(c.params.mu) << "\n";
  out << "nu = " << fmt(c.params.nu) << "\n";
  out << "m = " << fmt(c.params.m) << "\n";
  out << "M = " << fmt(c.params.M) << "\n";
  out << "epsilon = " << fmt(c.params.eps) << "\n";
  out << "\n[truncation]\n";
  out << "cutoff = " << c.cutoff << "\n";
  out << "\n[initial]\n";
  out << "kind = " << state_kind_name(c.initial.kind) << "\n";
  out << "amplitude = " << fmt(c.initial.amplitude) << "\n";
  out << "wavevector = " << fmt3i(c.initial.wavevector, 3) << "\n";
  for (const WaveComponent& w : c.initial.extra_waves)
    out << "wave = " << fmt(w.amplitude) << " " << fmt3i(w.wavevector, 3) << "\n";
  out << "decay = " << fmt(c.initial.decay) << "\n";
  out << "seed = " << c.initial.seed << "\n";
  out << "psi_kind = " << state_kind_name(c.initial.psi_kind) << "\n";
  out << "psi_amplitude = " << fmt(c.initial.psi_amplitude) << "\n";
  out << "psi_wavevector = " << fmt3i(c.initial.psi_wavevector, 3) << "\n";
  out << "u_kind = " << state_kind_name(c.initial.u_kind) << "\n";
  out << "u_amplitude = " << fmt(c.initial.u_amplitude) << "\n";
  out << "u_wavevector = " << fmt3i(c.initial.u_wavevector, 3) << "\n";
  out << "density = " << density_kind_name(c.initial.density) << "\n";
  out << "density_base = " << fmt(c.initial.density_base) << "\n";
  out << "density_amplitude = " << fmt(c.initial.density_amplitude) << "\n";
  out << "density_wavevector = " << fmt3i(c.initial.density_wavevector, 3) << "\n";
  out << "mollify_width = " << fmt(c.initial.mollify_width) << "\n";
  out << "\n[stepper]\n";
  out << "type = " << (c.stepper == StepperKind::RK4 ? "rk4" : "picard") << "\n";
  out << "dt = " << fmt(c.dt) << "\n";
  out << "t_end = " << fmt(c.t_end) << "\n";
  out << "picard_tol = " << fmt(c.picard_tol) << "\n";
  out << "picard_max_iter = " << c.picard_max_iter << "\n";
  out << "\n[output]\n";
  out << "directory = " << c.output_dir << "\n";
  out << "interval = " << c.output_interval << "\n";
  out << "checkpoint_interval = " << c.checkpoint_interval << "\n";
  return out.str();
}

void validate_config(const RunConfig& c) {
  if (c.dim < 1 || c.dim > 3)
    throw validation_error("grid dim must be 1, 2, or 3");
  for (int a = 0; a < c.dim; ++a) {
    if (c.resolution[a] < 2 || c.resolution[a] % 2 != 0)
      throw validation_error("grid resolution must be even and at least 2 on every axis");
    if (!(c.lengths[a] > 0.0))
      throw validation_error("grid lengths must be positive");
  }
  c.params.validate();
  int band = (c.resolution[0] - 1) / 3;
  for (int a = 1; a < c.dim; ++a) band = std::min(band, (c.resolution[a] - 1) / 3);
  if (c.cutoff < 0 || c.cutoff > band)
    throw validation_error("truncation cutoff must lie within the dealias band (cutoff <= (N-1)/3 on every axis)");
  if (!(c.dt > 0.0)) throw validation_error("dt must be positive");
  if (!(c.t_end >= 0.0)) throw validation_error("t_end must be nonnegative");
  double steps = c.t_end / c.dt;
  double rounded = std::round(steps);
  if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, steps))
    throw validation_error("t_end must be an integer multiple of dt");
  if (c.output_interval < 1) throw validation_error("output interval must be at least 1 step");
  if (c.checkpoint_interval < 0) throw validation_error("checkpoint interval must be nonnegative");
  if (c.stepper == StepperKind::Picard) {
    if (!(c.picard_tol > 0.0)) throw validation_error("picard_tol must be positive");
    if (c.picard_max_iter < 1) throw validation_error("picard_max_iter must be at least 1");
  }
}

GridPtr make_grid(const RunConfig& c) {
  return Grid::create(c.dim, c.resolution, c.lengths);
}

std::uint64_t step_count(const RunConfig& c) {
  return static_cast<std::uint64_t>(std::llround(c.t_end / c.dt));
}

}  // namespace sfsim
