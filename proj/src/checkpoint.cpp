#include "sfsim/checkpoint.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <vector>

#include "sfsim/errors.hpp"
#include "sfsim/field.hpp"

namespace sfsim {

namespace {

constexpr char kMagic[4] = {'S', 'F', 'S', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double x) {
  put_u64(out, std::bit_cast<std::uint64_t>(x));
}

void put_field(std::string& out, const SpectralField& f) {
  for (const Complex& c : f.coef()) {
    put_f64(out, c.real());
    put_f64(out, c.imag());
  }
}

class Reader {
public:
  explicit Reader(std::string bytes) : bytes_(std::move(bytes)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::string raw(std::size_t n) {
    need(n);
    std::string out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }

  bool exhausted() const { return pos_ == bytes_.size(); }

private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw format_error("checkpoint file is truncated");
  }

  std::string bytes_;
  std::size_t pos_ = 0;
};

SpectralField read_field(Reader& r, GridPtr grid, bool real) {
  std::vector<Complex> coef(static_cast<std::size_t>(grid->size()));
  for (Complex& c : coef) {
    double re = r.f64();
    double im = r.f64();
    c = Complex(re, im);
  }
  return SpectralField::from_coefficients(grid, std::move(coef), real);
}

void atomic_write(const std::string& path, const std::string& bytes) {
  namespace fs = std::filesystem;
  fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("cannot open '" + tmp.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw format_error("short write to '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

}  // namespace

void write_checkpoint(const std::string& path, const SimState& state,
                      const RunConfig& config, std::uint64_t step, double e0,
                      double x0) {
  const Grid& g = *state.psi.grid();
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(g.dim()));
  for (int a = 0; a < 3; ++a) put_u32(out, static_cast<std::uint32_t>(g.extents()[a]));
  for (int a = 0; a < 3; ++a) put_f64(out, g.lengths()[a]);
  put_u32(out, static_cast<std::uint32_t>(config.cutoff));
  put_f64(out, state.t);
  put_u64(out, step);
  put_f64(out, state.acc_visc);
  put_f64(out, state.acc_coup);
  put_f64(out, e0);
  put_f64(out, x0);
  std::string cfg = serialize_config(config);
  put_u32(out, static_cast<std::uint32_t>(cfg.size()));
  out += cfg;
  put_field(out, state.psi);
  put_field(out, state.rho);
  for (int a = 0; a < g.dim(); ++a) put_field(out, state.u.comp(a));
  atomic_write(path, out);
}

CheckpointData read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw format_error("cannot open checkpoint '" + path + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  Reader r(std::move(bytes));

  std::string magic = r.raw(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0)
    throw format_error("not a checkpoint file (bad magic)");
  std::uint32_t version = r.u32();
  if (version != kVersion)
    throw format_error("unsupported checkpoint version " + std::to_string(version));

  int dim = static_cast<int>(r.u32());
  std::array<int, 3> n{1, 1, 1};
  for (int a = 0; a < 3; ++a) n[a] = static_cast<int>(r.u32());
  std::array<double, 3> lengths{};
  for (int a = 0; a < 3; ++a) lengths[a] = r.f64();
  std::uint32_t cutoff = r.u32();

  CheckpointData data;
  double t = r.f64();
  data.step = r.u64();
  double acc_visc = r.f64();
  double acc_coup = r.f64();
  data.e0 = r.f64();
  data.x0 = r.f64();
  std::uint32_t cfg_len = r.u32();
  data.config = parse_config(r.raw(cfg_len));
  validate_config(data.config);
  if (data.config.dim != dim || data.config.resolution != n ||
      data.config.cutoff != static_cast<int>(cutoff))
    throw format_error("checkpoint header disagrees with its embedded config");

  GridPtr grid = Grid::create(dim, n, lengths);
  data.state.psi = read_field(r, grid, false);
  data.state.rho = read_field(r, grid, true);
  std::array<SpectralField, 3> comps;
  for (int a = 0; a < dim; ++a) comps[a] = read_field(r, grid, true);
  if (dim >= 2)
    data.state.u = VelocityField::from_components({comps[0], comps[1], comps[2]}, dim);
  else
    data.state.u = VelocityField::from_components({comps[0], SpectralField(), SpectralField()}, dim);
  data.state.t = t;
  data.state.acc_visc = acc_visc;
  data.state.acc_coup = acc_coup;
  if (!r.exhausted()) throw format_error("checkpoint has trailing bytes");
  return data;
}

}  // namespace sfsim
