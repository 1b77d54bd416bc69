#include "sfsim/grid.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <string>

#include "sfsim/errors.hpp"

namespace sfsim {

namespace detail {

// Owns one forward and one backward FFTW plan for a fixed shape. Plans are
// created with FFTW_ESTIMATE (deterministic planning, no input-dependent
// tuning) and FFTW_UNALIGNED so they can execute on any caller buffer via the
// new-array interface.
class FftEngine {
public:
  FftEngine(int dim, const std::array<int, 3>& n) {
    std::vector<std::complex<double>> scratch;
    std::size_t total = 1;
    for (int a = 0; a < dim; ++a) total *= std::size_t(n[a]);
    scratch.resize(total);
    auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    switch (dim) {
      case 1:
        fwd_ = fftw_plan_dft_1d(n[0], ptr, ptr, FFTW_FORWARD, flags);
        bwd_ = fftw_plan_dft_1d(n[0], ptr, ptr, FFTW_BACKWARD, flags);
        break;
      case 2:
        fwd_ = fftw_plan_dft_2d(n[0], n[1], ptr, ptr, FFTW_FORWARD, flags);
        bwd_ = fftw_plan_dft_2d(n[0], n[1], ptr, ptr, FFTW_BACKWARD, flags);
        break;
      default:
        fwd_ = fftw_plan_dft_3d(n[0], n[1], n[2], ptr, ptr, FFTW_FORWARD, flags);
        bwd_ = fftw_plan_dft_3d(n[0], n[1], n[2], ptr, ptr, FFTW_BACKWARD, flags);
        break;
    }
    if (!fwd_ || !bwd_) throw error("FFT plan creation failed");
  }

  ~FftEngine() {
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
  }

  void forward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(fwd_, p, p);
  }
  void backward(std::complex<double>* data) const {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(bwd_, p, p);
  }

private:
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace detail

Grid::Grid(int dim, std::array<int, 3> n, std::array<double, 3> length)
    : dim_(dim), n_(n), length_(length) {
  size_ = 1;
  volume_ = 1.0;
  for (int a = 0; a < 3; ++a) two_pi_over_l_[a] = 0.0;
  for (int a = 0; a < dim_; ++a) {
    size_ *= std::size_t(n_[a]);
    volume_ *= length_[a];
    two_pi_over_l_[a] = 2.0 * std::numbers::pi / length_[a];
  }
  engine_ = std::make_unique<detail::FftEngine>(dim_, n_);
}

Grid::~Grid() = default;

std::shared_ptr<const Grid> Grid::create(int dim, std::array<int, 3> n,
                                         std::array<double, 3> length) {
  if (dim < 1 || dim > 3)
    throw parameter_error("grid dimension must be 1, 2, or 3; got " +
                          std::to_string(dim));
  for (int a = 0; a < dim; ++a) {
    if (n[a] < 2 || n[a] % 2 != 0)
      throw parameter_error("grid resolution along axis " + std::to_string(a) +
                            " must be even and >= 2; got " + std::to_string(n[a]));
    if (length[a] == 0.0) length[a] = 2.0 * std::numbers::pi;
    if (!(length[a] > 0.0))
      throw parameter_error("grid length along axis " + std::to_string(a) +
                            " must be positive");
  }
  for (int a = dim; a < 3; ++a) {
    n[a] = 1;
    length[a] = 1.0;
  }
  return std::shared_ptr<const Grid>(new Grid(dim, n, length));
}

void Grid::forward(std::vector<std::complex<double>>& data) const {
  if (data.size() != size_) throw dimension_error("FFT buffer size mismatch");
  engine_->forward(data.data());
  const double scale = 1.0 / double(size_);
  for (auto& v : data) v *= scale;
}

void Grid::backward(std::vector<std::complex<double>>& data) const {
  if (data.size() != size_) throw dimension_error("FFT buffer size mismatch");
  engine_->backward(data.data());
}

}  // namespace sfsim
