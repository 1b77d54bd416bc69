#pragma once

#include <array>
#include <complex>
#include <memory>
#include <vector>

namespace sfsim {

namespace detail {
class FftEngine;  // owns the FFTW plans for one grid shape
}

// Uniform periodic grid on a d-dimensional torus (d = 1, 2, 3). Physical and
// spectral arrays share one row-major layout of extent n[0] x ... x n[d-1];
// spectral index i along an axis of extent N encodes the integer mode
// m = i for i <= N/2 and m = i - N for i > N/2, i.e. modes run over
// (-N/2, N/2]. Forward transforms carry the 1/prod(N) factor, so spectral
// values are mode amplitudes: f(x) = sum_k fhat(k) exp(i k.x).
class Grid {
public:
  // Factory. Resolutions must be positive and even; lengths default to 2*pi.
  static std::shared_ptr<const Grid> create(int dim, std::array<int, 3> n,
                                            std::array<double, 3> length = {});

  int dim() const noexcept { return dim_; }
  int extent(int axis) const noexcept { return n_[axis]; }
  const std::array<int, 3>& extents() const noexcept { return n_; }
  double length(int axis) const noexcept { return length_[axis]; }
  const std::array<double, 3>& lengths() const noexcept { return length_; }

  std::size_t size() const noexcept { return size_; }
  double volume() const noexcept { return volume_; }
  double cell_volume() const noexcept { return volume_ / double(size_); }

  // Integer mode number for spectral index i along an axis.
  int mode(int axis, int index) const noexcept {
    const int N = n_[axis];
    return index <= N / 2 ? index : index - N;
  }
  // Physical wavenumber 2*pi*m / L for integer mode m.
  double wavenumber(int axis, int m) const noexcept {
    return two_pi_over_l_[axis] * double(m);
  }
  // Largest integer band K with 3K < N: pairwise products of fields supported
  // on |m| <= K, truncated back to |m| <= K, are free of aliasing.
  int dealias_band(int axis) const noexcept { return (n_[axis] - 1) / 3; }

  // Flat row-major index of a multi-index (trailing axes beyond dim are 0).
  std::size_t flatten(const std::array<int, 3>& idx) const noexcept {
    std::size_t f = 0;
    for (int a = 0; a < dim_; ++a) f = f * std::size_t(n_[a]) + std::size_t(idx[a]);
    return f;
  }
  // Spectral index along an axis for an integer mode m (must lie in band).
  int index_of_mode(int axis, int m) const noexcept {
    return m >= 0 ? m : m + n_[axis];
  }

  // Physical coordinate of grid point index i along an axis.
  double coordinate(int axis, int index) const noexcept {
    return length_[axis] * double(index) / double(n_[axis]);
  }

  bool same_shape(const Grid& other) const noexcept {
    return dim_ == other.dim_ && n_ == other.n_ && length_ == other.length_;
  }

  // In-place unnormalized FFTs used by the field layer. forward() applies the
  // 1/prod(N) normalization after the raw transform.
  void forward(std::vector<std::complex<double>>& data) const;
  void backward(std::vector<std::complex<double>>& data) const;

  ~Grid();
  Grid(const Grid&) = delete;
  Grid& operator=(const Grid&) = delete;

private:
  Grid(int dim, std::array<int, 3> n, std::array<double, 3> length);

  int dim_;
  std::array<int, 3> n_;
  std::array<double, 3> length_;
  std::array<double, 3> two_pi_over_l_;
  std::size_t size_;
  double volume_;
  std::unique_ptr<detail::FftEngine> engine_;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace sfsim
