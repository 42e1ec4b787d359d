#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "ksmix/field.hpp"

namespace ksmix::detail {

using cplx = std::complex<double>;

/// Real-to-complex transform pair for one grid, backed by cached FFTW plans.
///
/// forward() produces the raw unnormalized DFT in the half layout; backward()
/// is its unnormalized inverse, so backward(forward(f)) = N f.
class Fft {
 public:
  explicit Fft(const Grid& grid);

  void forward(const double* in, cplx* out) const;
  /// Both directions copy through internal aligned buffers; inputs are untouched.
  void backward(const cplx* in, double* out) const;

  const Grid& grid() const { return grid_; }

 private:
  Grid grid_;
  void* r2c_;
  void* c2r_;
  // fftw_alloc'd so the SIMD plans apply
  std::unique_ptr<void, void (*)(void*)> real_;
  std::unique_ptr<void, void (*)(void*)> spec_;
};

/// Wavevector data for every mode of the half layout of one grid.
struct ModeTable {
  Grid grid;
  std::vector<int> kx, ky, kz;
  std::vector<double> ksq;
  /// 2 for modes standing in for a conjugate pair, 1 for self-conjugate columns.
  std::vector<double> weight;
  /// (-1)^(kx+ky+kz): the shift from storage origin to the torus origin at -1/2.
  std::vector<double> sign;
  /// Largest |k_a| over the axes of each mode.
  std::vector<int> kmax;
  std::size_t size() const { return ksq.size(); }
};

/// Process-wide cached table; thread-safe.
const ModeTable& mode_table(const Grid& grid);

/// Raw half spectrum to true full-layout coefficients.
SpectralCoeffs half_to_full(const Grid& grid, const std::vector<cplx>& half);
/// True full-layout coefficients to raw half spectrum.
std::vector<cplx> full_to_half(const SpectralCoeffs& c);

}  // namespace ksmix::detail
