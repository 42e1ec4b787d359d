#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace ksmix {

/// Error raised for invalid arguments to any ksmix operation.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A point (or vector) on the torus. Only the first `dim` components are used.
using Point = std::array<double, 3>;

/// Integer wavevector. Only the first `dim` components are used.
using Wavevector = std::array<int, 3>;

/// Uniform discretization of the unit torus [-1/2, 1/2)^dim.
///
/// Grid node i along any axis sits at x_i = -1/2 + i / n. Fields are stored
/// row-major with the last axis contiguous.
struct Grid {
  int dim = 2;
  int n = 0;
  double spacing = 0.0;

  std::size_t size() const;
  /// Number of stored modes in the real-to-complex half layout.
  std::size_t half_size() const;
  double coordinate(int i) const { return -0.5 + i * spacing; }

  bool operator==(const Grid& other) const { return dim == other.dim && n == other.n; }
  bool operator!=(const Grid& other) const { return !(*this == other); }
};

/// Validated grid constructor: dim in {2,3}, n a power of two in [16, 2048].
Grid make_grid(int dim, int n);

/// Maps FFT storage index j in [0, n) to its wavenumber in (-n/2, n/2].
inline int wavenumber(int j, int n) { return j <= n / 2 ? j : j - n; }

/// Maps a wavenumber (any integer) to its FFT storage index in [0, n).
inline int storage_index(int k, int n) {
  int j = k % n;
  return j < 0 ? j + n : j;
}

/// Wraps the first `dim` components of p into [-1/2, 1/2).
Point wrap_to_torus(Point p, int dim);

/// Throws InvalidArgument unless both grids are identical.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace ksmix
