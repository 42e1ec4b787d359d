#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "ksmix/grid.hpp"

namespace ksmix {

/// Real scalar sampled on every node of a grid.
class ScalarField {
 public:
  ScalarField() = default;
  /// Throws InvalidArgument on size mismatch or any non-finite entry.
  ScalarField(Grid grid, std::vector<double> values);

  static ScalarField zeros(const Grid& grid);
  static ScalarField constant(const Grid& grid, double value);
  /// Samples fn at every grid node.
  static ScalarField sample(const Grid& grid, const std::function<double(const Point&)>& fn);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double at(int i, int j, int k = 0) const { return values_[index(i, j, k)]; }
  std::size_t index(int i, int j, int k = 0) const;
  /// Coordinates of the node with flat index idx.
  Point node(std::size_t idx) const;

  double mean() const;
  double min() const;
  double max() const;

  ScalarField operator+(const ScalarField& other) const;
  ScalarField operator-(const ScalarField& other) const;
  ScalarField operator*(double s) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Discrete Fourier coefficients of a real field on the torus.
///
/// The coefficient for wavevector k is stored at storage_index(k_a, n) along
/// each axis, so k ranges over (-n/2, n/2]^dim. The normalization is
/// f(x) = sum_k c(k) exp(2 pi i k.x), hence c(0) is the mean.
struct SpectralCoeffs {
  Grid grid;
  std::vector<std::complex<double>> coeffs;

  static SpectralCoeffs zeros(const Grid& grid);

  std::size_t index_of(const Wavevector& k) const;
  std::complex<double>& at(const Wavevector& k) { return coeffs[index_of(k)]; }
  const std::complex<double>& at(const Wavevector& k) const { return coeffs[index_of(k)]; }
  /// Wavevector stored at flat index idx.
  Wavevector wavevector(std::size_t idx) const;
};

}  // namespace ksmix
