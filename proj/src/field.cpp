#include "ksmix/field.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ksmix {

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("field has " + std::to_string(values_.size()) + " values, grid needs " +
                          std::to_string(grid_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument("non-finite field value at index " + std::to_string(i));
    }
  }
}

ScalarField ScalarField::zeros(const Grid& grid) { return constant(grid, 0.0); }

ScalarField ScalarField::constant(const Grid& grid, double value) {
  return ScalarField(grid, std::vector<double>(grid.size(), value));
}

ScalarField ScalarField::sample(const Grid& grid, const std::function<double(const Point&)>& fn) {
  std::vector<double> v(grid.size());
  ScalarField probe;
  probe.grid_ = grid;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(probe.node(i));
  return ScalarField(grid, std::move(v));
}

std::size_t ScalarField::index(int i, int j, int k) const {
  const std::size_t n = static_cast<std::size_t>(grid_.n);
  if (grid_.dim == 2) return static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j);
  return (static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n +
         static_cast<std::size_t>(k);
}

Point ScalarField::node(std::size_t idx) const {
  const std::size_t n = static_cast<std::size_t>(grid_.n);
  Point p{0.0, 0.0, 0.0};
  for (int a = grid_.dim - 1; a >= 0; --a) {
    p[a] = grid_.coordinate(static_cast<int>(idx % n));
    idx /= n;
  }
  return p;
}

double ScalarField::mean() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

ScalarField ScalarField::operator+(const ScalarField& other) const {
  require_same_grid(grid_, other.grid_, "field addition");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
  return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::operator-(const ScalarField& other) const {
  require_same_grid(grid_, other.grid_, "field subtraction");
  std::vector<double> v(values_);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= other.values_[i];
  return ScalarField(grid_, std::move(v));
}

ScalarField ScalarField::operator*(double s) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= s;
  return ScalarField(grid_, std::move(v));
}

SpectralCoeffs SpectralCoeffs::zeros(const Grid& grid) {
  return SpectralCoeffs{grid, std::vector<std::complex<double>>(grid.size())};
}

std::size_t SpectralCoeffs::index_of(const Wavevector& k) const {
  const int n = grid.n;
  std::size_t idx = 0;
  for (int a = 0; a < grid.dim; ++a) {
    idx = idx * static_cast<std::size_t>(n) + static_cast<std::size_t>(storage_index(k[a], n));
  }
  return idx;
}

Wavevector SpectralCoeffs::wavevector(std::size_t idx) const {
  const std::size_t n = static_cast<std::size_t>(grid.n);
  Wavevector k{0, 0, 0};
  for (int a = grid.dim - 1; a >= 0; --a) {
    k[a] = wavenumber(static_cast<int>(idx % n), grid.n);
    idx /= n;
  }
  return k;
}

}  // namespace ksmix
