#include "ksmix/grid.hpp"

#include <cmath>

namespace ksmix {

std::size_t Grid::size() const {
  std::size_t s = 1;
  for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

std::size_t Grid::half_size() const {
  std::size_t s = static_cast<std::size_t>(n / 2 + 1);
  for (int a = 0; a + 1 < dim; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

Grid make_grid(int dim, int n) {
  if (dim != 2 && dim != 3) {
    throw InvalidArgument("unsupported dimension " + std::to_string(dim) + " (only 2 and 3)");
  }
  if (n <= 0 || (n & (n - 1)) != 0) {
    throw InvalidArgument("n must be a power of two (got " + std::to_string(n) + ")");
  }
  if (n < 16 || n > 2048) {
    throw InvalidArgument("n must lie in [16, 2048] (got " + std::to_string(n) + ")");
  }
  return Grid{dim, n, 1.0 / n};
}

Point wrap_to_torus(Point p, int dim) {
  for (int a = 0; a < dim; ++a) {
    double v = p[a] + 0.5;
    v -= std::floor(v);
    // floor can round v up to exactly 1.0 for tiny negative inputs
    if (v >= 1.0) v = 0.0;
    p[a] = v - 0.5;
  }
  return p;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) {
    throw InvalidArgument(std::string(what) + ": fields live on different grids (" +
                          std::to_string(a.dim) + "D n=" + std::to_string(a.n) + " vs " +
                          std::to_string(b.dim) + "D n=" + std::to_string(b.n) + ")");
  }
}

}  // namespace ksmix
