#include "ksmix/initdata.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hash.hpp"
#include "ksmix/spectral.hpp"

namespace ksmix {

ScalarField gaussian_bump(const Grid& grid, double M, double a, const Point& center) {
  if (!(M > 0.0) || !std::isfinite(M)) throw InvalidArgument("bump mass M must be > 0");
  if (!(a > 0.0 && a < 0.25)) throw InvalidArgument("bump width a must lie in (0, 1/4)");
  if (a < 3.0 * grid.spacing) {
    throw InvalidArgument("bump width a = " + std::to_string(a) + " is below 3 grid spacings");
  }
  std::vector<std::vector<double>> axis(static_cast<std::size_t>(grid.dim), std::vector<double>(grid.n));
  const double inv = 1.0 / (2.0 * a * a);
  for (int d = 0; d < grid.dim; ++d) {
    for (int i = 0; i < grid.n; ++i) {
      const double x = grid.coordinate(i) - center[d];
      double s = 0.0;
      for (int img = -3; img <= 3; ++img) s += std::exp(-(x + img) * (x + img) * inv);
      axis[d][i] = s;
    }
  }
  const std::size_t n = static_cast<std::size_t>(grid.n);
  std::vector<double> v(grid.size());
  for (std::size_t idx = 0; idx < v.size(); ++idx) {
    std::size_t r = idx;
    double prod = 1.0;
    for (int d = grid.dim - 1; d >= 0; --d) {
      prod *= axis[d][r % n];
      r /= n;
    }
    v[idx] = prod;
  }
  const double mass = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  const double scale = M / mass;
  for (double& x : v) x *= scale;
  return ScalarField(grid, std::move(v));
}

double cutoff_profile(double r, double b) {
  if (r <= b) return 1.0;
  if (r >= 2.0 * b) return 0.0;
  const double s = (r - b) / b;
  return 1.0 - 1.0 / (1.0 + std::exp(1.0 / s - 1.0 / (1.0 - s)));
}

ScalarField radial_cutoff(const Grid& grid, double b) {
  if (!(b > 0.0 && b <= 0.25)) throw InvalidArgument("cutoff scale b must lie in (0, 1/4]");
  if (b < 4.0 * grid.spacing) {
    throw InvalidArgument("cutoff scale b = " + std::to_string(b) + " is below 4 grid spacings");
  }
  return ScalarField::sample(grid, [&](const Point& x) {
    double r2 = 0.0;
    for (int d = 0; d < grid.dim; ++d) r2 += x[d] * x[d];
    return cutoff_profile(std::sqrt(r2), b);
  });
}

ScalarField random_smooth_field(const Grid& grid, std::uint64_t seed, double decay) {
  if (!(decay > 0.5 * grid.dim + 1.0)) {
    throw InvalidArgument("decay must exceed dim/2 + 1 (got " + std::to_string(decay) + ")");
  }
  SpectralCoeffs c = SpectralCoeffs::zeros(grid);
  const double kcut = grid.n / 3.0;
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
    const Wavevector k = c.wavevector(i);
    double ksq = 0.0;
    for (int d = 0; d < grid.dim; ++d) ksq += static_cast<double>(k[d]) * k[d];
    if (ksq == 0.0 || std::sqrt(ksq) > kcut) continue;
    // canonical member of the pair {k, -k}: first nonzero component positive
    int lead = 0;
    for (int d = 0; d < grid.dim && lead == 0; ++d) lead = k[d];
    if (lead < 0) continue;
    std::uint64_t h = detail::mix64(seed);
    for (int d = 0; d < grid.dim; ++d) h = detail::hash_combine(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(k[d])));
    const double u1 = detail::unit_open(detail::hash_combine(h, 1));
    const double u2 = detail::unit_open(detail::hash_combine(h, 2));
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    const std::complex<double> z(rad * std::cos(ang) / std::sqrt(2.0), rad * std::sin(ang) / std::sqrt(2.0));
    const std::complex<double> v = z / std::pow(ksq, 0.5 * decay);
    c.coeffs[i] = v;
    c.at(Wavevector{-k[0], -k[1], -k[2]}) = std::conj(v);
  }
  return to_physical(c);
}

BlowupRecipe blowup_parameters(double C1, double C2, double C3, double C4) {
  for (double c : {C1, C2, C3, C4}) {
    if (!(c > 0.0) || !std::isfinite(c)) throw InvalidArgument("recipe constants must be positive");
  }
  BlowupRecipe r;
  r.C1 = C1;
  r.C2 = C2;
  r.C3 = C3;
  r.C4 = C4;
  r.b = std::min(0.25, 0.001 / C3);
  r.M = std::max(1000.0 * C4, 1.0 + 1e-6);
  r.a = std::min({r.b / 2.0, r.b / (10.0 * std::sqrt(2.0 * C1)), r.b / (100.0 * std::sqrt(C2))});
  r.tau = 100.0 * r.a * r.a / r.M;
  return r;
}

}  // namespace ksmix
