#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "ksmix/initdata.hpp"
#include "ksmix/spectral.hpp"

using namespace ksmix;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double quadrature_mass(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return s / static_cast<double>(f.size());
}

std::size_t mirror(const Grid& g, std::size_t idx) {
  const int n = g.n;
  std::size_t out = 0;
  std::size_t stride = 1;
  for (int a = g.dim - 1; a >= 0; --a) {
    const int i = static_cast<int>(idx % n);
    idx /= n;
    out += static_cast<std::size_t>((n - i) % n) * stride;
    stride *= n;
  }
  return out;
}

}  // namespace

TEST_CASE("gaussian bump mass, positivity and symmetry") {
  for (int dim : {2, 3}) {
    const Grid g = make_grid(dim, dim == 2 ? 128 : 32);
    const double a = dim == 2 ? 0.03 : 0.1;
    const ScalarField f = gaussian_bump(g, 60.0, a, {0.0, 0.0, 0.0});
    CHECK(quadrature_mass(f) == doctest::Approx(60.0).epsilon(1e-12));
    CHECK(f.min() > 0.0);
    double asym = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) asym = std::max(asym, std::abs(f[i] - f[mirror(g, i)]));
    CHECK(asym <= 1e-12 * f.max());
  }
  const Grid g = make_grid(2, 64);
  const ScalarField off = gaussian_bump(g, 5.0, 0.1, {0.3, -0.45, 0.0});
  CHECK(quadrature_mass(off) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(off.min() > 0.0);
  CHECK_THROWS_AS(gaussian_bump(g, 5.0, 2.5 / 64, {0.0, 0.0, 0.0}), InvalidArgument);
  CHECK_NOTHROW(gaussian_bump(g, 5.0, 3.0 / 64, {0.0, 0.0, 0.0}));
  CHECK_THROWS_AS(gaussian_bump(g, 0.0, 0.1, {0.0, 0.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(gaussian_bump(g, 1.0, 0.3, {0.0, 0.0, 0.0}), InvalidArgument);
}

TEST_CASE("gaussian bump profile is the periodized Gaussian") {
  const Grid g = make_grid(2, 64);
  const double a = 0.07;
  const Point c{0.1, -0.2, 0.0};
  const ScalarField f = gaussian_bump(g, 3.0, a, c);
  std::vector<double> ref(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point x = f.node(i);
    double s = 0.0;
    for (int p = -2; p <= 2; ++p) {
      for (int q = -2; q <= 2; ++q) {
        const double dx = x[0] - c[0] + p, dy = x[1] - c[1] + q;
        s += std::exp(-(dx * dx + dy * dy) / (2 * a * a));
      }
    }
    ref[i] = s;
  }
  double m = 0.0;
  for (double v : ref) m += v;
  m /= static_cast<double>(ref.size());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(f[i] == doctest::Approx(ref[i] * 3.0 / m).epsilon(1e-12));
}

TEST_CASE("radial cutoff values, range and support") {
  const Grid g = make_grid(2, 256);
  for (double b : {0.25, 0.1, 0.05}) {
    const ScalarField phi = radial_cutoff(g, b);
    CHECK(phi.at(g.n / 2, g.n / 2) == 1.0);
    CHECK(phi.min() >= 0.0);
    CHECK(phi.max() <= 1.0);
    for (std::size_t i = 0; i < phi.size(); ++i) {
      const Point x = phi.node(i);
      const double r = std::hypot(x[0], x[1]);
      if (r <= b) CHECK(phi[i] == 1.0);
      if (r >= 2 * b) CHECK(phi[i] == 0.0);
    }
    CHECK(cutoff_profile(2 * b + g.spacing, b) == 0.0);
  }
  CHECK_THROWS_AS(radial_cutoff(g, 0.3), InvalidArgument);
  CHECK_THROWS_AS(radial_cutoff(g, 3.0 / 256), InvalidArgument);
}

TEST_CASE("radial cutoff gradient is bounded by 4/b") {
  const Grid g = make_grid(2, 256);
  for (double b : {0.25, 0.15, 0.1}) {
    const auto grad = spectral_gradient(to_spectral(radial_cutoff(g, b)));
    const ScalarField gx = to_physical(grad[0]), gy = to_physical(grad[1]);
    double m = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) m = std::max(m, std::hypot(gx[i], gy[i]));
    CHECK(m <= 4.0 / b);
  }
}

TEST_CASE("cutoff profile is monotone and dilation consistent") {
  for (double b : {0.05, 0.2}) {
    double prev = 1.0;
    for (int i = 0; i <= 1000; ++i) {
      const double r = 2.5 * b * i / 1000;
      const double v = cutoff_profile(r, b);
      CHECK(v <= prev);
      prev = v;
      CHECK(cutoff_profile(2 * r, b) == doctest::Approx(cutoff_profile(r, b / 2)).epsilon(1e-14));
    }
  }
}

TEST_CASE("random smooth fields: mean, determinism, resolution consistency") {
  const Grid g = make_grid(2, 128);
  const ScalarField a = random_smooth_field(g, 7, 3.0);
  const ScalarField b = random_smooth_field(g, 7, 3.0);
  CHECK(std::abs(a.mean()) < 1e-14);
  CHECK(a.values() == b.values());
  const ScalarField c = random_smooth_field(g, 8, 3.0);
  CHECK(a.values() != c.values());

  const SpectralCoeffs lo = to_spectral(random_smooth_field(make_grid(2, 64), 7, 3.0));
  const SpectralCoeffs hi = to_spectral(a);
  for (const Wavevector k : {Wavevector{1, 0, 0}, Wavevector{-3, 5, 0}, Wavevector{10, 10, 0}, Wavevector{0, -21, 0}}) {
    CHECK(std::abs(lo.at(k) - hi.at(k)) < 1e-14);
  }
  CHECK_THROWS_AS(random_smooth_field(g, 1, 2.0), InvalidArgument);
  CHECK_THROWS_AS(random_smooth_field(make_grid(3, 16), 1, 2.5), InvalidArgument);
  CHECK_NOTHROW(random_smooth_field(make_grid(3, 16), 1, 2.6));
}

TEST_CASE("random smooth field coefficients are standard complex Gaussians over |k| <= n/3") {
  const Grid g = make_grid(2, 128);
  const double decay = 3.0;
  const SpectralCoeffs c1 = to_spectral(random_smooth_field(g, 11, decay));
  const SpectralCoeffs c2 = to_spectral(random_smooth_field(g, 12, decay));
  double sum_abs2 = 0.0, sum_re2 = 0.0, sum_im2 = 0.0, outside = 0.0;
  std::complex<double> sum_z = 0.0, sum_cross = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < c1.coeffs.size(); ++i) {
    const Wavevector k = c1.wavevector(i);
    const double kabs = std::hypot(k[0], k[1]);
    if (kabs == 0.0) continue;
    if (kabs > g.n / 3.0) {
      outside = std::max(outside, std::abs(c1.coeffs[i]));
      continue;
    }
    if (k[0] < 0 || (k[0] == 0 && k[1] < 0)) continue;
    const std::complex<double> z1 = c1.coeffs[i] * std::pow(kabs, decay);
    const std::complex<double> z2 = c2.coeffs[i] * std::pow(kabs, decay);
    sum_abs2 += std::norm(z1);
    sum_re2 += z1.real() * z1.real();
    sum_im2 += z1.imag() * z1.imag();
    sum_z += z1;
    sum_cross += z1 * std::conj(z2);
    ++count;
  }
  REQUIRE(count > 2000);
  const double N = static_cast<double>(count);
  // 5-sigma bands for the sample moments of N independent draws.
  CHECK(outside < 1e-15);
  CHECK(std::abs(sum_abs2 / N - 1.0) < 5.0 / std::sqrt(N));
  CHECK(std::abs(sum_re2 / N - 0.5) < 5.0 * 0.5 * std::sqrt(2.0 / N));
  CHECK(std::abs(sum_im2 / N - 0.5) < 5.0 * 0.5 * std::sqrt(2.0 / N));
  CHECK(std::abs(sum_z / N) < 5.0 / std::sqrt(N));
  CHECK(std::abs(sum_cross / N) < 5.0 / std::sqrt(N));
}

TEST_CASE("blowup recipe with unit constants") {
  const BlowupRecipe r = blowup_parameters(1, 1, 1, 1);
  CHECK(r.b == doctest::Approx(0.001).epsilon(1e-15));
  CHECK(r.M == doctest::Approx(1000.0).epsilon(1e-15));
  CHECK(r.a == doctest::Approx(1e-5).epsilon(1e-12));
  CHECK(r.tau == doctest::Approx(1e-11).epsilon(1e-12));
  CHECK_THROWS_AS(blowup_parameters(1, 0, 1, 1), InvalidArgument);
}

TEST_CASE("blowup recipe satisfies its defining inequalities") {
  double prev_b = kInf;
  for (double C3 : {1e-3, 0.01, 0.5, 1.0, 4.0, 100.0}) {
    const BlowupRecipe r = blowup_parameters(1.0, 1.0, C3, 1.0);
    CHECK(r.b <= prev_b);
    prev_b = r.b;
  }
  for (double C1 : {0.01, 1.0, 50.0}) {
    for (double C2 : {1e-4, 1.0, 30.0}) {
      for (double C3 : {0.002, 1.0, 9.0}) {
        for (double C4 : {1e-5, 1.0, 7.0}) {
          const BlowupRecipe r = blowup_parameters(C1, C2, C3, C4);
          CHECK(r.b <= 0.25);
          CHECK(r.b <= 0.001 / C3 * (1 + 1e-15));
          CHECK(r.M >= 1000 * C4);
          CHECK(r.M > 1.0);
          CHECK(2 * r.a <= r.b);
          CHECK(r.a <= r.b / (10 * std::sqrt(2 * C1)) * (1 + 1e-15));
          CHECK(r.a <= r.b / (100 * std::sqrt(C2)) * (1 + 1e-15));
          CHECK(r.a > 0.0);
          CHECK(r.tau == 100 * r.a * r.a / r.M);
        }
      }
    }
  }
}
