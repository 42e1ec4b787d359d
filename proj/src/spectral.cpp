#include "ksmix/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fft.hpp"

namespace ksmix {

using detail::cplx;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

SpectralCoeffs to_spectral(const ScalarField& f) {
  const Grid& g = f.grid();
  detail::Fft fft(g);
  std::vector<cplx> half(g.half_size());
  fft.forward(f.values().data(), half.data());
  return detail::half_to_full(g, half);
}

ScalarField to_physical(const SpectralCoeffs& c) {
  const Grid& g = c.grid;
  if (c.coeffs.size() != g.size()) throw InvalidArgument("coefficient array does not match grid");
  double scale = 0.0;
  for (const cplx& v : c.coeffs) scale = std::max(scale, std::abs(v));
  const double tol = 1e-10 * scale + std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
    Wavevector k = c.wavevector(i);
    const Wavevector mk{-k[0], -k[1], -k[2]};
    if (std::abs(c.coeffs[i] - std::conj(c.at(mk))) > tol) {
      throw InvalidArgument("coefficients are not conjugate symmetric at k = (" +
                            std::to_string(k[0]) + "," + std::to_string(k[1]) + "," +
                            std::to_string(k[2]) + ")");
    }
  }
  detail::Fft fft(g);
  std::vector<cplx> half = detail::full_to_half(c);
  std::vector<double> v(g.size());
  fft.backward(half.data(), v.data());
  const double inv_n = 1.0 / static_cast<double>(g.size());
  for (double& x : v) x *= inv_n;
  return ScalarField(g, std::move(v));
}

namespace {

double ksq_of(const Wavevector& k, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += static_cast<double>(k[a]) * k[a];
  return s;
}

}  // namespace

SpectralCoeffs invert_laplacian(const SpectralCoeffs& c) {
  SpectralCoeffs out = c;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const double ksq = ksq_of(out.wavevector(i), c.grid.dim);
    out.coeffs[i] = ksq == 0.0 ? cplx(0.0) : out.coeffs[i] / (kTwoPi * kTwoPi * ksq);
  }
  return out;
}

SpectralCoeffs spectral_laplacian(const SpectralCoeffs& c) {
  SpectralCoeffs out = c;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    out.coeffs[i] *= -kTwoPi * kTwoPi * ksq_of(out.wavevector(i), c.grid.dim);
  }
  return out;
}

std::vector<SpectralCoeffs> spectral_gradient(const SpectralCoeffs& c) {
  const int nyq = c.grid.n / 2;
  std::vector<SpectralCoeffs> out(static_cast<std::size_t>(c.grid.dim), c);
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
    const Wavevector k = c.wavevector(i);
    for (int a = 0; a < c.grid.dim; ++a) {
      out[a].coeffs[i] = k[a] == nyq ? cplx(0.0) : c.coeffs[i] * cplx(0.0, kTwoPi * k[a]);
    }
  }
  return out;
}

SpectralCoeffs spectral_divergence(const std::vector<SpectralCoeffs>& v) {
  if (v.empty()) throw InvalidArgument("divergence of an empty vector field");
  const Grid& g = v[0].grid;
  if (static_cast<int>(v.size()) != g.dim) {
    throw InvalidArgument("divergence needs one component per dimension");
  }
  for (const auto& comp : v) require_same_grid(g, comp.grid, "spectral_divergence");
  const int nyq = g.n / 2;
  SpectralCoeffs out = SpectralCoeffs::zeros(g);
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    const Wavevector k = out.wavevector(i);
    cplx s = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      if (k[a] != nyq) s += v[a].coeffs[i] * cplx(0.0, kTwoPi * k[a]);
    }
    out.coeffs[i] = s;
  }
  return out;
}

double sobolev_norm(const SpectralCoeffs& c, double s, NormConvention conv) {
  if (!(s >= -2.0 && s <= 4.0)) throw InvalidArgument("Sobolev index must lie in [-2, 4]");
  const double base = conv == NormConvention::PHYSICAL ? kTwoPi : 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
    const double ksq = ksq_of(c.wavevector(i), c.grid.dim);
    if (ksq == 0.0) continue;
    sum += std::pow(base * base * ksq, s) * std::norm(c.coeffs[i]);
  }
  return std::sqrt(sum);
}

double sobolev_norm(const ScalarField& f, double s, NormConvention conv) {
  return sobolev_norm(to_spectral(f), s, conv);
}

double lp_norm(const ScalarField& f, double p) {
  if (!(p >= 1.0)) throw InvalidArgument("L^p exponent must be >= 1");
  const auto& v = f.values();
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  if (p == 2.0) {
    for (double x : v) sum += (x / scale) * (x / scale);
  } else {
    for (double x : v) sum += std::pow(std::abs(x) / scale, p);
  }
  return scale * std::pow(sum / static_cast<double>(v.size()), 1.0 / p);
}

SpectralCoeffs project_low_modes(const SpectralCoeffs& c, int N) {
  if (N < 0) throw InvalidArgument("projection radius must be nonnegative");
  SpectralCoeffs out = c;
  const double nsq = static_cast<double>(N) * N;
  for (std::size_t i = 0; i < out.coeffs.size(); ++i) {
    if (ksq_of(out.wavevector(i), c.grid.dim) > nsq) out.coeffs[i] = 0.0;
  }
  return out;
}

double spectral_energy(const SpectralCoeffs& c) {
  double s = 0.0;
  for (const cplx& v : c.coeffs) s += std::norm(v);
  return s;
}

}  // namespace ksmix
