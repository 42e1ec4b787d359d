#include "ksmix/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "ksmix/spectral.hpp"

namespace ksmix {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double quadrature_norm(const std::vector<double>& v, double p) {
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (std::isinf(p) || scale == 0.0) return scale;
  double s = 0.0;
  for (double x : v) s += std::pow(std::abs(x) / scale, p);
  return scale * std::pow(s / static_cast<double>(v.size()), 1.0 / p);
}

// Homogeneous norm with PAPER weights |k|^(2s), summed over k != 0.
double paper_norm(const SpectralCoeffs& c, double s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < c.coeffs.size(); ++i) {
    const Wavevector k = c.wavevector(i);
    double ksq = 0.0;
    for (int a = 0; a < c.grid.dim; ++a) ksq += static_cast<double>(k[a]) * k[a];
    if (ksq == 0.0) continue;
    sum += std::pow(ksq, s) * std::norm(c.coeffs[i]);
  }
  return std::sqrt(sum);
}

void require_mean_zero(const ScalarField& f, const char* what) {
  const double linf = lp_norm(f, std::numeric_limits<double>::infinity());
  if (std::abs(f.mean()) > 1e-10 * linf) {
    throw InvalidArgument(std::string(what) + " needs a mean-zero field");
  }
}

double safe_ratio(double lhs, double rhs) { return rhs > 0.0 ? lhs / rhs : 0.0; }

}  // namespace

InequalitySpec gagliardo_nirenberg(int m, double p, int n_ord) {
  InequalitySpec s;
  s.kind = InequalityKind::GN14;
  s.m = m;
  s.p = p;
  s.n_ord = n_ord;
  return s;
}

InequalitySpec nash(double sv) {
  InequalitySpec s;
  s.kind = InequalityKind::NASH16;
  s.s = sv;
  return s;
}

InequalitySpec gn_vanishing(double q, double r) {
  InequalitySpec s;
  s.kind = InequalityKind::GN66;
  s.q = q;
  s.r = r;
  return s;
}

InequalitySpec sobolev_interpolation(double sv) {
  InequalitySpec s;
  s.kind = InequalityKind::SOBEASY;
  s.s = sv;
  return s;
}

std::string describe(const InequalitySpec& spec) {
  std::ostringstream os;
  switch (spec.kind) {
    case InequalityKind::GN14:
      os << "gagliardo_nirenberg(m=" << spec.m << ",p=" << spec.p << ",n=" << spec.n_ord << ")";
      break;
    case InequalityKind::NASH16:
      os << "nash(s=" << spec.s << ")";
      break;
    case InequalityKind::GN66:
      os << "gn_vanishing(q=" << spec.q << ",r=" << spec.r << ")";
      break;
    case InequalityKind::SOBEASY:
      os << "sobolev_interpolation(s=" << spec.s << ")";
      break;
  }
  return os.str();
}

double interpolation_exponent(const InequalitySpec& spec, int dim) {
  const double d = dim;
  switch (spec.kind) {
    case InequalityKind::GN14: {
      const double inv_p = std::isinf(spec.p) ? 0.0 : 1.0 / spec.p;
      return (spec.m - d * inv_p + d / 2.0) / spec.n_ord;
    }
    case InequalityKind::NASH16:
      return (2.0 * spec.s + d) / (2.0 * spec.s + 2.0 + d);
    case InequalityKind::GN66:
      return (1.0 / spec.r - 1.0 / spec.q) / (1.0 / d - 0.5 + 1.0 / spec.r);
    case InequalityKind::SOBEASY:
      return spec.s / (spec.s + 1.0);
  }
  return 0.0;
}

void check_admissible(const InequalitySpec& spec, int dim) {
  if (dim != 2 && dim != 3) throw InvalidArgument("unsupported dimension " + std::to_string(dim));
  switch (spec.kind) {
    case InequalityKind::GN14: {
      if (!(spec.p >= 2.0)) throw InvalidArgument("gagliardo_nirenberg: p must satisfy 2 <= p <= infinity");
      if (spec.n_ord < 1) throw InvalidArgument("gagliardo_nirenberg: n must be >= 1");
      if (spec.m < 0 || spec.m > spec.n_ord) throw InvalidArgument("gagliardo_nirenberg: m must satisfy 0 <= m <= n");
      const double a = interpolation_exponent(spec, dim);
      if (a < 0.0 || a > 1.0) throw InvalidArgument("gagliardo_nirenberg: exponent a must lie in [0, 1]");
      if (a == 1.0 && std::isinf(spec.p)) {
        throw InvalidArgument("gagliardo_nirenberg: excluded case a = 1 with p = infinity");
      }
      break;
    }
    case InequalityKind::NASH16:
      if (!(spec.s >= 0.0)) throw InvalidArgument("nash: s must be >= 0");
      break;
    case InequalityKind::GN66:
      if (!(spec.r > 0.0)) throw InvalidArgument("gn_vanishing: r must be > 0");
      if (!(spec.q > spec.r) || std::isinf(spec.q)) {
        throw InvalidArgument("gn_vanishing: q must satisfy r < q < infinity");
      }
      if (!(1.0 / dim - 0.5 + 1.0 / spec.r > 0.0)) {
        throw InvalidArgument("gn_vanishing: need 1/d - 1/2 + 1/r > 0");
      }
      break;
    case InequalityKind::SOBEASY:
      if (!(spec.s >= 0.0)) throw InvalidArgument("sobolev_interpolation: s must be >= 0");
      break;
  }
}

double inequality_ratio(const ScalarField& f, const InequalitySpec& spec) {
  const Grid& g = f.grid();
  check_admissible(spec, g.dim);
  const double a = interpolation_exponent(spec, g.dim);
  switch (spec.kind) {
    case InequalityKind::GN14: {
      require_mean_zero(f, "gagliardo_nirenberg");
      const SpectralCoeffs c = to_spectral(f);
      double lhs = 0.0;
      for (int dir = 0; dir < g.dim; ++dir) {
        SpectralCoeffs dm = c;
        for (std::size_t i = 0; i < dm.coeffs.size(); ++i) {
          const int k = dm.wavevector(i)[dir];
          if (spec.m % 2 == 1 && k == g.n / 2) {
            dm.coeffs[i] = 0.0;
            continue;
          }
          dm.coeffs[i] *= std::pow(std::complex<double>(0.0, k), spec.m);
        }
        lhs = std::max(lhs, quadrature_norm(to_physical(dm).values(), spec.p));
      }
      const double l2 = paper_norm(c, 0.0);
      const double hn = paper_norm(c, spec.n_ord);
      return safe_ratio(lhs, std::pow(l2, 1.0 - a) * std::pow(hn, a));
    }
    case InequalityKind::NASH16: {
      require_mean_zero(f, "nash");
      const SpectralCoeffs c = to_spectral(f);
      const double lhs = paper_norm(c, spec.s);
      const double top = paper_norm(c, spec.s + 1.0);
      const double l1 = quadrature_norm(f.values(), 1.0);
      return safe_ratio(lhs, std::pow(top, a) * std::pow(l1, 1.0 - a));
    }
    case InequalityKind::GN66: {
      if (!(f.min() < 0.0 && f.max() > 0.0)) {
        if (f.min() == 0.0 && f.max() == 0.0) return 0.0;
        throw InvalidArgument("gn_vanishing needs a field that changes sign");
      }
      const SpectralCoeffs c = to_spectral(f);
      const double grad = kTwoPi * paper_norm(c, 1.0);
      const double lhs = quadrature_norm(f.values(), spec.q);
      const double lr = quadrature_norm(f.values(), spec.r);
      return safe_ratio(lhs, std::pow(grad, a) * std::pow(lr, 1.0 - a));
    }
    case InequalityKind::SOBEASY: {
      const SpectralCoeffs c = to_spectral(f);
      const double lhs = paper_norm(c, spec.s);
      const double l2 = paper_norm(c, 0.0);
      const double top = paper_norm(c, spec.s + 1.0);
      return safe_ratio(lhs, std::pow(l2, 1.0 - a) * std::pow(top, a));
    }
  }
  return 0.0;
}

}  // namespace ksmix
