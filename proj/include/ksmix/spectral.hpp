#pragma once

#include <vector>

#include "ksmix/field.hpp"

namespace ksmix {

/// PAPER weights mode k by |k|^(2s); PHYSICAL by (2 pi |k|)^(2s).
enum class NormConvention { PAPER, PHYSICAL };

SpectralCoeffs to_spectral(const ScalarField& f);

/// Throws InvalidArgument if the coefficients are not conjugate symmetric.
ScalarField to_physical(const SpectralCoeffs& c);

/// Coefficients divided by 4 pi^2 |k|^2, mean mode set to zero.
SpectralCoeffs invert_laplacian(const SpectralCoeffs& c);

/// Coefficients multiplied by -4 pi^2 |k|^2.
SpectralCoeffs spectral_laplacian(const SpectralCoeffs& c);

/// Component a multiplied by 2 pi i k_a. Modes with k_a = n/2 are zeroed since
/// their derivative has no real-valued representative on the grid.
std::vector<SpectralCoeffs> spectral_gradient(const SpectralCoeffs& c);

/// Sum over a of 2 pi i k_a v_a, with the same Nyquist handling as the gradient.
SpectralCoeffs spectral_divergence(const std::vector<SpectralCoeffs>& v);

/// Homogeneous Sobolev norm summed over k != 0. Requires s in [-2, 4].
double sobolev_norm(const SpectralCoeffs& c, double s, NormConvention conv);
double sobolev_norm(const ScalarField& f, double s, NormConvention conv);

/// Uniform-grid quadrature L^p norm; p = infinity gives max |f|. Requires p >= 1.
double lp_norm(const ScalarField& f, double p);

/// Keeps modes with Euclidean |k| <= N.
SpectralCoeffs project_low_modes(const SpectralCoeffs& c, int N);

/// Sum over all modes of |c(k)|^2.
double spectral_energy(const SpectralCoeffs& c);

}  // namespace ksmix
