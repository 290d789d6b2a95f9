#pragma once

#include "nlsh/field.hpp"

namespace nlsh {

// In-place d-dimensional FFT. Forward has no normalization; inverse is
// scaled by 1/n^d so that inverse(forward(f)) == f.
void fft_forward(Field& f);
void fft_inverse(Field& f);

// Apply a diagonal Fourier multiplier m(k_1,...,k_d). The callback receives
// the wavenumber vector of each bin.
void apply_fourier_multiplier(Field& f,
                              const std::function<cplx(const std::array<double, 3>&)>& m);

// Spectral partial derivative along one axis.
Field spectral_derivative(const Field& f, int axis);

// All d partial derivatives.
std::vector<Field> gradient(const Field& f);

// Translate f by the vector s (exact for band-limited data, via the Fourier
// shift theorem).
Field fourier_translate(const Field& f, const std::array<double, 3>& s);

// Fraction of L^2 mass carried by the top octave of Fourier bins
// (|freq index| >= n/4 along some axis). Resolution-adequacy monitor.
double spectral_tail_fraction(const Field& f);

}  // namespace nlsh
