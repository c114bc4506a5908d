#pragma once

#include <complex>
#include <span>

namespace muskat::fft {

// Real-to-half-complex transform of length n. Output holds n/2 + 1
// coefficients normalized by 1/n, so that
//   values[j] = sum_k c_k exp(2 pi i k j / n)   (with the conjugate half implied).
void forward(std::span<const double> values, std::span<std::complex<double>> coeffs);

// Inverse of forward(). `coeffs` is not modified.
void inverse(std::span<const std::complex<double>> coeffs, std::span<double> values);

}  // namespace muskat::fft
