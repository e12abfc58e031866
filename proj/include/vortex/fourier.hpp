#pragma once

#include <complex>
#include <span>
#include <vector>

namespace vortex::fourier {

// Samples f_j = f(2πj/M). Coefficients c_k = (1/M) Σ_j f_j e^{-ikθ_j},
// k = 0..M/2, so that f = Σ_k c_k e^{ikθ} over k ∈ (-M/2, M/2].
std::vector<std::complex<double>> forward(std::span<const double> samples);
std::vector<double> inverse(std::span<const std::complex<double>> coeffs, int M);

// ∂_θ f with the Nyquist mode dropped.
std::vector<double> derivative(std::span<const double> samples);

// Zeroes every mode with |k| > M/3.
std::vector<double> dealias(std::span<const double> samples);

// b_n = (2/M) Σ_j f_j sin(nθ_j) and a_n = (2/M) Σ_j f_j cos(nθ_j), n = 1..count.
std::vector<double> sine_coefficients(std::span<const double> samples, int count);
std::vector<double> cosine_coefficients(std::span<const double> samples, int count);

// Trigonometric interpolant evaluated at an arbitrary angle.
double interpolate(std::span<const std::complex<double>> coeffs, int M, double theta);

// Uniform grid θ_j = 2πj/M.
std::vector<double> grid(int M);

}  // namespace vortex::fourier
