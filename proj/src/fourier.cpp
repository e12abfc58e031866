#include "vortex/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "vortex/errors.hpp"

namespace vortex::fourier {

namespace {

struct Plans {
    fftw_plan r2c = nullptr;
    fftw_plan c2r = nullptr;
};

// FFTW planning is not thread-safe; execution with new-array interfaces is.
const Plans& plans_for(int M) {
    static std::mutex mutex;
    static std::map<int, Plans> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(M);
    if (it != cache.end()) return it->second;
    std::vector<double> real(M);
    std::vector<fftw_complex> cplx(M / 2 + 1);
    Plans p;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    p.r2c = fftw_plan_dft_r2c_1d(M, real.data(), cplx.data(), flags);
    p.c2r = fftw_plan_dft_c2r_1d(M, cplx.data(), real.data(), flags | FFTW_DESTROY_INPUT);
    return cache.emplace(M, p).first->second;
}

void require_even(std::size_t M) {
    if (M < 2 || M % 2 != 0) throw InvalidGridError("fourier: grid size must be even and >= 2");
}

}  // namespace

std::vector<std::complex<double>> forward(std::span<const double> samples) {
    require_even(samples.size());
    const int M = static_cast<int>(samples.size());
    std::vector<double> in(samples.begin(), samples.end());
    std::vector<std::complex<double>> out(M / 2 + 1);
    fftw_execute_dft_r2c(plans_for(M).r2c, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    const double scale = 1.0 / M;
    for (auto& c : out) c *= scale;
    return out;
}

std::vector<double> inverse(std::span<const std::complex<double>> coeffs, int M) {
    require_even(static_cast<std::size_t>(M));
    if (coeffs.size() != static_cast<std::size_t>(M / 2 + 1)) {
        throw InvalidGridError("fourier: coefficient count must be M/2 + 1");
    }
    std::vector<std::complex<double>> in(coeffs.begin(), coeffs.end());
    std::vector<double> out(M);
    fftw_execute_dft_c2r(plans_for(M).c2r, reinterpret_cast<fftw_complex*>(in.data()), out.data());
    return out;
}

std::vector<double> derivative(std::span<const double> samples) {
    auto c = forward(samples);
    const int M = static_cast<int>(samples.size());
    for (int k = 0; k <= M / 2; ++k) c[k] *= std::complex<double>(0.0, k);
    c[M / 2] = 0.0;
    return inverse(c, M);
}

std::vector<double> dealias(std::span<const double> samples) {
    auto c = forward(samples);
    const int M = static_cast<int>(samples.size());
    for (int k = M / 3 + 1; k <= M / 2; ++k) c[k] = 0.0;
    return inverse(c, M);
}

std::vector<double> sine_coefficients(std::span<const double> samples, int count) {
    const auto c = forward(samples);
    const int M = static_cast<int>(samples.size());
    std::vector<double> out(count, 0.0);
    for (int n = 1; n <= count && n < M / 2; ++n) out[n - 1] = -2.0 * c[n].imag();
    return out;
}

std::vector<double> cosine_coefficients(std::span<const double> samples, int count) {
    const auto c = forward(samples);
    const int M = static_cast<int>(samples.size());
    std::vector<double> out(count, 0.0);
    for (int n = 1; n <= count && n <= M / 2; ++n) out[n - 1] = (n == M / 2 ? 1.0 : 2.0) * c[n].real();
    return out;
}

double interpolate(std::span<const std::complex<double>> coeffs, int M, double theta) {
    double v = coeffs[0].real();
    for (int k = 1; k < M / 2; ++k) {
        v += 2.0 * (coeffs[k] * std::polar(1.0, k * theta)).real();
    }
    v += coeffs[M / 2].real() * std::cos(0.5 * M * theta);
    return v;
}

std::vector<double> grid(int M) {
    std::vector<double> t(M);
    for (int j = 0; j < M; ++j) t[j] = 2.0 * std::numbers::pi * j / M;
    return t;
}

}  // namespace vortex::fourier
