#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "vortex/errors.hpp"
#include "vortex/greens.hpp"
#include "vortex/specfun.hpp"

using namespace vortex::greens;
using vortex::specfun::kEulerGamma;
constexpr double kPi = std::numbers::pi;

namespace {

double omega_infinity(double alpha) {
    return 0.5 - oracle::i(1, 1.0 / alpha) * oracle::k(1, 1.0 / alpha);
}

// Boundary of Φ(w) = w + a w^{-n} sampled on the unit circle.
BoundaryCurve conformal_curve(double a, int n, int M) {
    BoundaryCurve c;
    for (int k = 0; k < M; ++k) {
        const double t = 2 * kPi * k / M;
        const Complex w = std::polar(1.0, t);
        c.points.push_back(w + a * std::pow(w, -n));
        c.tangents.push_back(Complex(0, 1) * w * (1.0 - n * a * std::pow(w, -n - 1)));
    }
    return c;
}

}  // namespace

TEST_CASE("green kernel values and limits") {
    const double expected = (std::log(2.0) + oracle::k(0, 2.0)) / (2 * kPi);
    CHECK(std::fabs(green_kernel(1.0, 2.0) - expected) < 1e-15);
    for (double alpha : {0.3, 1.0, 3.0}) {
        const double limit = (std::log(2 * alpha) - kEulerGamma) / (2 * kPi);
        CHECK(std::fabs(green_kernel(alpha, 1e-8) - limit) < 1e-6);
        CHECK(std::fabs(green_kernel(alpha, 60 * alpha) - std::log(60 * alpha) / (2 * kPi)) < 1e-12);
    }
    CHECK_THROWS_AS(green_kernel(1.0, 0.0), vortex::DomainError);
    CHECK_THROWS_AS(green_kernel(1.0, -1.0), vortex::DomainError);
    CHECK_THROWS_AS(green_kernel(0.0, 1.0), vortex::PreconditionError);
}

TEST_CASE("green kernel increases with distance") {
    for (double alpha : {0.3, 1.0, 3.0}) {
        double prev = green_kernel(alpha, 1e-3);
        for (int i = 1; i < 400; ++i) {
            const double g = green_kernel(alpha, 1e-3 + 0.05 * i);
            CHECK(g > prev);
            prev = g;
        }
    }
}

TEST_CASE("combined kernel diagonal and continuity") {
    const double ref = std::log(2.0) - kEulerGamma;
    CHECK(std::fabs(combined_boundary_kernel(1.0, 0.0) - ref) < 1e-15);
    const auto mp_rho = oracle::mp("1e-10");
    const double at_tiny = static_cast<double>(log(mp_rho) + oracle::bessel_k_series(0, mp_rho));
    CHECK(std::fabs(at_tiny - ref) < 1e-16);
    for (double alpha : {0.3, 1.0, 3.0}) {
        CHECK(std::fabs(combined_boundary_kernel(alpha, 1e-9) - combined_boundary_kernel(alpha, 0.0)) < 1e-8);
        CHECK(diagonal_limit(alpha) == combined_boundary_kernel(alpha, 0.0));
    }
}

TEST_CASE("combined kernel departs from the diagonal as rho^2 log rho") {
    for (double alpha : {0.3, 1.0, 3.0}) {
        const double k0 = combined_boundary_kernel(alpha, 0.0);
        for (int k = 6; k <= 18; ++k) {
            const double rho = std::ldexp(1.0, -k) * std::min(1.0, alpha);
            const double ratio = (combined_boundary_kernel(alpha, rho) - k0) / (rho * rho * std::log(rho));
            // Leading order: (1/4α²)(−1 + (log 2α + 1 − γ)/log ρ), corrections O(ρ²).
            const double predicted =
                (-1.0 + (std::log(2 * alpha) + 1.0 - kEulerGamma) / std::log(rho)) / (4 * alpha * alpha);
            const double roundoff = 4e-16 * std::max(1.0, std::fabs(k0)) / (rho * rho * std::fabs(std::log(rho)));
            CHECK_MESSAGE(std::fabs(ratio - predicted) < 4 * rho * rho / (alpha * alpha) + roundoff,
                          "alpha=" << alpha << " k=" << k);
        }
    }
}

TEST_CASE("combined kernel matches the high-precision oracle") {
    for (double alpha : {0.05, 0.3, 1.0, 3.0}) {
        for (int i = 0; i < 60; ++i) {
            const double rho = 1e-6 * std::pow(5e6, i / 59.0);
            const oracle::mp r(rho);
            const oracle::mp z = r / alpha;
            const oracle::mp kz = z <= 12 ? oracle::bessel_k_series(0, z, 400) : boost::math::cyl_bessel_k(0, z);
            const double ref = static_cast<double>(log(r) + kz);
            CHECK_MESSAGE(std::fabs(combined_boundary_kernel(alpha, rho) - ref) < 2e-15 * std::max(1.0, std::fabs(ref)),
                          "alpha=" << alpha << " rho=" << rho);
        }
    }
}

TEST_CASE("velocity of the unit disc") {
    for (double alpha : {0.3, 1.0, 3.0}) {
        const auto disc = circle(1.0, 512);
        CHECK(std::abs(velocity_at(alpha, disc, 0.0)) < 1e-15);
        for (int k : {0, 17, 200}) {
            const Complex z = disc.points[k];
            const Complex v = velocity_at(alpha, disc, z);
            CHECK(std::abs(v - Complex(0, omega_infinity(alpha)) * z) < 1e-6);
        }
        // Between nodes the quadrature is still accurate for this smooth kernel.
        const Complex between = std::polar(1.0, kPi / 512);
        CHECK(std::abs(velocity_at(alpha, disc, between) - Complex(0, omega_infinity(alpha)) * between) < 1e-6);
    }
}

TEST_CASE("velocity outside the disc matches the area-integral Biot-Savart oracle") {
    using boost::math::quadrature::gauss;
    const double alpha = 1.0;
    const Complex z = 2.0;
    // v = ∫_D i ∇_z G(|z − ξ|) dA(ξ), G'(ρ) = (1/2π)(1/ρ − K_1(ρ/α)/α).
    Complex area = 0.0;
    const int n_theta = 256;
    auto radial = [&](double s) {
        Complex acc = 0.0;
        for (int k = 0; k < n_theta; ++k) {
            const Complex xi = std::polar(s, 2 * kPi * k / n_theta);
            const Complex d = z - xi;
            const double rho = std::abs(d);
            const double dg = (1.0 / rho - oracle::k(1, rho / alpha) / alpha) / (2 * kPi);
            acc += Complex(0, 1) * dg * d / rho;
        }
        return acc * (2 * kPi / n_theta) * s;
    };
    const double re = gauss<double, 30>::integrate([&](double s) { return radial(s).real(); }, 0.0, 1.0);
    const double im = gauss<double, 30>::integrate([&](double s) { return radial(s).imag(); }, 0.0, 1.0);
    area = Complex(re, im);

    const Complex v = velocity_at(alpha, circle(1.0, 256), z);
    CHECK(std::abs(v - area) < 1e-4);
    // Closed form: v = i z Ψ'(2)/2 with Ψ'(ℓ) = 1/(2ℓ) − I_1(1/α) K_1(ℓ/α) outside the disc.
    const Complex exact = Complex(0, 1) * (0.25 - oracle::i(1, 1.0) * oracle::k(1, 2.0));
    CHECK(std::abs(v - exact) < 1e-12);
}

TEST_CASE("outside a radial patch the velocity is azimuthal") {
    const auto disc = circle(0.8, 256);
    for (double alpha : {0.3, 1.0}) {
        for (int k = 0; k < 16; ++k) {
            const Complex z = std::polar(1.5, 0.37 + k * 0.4);
            const Complex v = velocity_at(alpha, disc, z);
            CHECK(std::fabs((v * std::conj(z)).real() / std::abs(z)) < 1e-10);
        }
    }
}

TEST_CASE("Euler and SW pieces superpose") {
    const auto curve = conformal_curve(0.1, 2, 128);
    for (const Complex z : {Complex(0.2, 0.1), Complex(1.6, -0.4), Complex(0.0, 0.0)}) {
        const Complex total = velocity_at(0.7, curve, z);
        const Complex parts = velocity_euler(curve, z) + velocity_sw(0.7, curve, z);
        CHECK(std::abs(total - parts) < 1e-14);
    }
    CHECK_THROWS_AS(velocity_euler(curve, curve.points[3]), vortex::PreconditionError);
}

TEST_CASE("poisson integral") {
    CHECK(poisson_integral(0.5) == 0.0);
    CHECK(std::fabs(poisson_integral(2.0) - 4 * kPi * std::log(2.0)) < 1e-15);
    CHECK(poisson_integral(-3.0) == doctest::Approx(4 * kPi * std::log(3.0)));
    CHECK(poisson_integral(1.0) == 0.0);
    CHECK(std::fabs(poisson_integral_quadrature(1.0, 4096)) < 1e-3);
    CHECK(std::fabs(poisson_integral_quadrature(0.5, 256)) < 1e-12);
    CHECK(std::fabs(poisson_integral_quadrature(2.0, 256) - 4 * kPi * std::log(2.0)) < 1e-12);
}

TEST_CASE("log and SW convolution coefficients") {
    for (int n = 1; n <= 16; ++n) {
        CHECK(std::fabs(log_kernel_coefficient(n, 8192) + 1.0 / n) < 1e-6);
        for (double alpha : {0.3, 1.0, 3.0}) {
            CHECK(std::fabs(sw_kernel_coefficient(n, alpha, 8192) - oracle::product_ik(n, 1.0 / alpha)) < 1e-6);
        }
    }
}

TEST_CASE("invalid grids") {
    CHECK_THROWS_AS(velocity_at(1.0, circle(1.0, 6), 0.0), vortex::InvalidGridError);
    auto odd = circle(1.0, 9);
    CHECK_THROWS_AS(velocity_at(1.0, odd, 0.0), vortex::InvalidGridError);
    // An arc of a spiral does not close.
    BoundaryCurve spiral;
    for (int k = 0; k < 64; ++k) {
        const double t = 2 * kPi * k / 64;
        const double r = 1.0 + 0.1 * t;
        spiral.points.push_back(std::polar(r, t));
        spiral.tangents.push_back(Complex(0.1, r) * std::polar(1.0, t));
    }
    CHECK_THROWS_AS(velocity_at(1.0, spiral, 0.0), vortex::InvalidGridError);
}

TEST_CASE("parallel and serial kernels agree") {
    const auto curve = conformal_curve(0.15, 3, 200);
    const auto K = kernel_matrix(0.8, curve.points);
    const auto Ks = kernel_matrix_serial(0.8, curve.points);
    CHECK((K - Ks).cwiseAbs().maxCoeff() == 0.0);
    CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);

    std::vector<Complex> targets;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 64; ++i) targets.emplace_back(u(rng), u(rng));
    const auto a = velocity_at_targets(0.8, curve, targets);
    const auto b = velocity_at_targets_serial(0.8, curve, targets);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("grid doubling reports algebraic convergence on a deformed boundary") {
    const auto study = grid_doubling(
        [](int M) {
            const auto c = conformal_curve(0.2, 2, M);
            return velocity_at(1.0, c, c.points[0]).imag();
        },
        32, 6);
    REQUIRE(study.observed_orders.size() == 4);
    for (double p : study.observed_orders) CHECK(p > 2.0);
    CHECK(study.differences.back() < 1e-8);
}

TEST_CASE("weak Laplacian identity (1 - α²Δ)Δ(G*ω) = ω") {
    using boost::math::quadrature::tanh_sinh;
    tanh_sinh<double> ts(12);
    auto omega = [](double s) { return (1 - s * s) * (1 - s * s); };
    for (double alpha : {0.5, 1.0}) {
        // Ψ(ℓ) = ∫_0^1 ω(s) s ∫_0^{2π} G(|ℓ − s e^{iφ}|) dφ ds for the radial profile ω.
        auto psi = [&](double l) {
            auto ring = [&](double s) {
                auto integrand = [&](double phi) {
                    const double rho = std::sqrt(std::max(0.0, l * l + s * s - 2 * l * s * std::cos(phi)));
                    return rho > 0 ? green_kernel(alpha, rho) : 0.0;
                };
                return 2.0 * ts.integrate(integrand, 0.0, kPi, 1e-14) * s * omega(s);
            };
            return ts.integrate(ring, 0.0, l, 1e-13) + ts.integrate(ring, l, 1.0, 1e-13);
        };
        const double h = 0.02;
        for (double l0 : {0.3, 0.5}) {
            std::vector<double> f(9);
            for (int k = -4; k <= 4; ++k) f[k + 4] = psi(l0 + k * h);
            // Radial Laplacian with 5-point stencils, then once more.
            auto lap = [&](int c) {
                const double l = l0 + (c - 4) * h;
                const double d1 = (f[c - 2] - 8 * f[c - 1] + 8 * f[c + 1] - f[c + 2]) / (12 * h);
                const double d2 = (-f[c - 2] + 16 * f[c - 1] - 30 * f[c] + 16 * f[c + 1] - f[c + 2]) / (12 * h * h);
                return d2 + d1 / l;
            };
            std::vector<double> g(5);
            for (int c = 2; c <= 6; ++c) g[c - 2] = lap(c);
            const double d1 = (g[0] - 8 * g[1] + 8 * g[3] - g[4]) / (12 * h);
            const double d2 = (-g[0] + 16 * g[1] - 30 * g[2] + 16 * g[3] - g[4]) / (12 * h * h);
            const double recovered = g[2] - alpha * alpha * (d2 + d1 / l0);
            CHECK_MESSAGE(std::fabs(recovered - omega(l0)) < 1e-3, "alpha=" << alpha << " l=" << l0 << " got " << recovered);
        }
    }
}

TEST_CASE("diagonal correction raises the trapezoid order on the circle") {
    // (1/2π)∫ k(2|sin(θ/2)|) cos(nθ) dθ = −1/(2n) + I_n(1/α)K_n(1/α).
    for (double alpha : {0.5, 1.0, 3.0}) {
        const CombinedKernel kernel(alpha);
        for (int n : {1, 4, 12}) {
            const double exact = -0.5 / n + oracle::product_ik(n, 1.0 / alpha);
            double err_plain[2], err_corr[2];
            for (int level = 0; level < 2; ++level) {
                const int M = 128 << level;
                const double h = 2 * kPi / M;
                double acc = 0.0;
                for (int j = 1; j < M; ++j) acc += kernel(2 * std::fabs(std::sin(0.5 * h * j))) * std::cos(n * h * j);
                err_plain[level] = std::fabs((acc + kernel.diagonal()) / M - exact);
                err_corr[level] =
                    std::fabs((acc + kernel.diagonal() + diagonal_correction(alpha, h)) / M - exact);
            }
            CHECK(err_corr[0] < 0.05 * err_plain[0]);
            CHECK(err_plain[0] / err_plain[1] == doctest::Approx(8.0).epsilon(0.1));
            CHECK(err_corr[0] / err_corr[1] > 24.0);
        }
    }
}
