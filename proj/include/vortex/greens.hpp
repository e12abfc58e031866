#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "vortex/specfun.hpp"

namespace vortex::greens {

using Complex = std::complex<double>;

struct KernelParams {
    double alpha;

    explicit KernelParams(double a);
};

// k(ρ) = log ρ + K_0(ρ/α), continuous at ρ = 0 with value log(2α) − γ.
class CombinedKernel {
public:
    explicit CombinedKernel(double alpha);

    double alpha() const { return alpha_; }
    double diagonal() const { return log_two_alpha_ - specfun::kEulerGamma; }

    double operator()(double rho) const {
        if (rho == 0.0) return diagonal();
        const double z = rho * inv_alpha_;
        if (z > specfun::kKSeriesMaxArgument) return std::log(rho) + specfun::bessel_k0(z);
        // log ρ (1 − I_0(z)) + log(2α) I_0(z) + Σ ψ(m+1) (z/2)^{2m}/(m!)²: no cancellation near 0.
        const double q = 0.25 * z * z;
        double u = 1.0;
        double tail_i = 0.0;
        double tail_p = -specfun::kEulerGamma;
        for (int m = 1; m < kTerms; ++m) {
            u *= q * kInvSquares[m];
            tail_i += u;
            tail_p += u * kPsi[m];
            if (u < 1e-17) break;
        }
        return -std::log(rho) * tail_i + log_two_alpha_ * (1.0 + tail_i) + tail_p;
    }

private:
    static constexpr int kTerms = 24;
    static constexpr std::array<double, kTerms> kInvSquares = [] {
        std::array<double, kTerms> t{};
        for (int m = 1; m < kTerms; ++m) t[m] = 1.0 / (double(m) * m);
        return t;
    }();
    static constexpr std::array<double, kTerms> kPsi = [] {  // ψ(m+1)
        std::array<double, kTerms> t{};
        double h = 0.0;
        for (int m = 1; m < kTerms; ++m) {
            h += 1.0 / m;
            t[m] = h - specfun::kEulerGamma;
        }
        return t;
    }();

    double alpha_;
    double inv_alpha_;
    double log_two_alpha_;
};

// G(ρ) = (1/2π)(log ρ + K_0(ρ/α)).
double green_kernel(double alpha, double rho);

double combined_boundary_kernel(double alpha, double rho);

double diagonal_limit(double alpha);

// Trapezoid correction for the −(ρ²/4α²) log ρ part of k at a node whose
// neighbours lie arclength `spacing` apart: adding it to the diagonal value
// raises the local quadrature error from O(h³) to O(h⁵).
double diagonal_correction(double alpha, double spacing);

// Closed curve sampled at θ_k = 2πk/M, positively oriented; tangents = dξ/dθ.
struct BoundaryCurve {
    std::vector<Complex> points;
    std::vector<Complex> tangents;

    int size() const { return static_cast<int>(points.size()); }
};

BoundaryCurve circle(double radius, int M);

// Throws InvalidGridError for M < 8, odd M, or a tangent field that does not close.
void validate(const BoundaryCurve& curve);

// v(z) = −(1/2π)∮ k(|z − ξ|) dξ by the trapezoid rule; a node coinciding with z
// takes the diagonal limit.
Complex velocity_at(double alpha, const BoundaryCurve& curve, Complex z);

// The log and K_0 pieces separately; z must not coincide with a node.
Complex velocity_euler(const BoundaryCurve& curve, Complex z);
Complex velocity_sw(double alpha, const BoundaryCurve& curve, Complex z);

std::vector<Complex> velocity_at_targets(double alpha, const BoundaryCurve& curve,
                                         std::span<const Complex> targets);
std::vector<Complex> velocity_at_targets_serial(double alpha, const BoundaryCurve& curve,
                                                std::span<const Complex> targets);

// K_ij = k(|z_i − z_j|) with the diagonal limit on i = j.
Eigen::MatrixXd kernel_matrix(double alpha, std::span<const Complex> points);
Eigen::MatrixXd kernel_matrix_serial(double alpha, std::span<const Complex> points);

// I_P(x) = ∫_{-π}^{π} log(1 + x² − 2x cos η) dη.
double poisson_integral(double x);
// Graded midpoint rule; stays accurate at |x| = 1 where the integrand is log-singular.
double poisson_integral_quadrature(double x, int M);

// Graded midpoint rule (nodes avoid θ = 0) for the Fourier coefficients
// (1/2π)∫ log(sin²(θ/2)) cos(nθ) dθ = −1/n and
// (1/2π)∫ K_0((2/α)|sin(θ/2)|) cos(nθ) dθ = I_n(1/α) K_n(1/α).
double log_kernel_coefficient(int n, int M);
double sw_kernel_coefficient(int n, double alpha, int M);

struct ConvergenceStudy {
    std::vector<int> grid_sizes;
    std::vector<double> values;
    std::vector<double> differences;     // |v_{k+1} − v_k|
    std::vector<double> observed_orders;  // log2 of successive difference ratios
};

// Evaluates quantity(M) for M0, 2M0, ... (levels values).
ConvergenceStudy grid_doubling(const std::function<double(int)>& quantity, int M0, int levels);

}  // namespace vortex::greens
