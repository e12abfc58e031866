#include "vortex/greens.hpp"

#include <cmath>
#include <numbers>

#include "vortex/errors.hpp"

namespace vortex::greens {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_alpha(double alpha) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw PreconditionError("alpha must be a positive real");
}

}  // namespace

KernelParams::KernelParams(double a) : alpha(a) { require_alpha(a); }

CombinedKernel::CombinedKernel(double alpha)
    : alpha_(alpha), inv_alpha_(1.0 / alpha), log_two_alpha_(std::log(2.0 * alpha)) {
    require_alpha(alpha);
}

double green_kernel(double alpha, double rho) {
    if (!(rho > 0.0)) throw DomainError("green_kernel: rho must be > 0");
    return CombinedKernel(alpha)(rho) / kTwoPi;
}

double combined_boundary_kernel(double alpha, double rho) {
    if (!(rho >= 0.0)) throw DomainError("combined_boundary_kernel: rho must be >= 0");
    return CombinedKernel(alpha)(rho);
}

double diagonal_limit(double alpha) { return CombinedKernel(alpha).diagonal(); }

double diagonal_correction(double alpha, double spacing) {
    require_alpha(alpha);
    constexpr double kZeta3 = 1.2020569031595942;
    return kZeta3 * spacing * spacing / (8.0 * std::numbers::pi * std::numbers::pi * alpha * alpha);
}

BoundaryCurve circle(double radius, int M) {
    BoundaryCurve c;
    c.points.resize(M);
    c.tangents.resize(M);
    for (int k = 0; k < M; ++k) {
        const Complex e = std::polar(1.0, kTwoPi * k / M);
        c.points[k] = radius * e;
        c.tangents[k] = Complex(0.0, radius) * e;
    }
    return c;
}

void validate(const BoundaryCurve& curve) {
    const int M = curve.size();
    if (M < 8 || M % 2 != 0) throw InvalidGridError("boundary grid size must be even and >= 8");
    if (curve.tangents.size() != curve.points.size()) {
        throw InvalidGridError("boundary points and tangents differ in length");
    }
    Complex closure = 0.0;
    double perimeter = 0.0;
    for (const Complex& t : curve.tangents) {
        closure += t;
        perimeter += std::abs(t);
    }
    if (std::abs(closure) > 1e-8 * perimeter) throw InvalidGridError("boundary tangents do not close");
    // Sampled points must agree with the integrated tangent field.
    const double h = kTwoPi / M;
    double mismatch = 0.0;
    for (int k = 0; k < M; ++k) {
        const int next = (k + 1) % M;
        const Complex chord = curve.points[next] - curve.points[k];
        const Complex predicted = 0.5 * h * (curve.tangents[k] + curve.tangents[next]);
        mismatch = std::max(mismatch, std::abs(chord - predicted));
    }
    if (mismatch > 0.5 * perimeter / M) throw InvalidGridError("boundary points are not a closed curve");
}

namespace {

Complex velocity_unchecked(const CombinedKernel& kernel, const BoundaryCurve& curve, Complex z) {
    Complex acc = 0.0;
    const int M = curve.size();
    for (int k = 0; k < M; ++k) acc += kernel(std::abs(z - curve.points[k])) * curve.tangents[k];
    return -acc / static_cast<double>(M);
}

void require_off_nodes(const BoundaryCurve& curve, Complex z) {
    for (const Complex& p : curve.points) {
        if (p == z) throw PreconditionError("separate kernel pieces are singular on a boundary node");
    }
}

}  // namespace

Complex velocity_at(double alpha, const BoundaryCurve& curve, Complex z) {
    validate(curve);
    return velocity_unchecked(CombinedKernel(alpha), curve, z);
}

Complex velocity_euler(const BoundaryCurve& curve, Complex z) {
    validate(curve);
    require_off_nodes(curve, z);
    Complex acc = 0.0;
    for (int k = 0; k < curve.size(); ++k) acc += std::log(std::abs(z - curve.points[k])) * curve.tangents[k];
    return -acc / static_cast<double>(curve.size());
}

Complex velocity_sw(double alpha, const BoundaryCurve& curve, Complex z) {
    validate(curve);
    require_alpha(alpha);
    require_off_nodes(curve, z);
    Complex acc = 0.0;
    for (int k = 0; k < curve.size(); ++k) {
        acc += specfun::bessel_k0(std::abs(z - curve.points[k]) / alpha) * curve.tangents[k];
    }
    return -acc / static_cast<double>(curve.size());
}

std::vector<Complex> velocity_at_targets(double alpha, const BoundaryCurve& curve,
                                         std::span<const Complex> targets) {
    validate(curve);
    const CombinedKernel kernel(alpha);
    std::vector<Complex> out(targets.size());
    const long n = static_cast<long>(targets.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) out[i] = velocity_unchecked(kernel, curve, targets[i]);
    return out;
}

std::vector<Complex> velocity_at_targets_serial(double alpha, const BoundaryCurve& curve,
                                                std::span<const Complex> targets) {
    validate(curve);
    const CombinedKernel kernel(alpha);
    std::vector<Complex> out;
    out.reserve(targets.size());
    for (const Complex& z : targets) out.push_back(velocity_unchecked(kernel, curve, z));
    return out;
}

Eigen::MatrixXd kernel_matrix(double alpha, std::span<const Complex> points) {
    const CombinedKernel kernel(alpha);
    const long M = static_cast<long>(points.size());
    Eigen::MatrixXd K(M, M);
    // Row i fills the upper triangle; cost per row decreases, hence dynamic scheduling.
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < M; ++i) {
        K(i, i) = kernel.diagonal();
        for (long j = i + 1; j < M; ++j) {
            const double v = kernel(std::abs(points[i] - points[j]));
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Eigen::MatrixXd kernel_matrix_serial(double alpha, std::span<const Complex> points) {
    const CombinedKernel kernel(alpha);
    const long M = static_cast<long>(points.size());
    Eigen::MatrixXd K(M, M);
    for (long i = 0; i < M; ++i) {
        for (long j = 0; j < M; ++j) K(i, j) = kernel(std::abs(points[i] - points[j]));
    }
    return K;
}

double poisson_integral(double x) {
    if (!std::isfinite(x)) throw DomainError("poisson_integral: x must be finite");
    return std::fabs(x) <= 1.0 ? 0.0 : 4.0 * std::numbers::pi * std::log(std::fabs(x));
}

namespace {

// Midpoint rule on u ∈ [0, 1] after θ = 2π w(u) with w' ∝ sin⁴(πu). Nodes
// never touch the singular point θ = 0, and the Jacobian's fourth-order zero
// there turns a log singularity into an O(h⁵) error.
template <class F>
double graded_midpoint_mean(F&& f, int M) {
    double acc = 0.0;
    for (int k = 0; k < M; ++k) {
        const double u = (k + 0.5) / M;
        const double w = u - 2.0 / (3.0 * std::numbers::pi) * std::sin(2 * std::numbers::pi * u) +
                         1.0 / (12.0 * std::numbers::pi) * std::sin(4 * std::numbers::pi * u);
        const double s = std::sin(std::numbers::pi * u);
        const double jacobian = s * s * s * s / 0.375;
        acc += f(kTwoPi * w) * jacobian;
    }
    return acc / M;
}

}  // namespace

double poisson_integral_quadrature(double x, int M) {
    if (M < 2) throw InvalidGridError("poisson_integral_quadrature: M must be >= 2");
    // 1 + x² − 2x cos η written without cancellation near η = 0.
    return kTwoPi * graded_midpoint_mean(
                        [x](double eta) {
                            const double s = std::sin(0.5 * eta);
                            return std::log((1.0 - x) * (1.0 - x) + 4.0 * x * s * s);
                        },
                        M);
}

double log_kernel_coefficient(int n, int M) {
    if (M < 2) throw InvalidGridError("log_kernel_coefficient: M must be >= 2");
    return graded_midpoint_mean(
        [n](double t) {
            const double s = std::sin(0.5 * t);
            return std::log(s * s) * std::cos(n * t);
        },
        M);
}

double sw_kernel_coefficient(int n, double alpha, int M) {
    require_alpha(alpha);
    if (M < 2) throw InvalidGridError("sw_kernel_coefficient: M must be >= 2");
    return graded_midpoint_mean(
        [n, alpha](double t) {
            return specfun::bessel_k0(2.0 / alpha * std::fabs(std::sin(0.5 * t))) * std::cos(n * t);
        },
        M);
}

ConvergenceStudy grid_doubling(const std::function<double(int)>& quantity, int M0, int levels) {
    if (levels < 2) throw PreconditionError("grid_doubling needs at least two levels");
    ConvergenceStudy s;
    for (int l = 0, M = M0; l < levels; ++l, M *= 2) {
        s.grid_sizes.push_back(M);
        s.values.push_back(quantity(M));
    }
    for (int l = 0; l + 1 < levels; ++l) s.differences.push_back(std::fabs(s.values[l + 1] - s.values[l]));
    for (std::size_t l = 0; l + 1 < s.differences.size(); ++l) {
        s.observed_orders.push_back(std::log2(s.differences[l] / s.differences[l + 1]));
    }
    return s;
}

}  // namespace vortex::greens
