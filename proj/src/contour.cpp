#include "vortex/contour.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "vortex/errors.hpp"
#include "vortex/fourier.hpp"
#include "vortex/greens.hpp"
#include "vortex/spectrum.hpp"

namespace vortex::contour {

using Complex = std::complex<double>;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_rhs_grid(const RadialPatch& patch) {
    validate(patch);
    if (patch.size() < 32) throw InvalidGridError("contour dynamics needs an even grid with M >= 32");
}

// Boundary data shared by the kernels: R, P = R' = r'/R, |z'|, and the grid angles.
struct Geometry {
    int M = 0;
    std::vector<double> R, P, c, s, speed, dr;
    std::vector<Complex> z;
};

Geometry geometry(const RadialPatch& patch) {
    Geometry g;
    g.M = patch.size();
    g.dr = fourier::derivative(patch.samples);
    g.R.resize(g.M);
    g.P.resize(g.M);
    g.c.resize(g.M);
    g.s.resize(g.M);
    g.speed.resize(g.M);
    g.z.resize(g.M);
    for (int i = 0; i < g.M; ++i) {
        const double th = kTwoPi * i / g.M;
        g.R[i] = std::sqrt(1.0 + 2.0 * patch.samples[i]);
        g.P[i] = g.dr[i] / g.R[i];
        g.c[i] = std::cos(th);
        g.s[i] = std::sin(th);
        g.speed[i] = std::hypot(g.R[i], g.P[i]);
        g.z[i] = g.R[i] * Complex(g.c[i], g.s[i]);
    }
    return g;
}

Eigen::MatrixXd corrected_kernel(const RadialPatch& patch, const Geometry& g, bool parallel) {
    Eigen::MatrixXd K = parallel ? greens::kernel_matrix(patch.alpha, g.z) : greens::kernel_matrix_serial(patch.alpha, g.z);
    const double h = kTwoPi / g.M;
    for (int i = 0; i < g.M; ++i) K(i, i) += greens::diagonal_correction(patch.alpha, h * g.speed[i]);
    return K;
}

// W = (1/M) K [P s, P c, R s, R c].
Eigen::MatrixXd moments(const Eigen::MatrixXd& K, const Geometry& g) {
    Eigen::MatrixXd X(g.M, 4);
    for (int j = 0; j < g.M; ++j) {
        X(j, 0) = g.P[j] * g.s[j];
        X(j, 1) = g.P[j] * g.c[j];
        X(j, 2) = g.R[j] * g.s[j];
        X(j, 3) = g.R[j] * g.c[j];
    }
    return (K * X) / static_cast<double>(g.M);
}

std::vector<double> velocity_from_moments(double Omega, const Geometry& g, const Eigen::MatrixXd& W) {
    std::vector<double> V(g.M);
    for (int i = 0; i < g.M; ++i) {
        const double conv = g.c[i] * W(i, 0) - g.s[i] * W(i, 1) + g.c[i] * W(i, 3) + g.s[i] * W(i, 2);
        V[i] = Omega - conv / g.R[i];
    }
    return V;
}

double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

bool admissible(std::span<const double> r) {
    for (double x : r) {
        if (!(1.0 + 2.0 * x > 0.0)) return false;
    }
    return true;
}

// χ with Δχ = k; χ(0) = α² k(0).
double chi(const greens::CombinedKernel& k, double rho) {
    const double a2 = k.alpha() * k.alpha();
    if (rho == 0.0) return a2 * k.diagonal();
    return 0.25 * rho * rho * (std::log(rho) - 1.0) + a2 * k(rho);
}

// χ'(ρ) = (ρ/2) log ρ − ρ/4 + α²(1/ρ − K_1(ρ/α)/α).
double chi_prime(double alpha, double rho) {
    return 0.5 * rho * std::log(rho) - 0.25 * rho +
           alpha * alpha * (1.0 / rho - specfun::bessel_k(1, rho / alpha) / alpha);
}

double energy_row(const greens::CombinedKernel& k, const Geometry& g, int i) {
    const Complex ti = Complex(g.P[i], g.R[i]) * Complex(g.c[i], g.s[i]);
    double acc = 0.0;
    for (int j = 0; j < g.M; ++j) {
        const Complex tj = Complex(g.P[j], g.R[j]) * Complex(g.c[j], g.s[j]);
        acc += chi(k, std::abs(g.z[i] - g.z[j])) * std::real(ti * std::conj(tj));
    }
    return acc;
}

}  // namespace

void validate(const RadialPatch& patch) {
    const int M = patch.size();
    if (M < 8 || M % 2 != 0) throw InvalidGridError("radial patch grid must be even and >= 8");
    if (!(patch.alpha > 0.0) || !std::isfinite(patch.alpha)) throw PreconditionError("alpha must be a positive real");
    if (!std::isfinite(patch.rotation_offset)) throw PreconditionError("rotation offset must be finite");
    if (!admissible(patch.samples)) throw GeometryError("radial patch has 1 + 2r <= 0");
}

RadialPatch flat_patch(int M, double Omega, double alpha) {
    RadialPatch p{std::vector<double>(std::max(M, 0), 0.0), Omega, alpha};
    validate(p);
    return p;
}

RadialPatch cosine_patch(int M, double Omega, double alpha, const std::vector<int>& modes,
                         const std::vector<double>& amplitudes) {
    if (modes.size() != amplitudes.size()) throw PreconditionError("modes and amplitudes differ in length");
    RadialPatch p{std::vector<double>(std::max(M, 0), 0.0), Omega, alpha};
    for (int k = 0; k < M; ++k) {
        for (std::size_t n = 0; n < modes.size(); ++n) p.samples[k] += amplitudes[n] * std::cos(modes[n] * kTwoPi * k / M);
    }
    validate(p);
    return p;
}

RadialPatch reflect(const RadialPatch& patch) {
    RadialPatch out = patch;
    const int M = patch.size();
    for (int k = 1; k < M; ++k) out.samples[k] = patch.samples[M - k];
    return out;
}

double mean(std::span<const double> samples) {
    double acc = 0.0;
    for (double x : samples) acc += x;
    return samples.empty() ? 0.0 : acc / static_cast<double>(samples.size());
}

double chord(const RadialPatch& patch, double theta, double eta) {
    validate(patch);
    const auto coeffs = fourier::forward(patch.samples);
    const int M = patch.size();
    const double ra = fourier::interpolate(coeffs, M, theta);
    const double rb = fourier::interpolate(coeffs, M, eta);
    if (!(1.0 + 2.0 * ra > 0.0) || !(1.0 + 2.0 * rb > 0.0)) throw GeometryError("chord: 1 + 2r <= 0 between nodes");
    return std::abs(std::sqrt(1.0 + 2.0 * ra) * std::polar(1.0, theta) - std::sqrt(1.0 + 2.0 * rb) * std::polar(1.0, eta));
}

std::vector<double> rhs(const RadialPatch& patch) {
    require_rhs_grid(patch);
    const Geometry g = geometry(patch);
    const Eigen::MatrixXd W = moments(corrected_kernel(patch, g, true), g);
    std::vector<double> out(g.M);
    // Σ_j K_ij D_ij expanded in the product moments of sin(θ_j − θ_i) and cos(θ_j − θ_i).
    for (int i = 0; i < g.M; ++i) {
        const double Pi = g.P[i], Ri = g.R[i], ci = g.c[i], si = g.s[i];
        const double conv = Pi * (ci * W(i, 0) - si * W(i, 1)) + Ri * (ci * W(i, 2) - si * W(i, 3)) +
                            Pi * (ci * W(i, 3) + si * W(i, 2)) - Ri * (ci * W(i, 1) + si * W(i, 0));
        out[i] = -patch.rotation_offset * g.dr[i] + conv;
    }
    return fourier::dealias(out);
}

std::vector<double> rhs_serial(const RadialPatch& patch) {
    require_rhs_grid(patch);
    const Geometry g = geometry(patch);
    const Eigen::MatrixXd K = corrected_kernel(patch, g, false);
    std::vector<double> out(g.M);
    for (int i = 0; i < g.M; ++i) {
        double acc = 0.0;
        for (int j = 0; j < g.M; ++j) {
            const double d = kTwoPi * (j - i) / g.M;
            const double D = (g.P[i] * g.P[j] + g.R[i] * g.R[j]) * std::sin(d) +
                             (g.P[i] * g.R[j] - g.R[i] * g.P[j]) * std::cos(d);
            acc += K(i, j) * D;
        }
        out[i] = -patch.rotation_offset * g.dr[i] + acc / g.M;
    }
    return fourier::dealias(out);
}

std::vector<double> transport_velocity(const RadialPatch& patch) {
    require_rhs_grid(patch);
    const Geometry g = geometry(patch);
    return velocity_from_moments(patch.rotation_offset, g, moments(corrected_kernel(patch, g, true), g));
}

std::vector<double> linearized_rhs(const RadialPatch& patch, std::span<const double> rho) {
    require_rhs_grid(patch);
    if (static_cast<int>(rho.size()) != patch.size()) throw PreconditionError("rho and patch differ in length");
    const double scale = std::max(1.0, max_abs(rho));
    if (std::fabs(mean(rho)) > 1e-10 * scale) throw PreconditionError("rho must have zero mean");
    const Geometry g = geometry(patch);
    const Eigen::MatrixXd K = corrected_kernel(patch, g, true);
    const std::vector<double> V = velocity_from_moments(patch.rotation_offset, g, moments(K, g));
    const Eigen::Map<const Eigen::VectorXd> rv(rho.data(), g.M);
    const Eigen::VectorXd L = K * rv / static_cast<double>(g.M);
    std::vector<double> flux(g.M);
    for (int i = 0; i < g.M; ++i) flux[i] = V[i] * rho[i] + L(i);
    std::vector<double> out = fourier::derivative(flux);
    for (double& x : out) x = -x;
    return fourier::dealias(out);
}

double default_time_step(int M, double Omega, double alpha) {
    if (M < 8) throw InvalidGridError("time step needs M >= 8");
    return 0.25 * (kTwoPi / M) / (std::fabs(Omega) + std::fabs(spectrum::omega_infinity(alpha)) + 1.0);
}

double stability_limit(const RadialPatch& patch, double c) {
    const double vmax = max_abs(transport_velocity(patch));
    return c * (kTwoPi / patch.size()) / std::max(vmax, 1e-300);
}

RadialPatch step_rk4(const RadialPatch& patch, double dt) {
    if (!std::isfinite(dt) || dt == 0.0) throw PreconditionError("time step must be finite and nonzero");
    if (std::fabs(dt) > stability_limit(patch)) throw PreconditionError("time step exceeds the transport stability bound");
    const int M = patch.size();
    RadialPatch stage = patch;
    auto eval = [&](const std::vector<double>& base, const std::vector<double>& k, double w) {
        for (int i = 0; i < M; ++i) stage.samples[i] = base[i] + w * k[i];
        if (!admissible(stage.samples)) throw InstabilityError("RK4 stage left the admissible set 1 + 2r > 0");
        return rhs(stage);
    };
    const std::vector<double>& r = patch.samples;
    const std::vector<double> k1 = rhs(patch);
    const std::vector<double> k2 = eval(r, k1, 0.5 * dt);
    const std::vector<double> k3 = eval(r, k2, 0.5 * dt);
    const std::vector<double> k4 = eval(r, k3, dt);
    RadialPatch out = patch;
    for (int i = 0; i < M; ++i) out.samples[i] = r[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    if (!admissible(out.samples)) throw InstabilityError("RK4 step left the admissible set 1 + 2r > 0");
    return out;
}

RadialPatch evolve(const RadialPatch& patch, double T, double dt,
                   const std::function<void(double, const RadialPatch&)>& observer) {
    if (!(dt > 0.0)) throw PreconditionError("evolve: dt must be positive");
    if (T == 0.0) return patch;
    const long steps = static_cast<long>(std::ceil(std::fabs(T) / dt - 1e-12));
    const double h = T / static_cast<double>(steps);
    RadialPatch p = patch;
    for (long n = 1; n <= steps; ++n) {
        p = step_rk4(p, h);
        if (observer) observer(n * h, p);
    }
    return p;
}

double energy_contour(const RadialPatch& patch) {
    validate(patch);
    const Geometry g = geometry(patch);
    const greens::CombinedKernel k(patch.alpha);
    double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
    for (int i = 0; i < g.M; ++i) acc += energy_row(k, g, i);
    return acc / (static_cast<double>(g.M) * g.M);
}

double energy_contour_serial(const RadialPatch& patch) {
    validate(patch);
    const Geometry g = geometry(patch);
    const greens::CombinedKernel k(patch.alpha);
    double acc = 0.0;
    for (int i = 0; i < g.M; ++i) acc += energy_row(k, g, i);
    return acc / (static_cast<double>(g.M) * g.M);
}

double energy_area(const RadialPatch& patch) {
    validate(patch);
    using Rule = boost::math::quadrature::gauss<double, 64>;
    const Geometry g = geometry(patch);
    // Gauss-Legendre on [0, 1]: the listed abscissae are the nonnegative half of [−1, 1].
    std::vector<double> x, w;
    for (std::size_t n = 0; n < Rule::abscissa().size(); ++n) {
        const double a = Rule::abscissa()[n], wt = Rule::weights()[n];
        x.push_back(0.5 * (1.0 + a));
        w.push_back(0.5 * wt);
        if (a != 0.0) {
            x.push_back(0.5 * (1.0 - a));
            w.push_back(0.5 * wt);
        }
    }
    const int nr = static_cast<int>(x.size());
    double acc = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : acc)
    for (int k = 0; k < g.M; ++k) {
        for (int q = 0; q < nr; ++q) {
            const double ell = x[q] * g.R[k];
            const Complex z = ell * Complex(g.c[k], g.s[k]);
            // Ψ(z) = (1/2π)∮ χ'(ρ) (ξ − z)/ρ · n ds with n ds = −i dξ.
            double psi = 0.0;
            for (int j = 0; j < g.M; ++j) {
                const Complex d = g.z[j] - z;
                const double rho = std::abs(d);
                const Complex normal = Complex(0.0, -1.0) * Complex(g.P[j], g.R[j]) * Complex(g.c[j], g.s[j]);
                psi += chi_prime(patch.alpha, rho) * std::real(std::conj(d) * normal) / rho;
            }
            psi /= g.M;
            acc += psi * ell * w[q] * g.R[k];
        }
    }
    // −(1/2π) ∫ Ψ dA with dA = ℓ dℓ dθ and dθ = 2π/M.
    return -acc / g.M;
}

double flat_energy(double alpha) {
    if (!(alpha > 0.0)) throw PreconditionError("alpha must be a positive real");
    return 1.0 / 16.0 - alpha * alpha * spectrum::omega_infinity(alpha);
}

Diagnostics diagnostics(const RadialPatch& patch, EnergyMethod method) {
    validate(patch);
    Diagnostics d;
    double j = 0.0;
    for (double r : patch.samples) j += (1.0 + 2.0 * r) * (1.0 + 2.0 * r);
    d.J = 0.25 * j / patch.size();
    d.E = method == EnergyMethod::contour ? energy_contour(patch) : energy_area(patch);
    d.H = 0.5 * (d.E - patch.rotation_offset * d.J);
    d.mean_r = mean(patch.samples);
    return d;
}

namespace {

void require_qp(const std::vector<int>& S, const std::vector<double>& amplitudes, int M) {
    spectrum::validate_tangential_set(S);
    if (amplitudes.size() != S.size()) throw PreconditionError("one amplitude per tangential mode is required");
    for (double a : amplitudes) {
        if (a == 0.0 || !std::isfinite(a)) throw PreconditionError("amplitudes must be finite and nonzero");
    }
    if (M < 8 || M % 2 != 0) throw InvalidGridError("quasi-periodic grid must be even and >= 8");
    if (2 * S.back() >= M) throw InvalidGridError("grid does not resolve the largest tangential mode");
}

}  // namespace

std::vector<double> linear_qp_solution(const std::vector<int>& S, const std::vector<double>& amplitudes,
                                       double Omega, double alpha, double t, int M) {
    require_qp(S, amplitudes, M);
    std::vector<double> out(M, 0.0);
    for (std::size_t n = 0; n < S.size(); ++n) {
        const double w = spectrum::equilibrium_frequency(S[n], Omega, alpha);
        for (int k = 0; k < M; ++k) out[k] += amplitudes[n] * std::cos(S[n] * kTwoPi * k / M - w * t);
    }
    return out;
}

std::vector<double> linear_qp_time_derivative(const std::vector<int>& S, const std::vector<double>& amplitudes,
                                              double Omega, double alpha, double t, int M) {
    require_qp(S, amplitudes, M);
    std::vector<double> out(M, 0.0);
    for (std::size_t n = 0; n < S.size(); ++n) {
        const double w = spectrum::equilibrium_frequency(S[n], Omega, alpha);
        for (int k = 0; k < M; ++k) out[k] += amplitudes[n] * w * std::sin(S[n] * kTwoPi * k / M - w * t);
    }
    return out;
}

double linear_qp_residual(const std::vector<int>& S, const std::vector<double>& amplitudes, double Omega,
                          double alpha, double t, int M) {
    const std::vector<double> rho = linear_qp_solution(S, amplitudes, Omega, alpha, t, M);
    const std::vector<double> dt = linear_qp_time_derivative(S, amplitudes, Omega, alpha, t, M);
    const std::vector<double> lin = linearized_rhs(flat_patch(M, Omega, alpha), rho);
    double res = 0.0;
    for (int k = 0; k < M; ++k) res = std::max(res, std::fabs(dt[k] - lin[k]));
    return res;
}

Conversion radial_patch_from_branch(const vstates::BranchPoint& point, int M, double rotation_offset) {
    if (M < 8 || M % 2 != 0) throw InvalidGridError("radial patch grid must be even and >= 8");
    const auto& f = point.perturbation;
    Conversion out;
    out.patch = RadialPatch{std::vector<double>(M), rotation_offset, point.alpha};
    for (int k = 0; k < M; ++k) {
        const double theta = kTwoPi * k / M;
        double phi = theta;
        double residual = 0.0;
        for (int it = 0; it < 60; ++it) {
            const Complex w = std::polar(1.0, phi);
            const Complex value = f.phi(w);
            residual = std::arg(value * std::polar(1.0, -theta));
            // d/dφ arg Φ(e^{iφ}) = Re(w Φ'(w)/Φ(w)), positive on a starlike boundary.
            const double slope = std::real(w * f.phi_prime(w) / value);
            if (!(slope > 0.0)) throw GeometryError("V-state boundary is not starlike about the origin");
            phi -= residual / slope;
            if (std::fabs(residual) < 1e-15) break;
        }
        const double R = std::abs(f.phi(std::polar(1.0, phi)));
        out.patch.samples[k] = 0.5 * (R * R - 1.0);
        out.phase_residual = std::max(out.phase_residual, std::fabs(residual));
    }
    validate(out.patch);
    return out;
}

}  // namespace vortex::contour
