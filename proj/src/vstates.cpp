#include "vortex/vstates.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <string>

#include "vortex/errors.hpp"
#include "vortex/fourier.hpp"
#include "vortex/greens.hpp"
#include "vortex/spectrum.hpp"

namespace vortex::vstates {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kMinConformalDerivative = 1e-8;

int highest_mode(const ConformalPerturbation& f) {
    for (int n = static_cast<int>(f.coefficients.size()) - 1; n >= 0; --n) {
        if (f.coefficients[n] != 0.0) return n;
    }
    return 0;
}

struct Samples {
    std::vector<Complex> w, phi, dphi, weight;  // weight = Φ'(w) w, the ⨏ measure
    std::vector<double> diagonal;               // k(0) plus the local correction
};

Samples sample(double alpha, const ConformalPerturbation& f, int M) {
    if (M < 8 || M % 2 != 0) throw InvalidGridError("evaluate_F: M must be even and >= 8");
    const int N = highest_mode(f);
    if (M < 4 * (N + 1)) {
        throw InvalidGridError("evaluate_F: M = " + std::to_string(M) + " below 4(N+1) for N = " + std::to_string(N));
    }
    const greens::CombinedKernel kernel(alpha);
    const double h = kTwoPi / M;
    Samples s;
    s.w.resize(M);
    s.phi.resize(M);
    s.dphi.resize(M);
    s.weight.resize(M);
    s.diagonal.resize(M);
    for (int j = 0; j < M; ++j) {
        const Complex w = std::polar(1.0, h * j);
        s.w[j] = w;
        s.phi[j] = f.phi(w);
        s.dphi[j] = f.phi_prime(w);
        if (std::abs(s.dphi[j]) < kMinConformalDerivative) throw GeometryError("evaluate_F: Phi' vanishes on the grid");
        s.weight[j] = s.dphi[j] * w;
        s.diagonal[j] = kernel.diagonal() + greens::diagonal_correction(alpha, h * std::abs(s.dphi[j]));
    }
    return s;
}

Complex integral_at(const greens::CombinedKernel& kernel, const Samples& s, int j) {
    const int M = static_cast<int>(s.w.size());
    Complex acc = s.weight[j] * s.diagonal[j];
    for (int k = 0; k < M; ++k) {
        if (k != j) acc += s.weight[k] * kernel(std::abs(s.phi[j] - s.phi[k]));
    }
    return acc / static_cast<double>(M);
}

double functional_at(double Omega, const Samples& s, int j, Complex I) {
    return ((Omega * s.phi[j] + I) * std::conj(s.w[j]) * std::conj(s.dphi[j])).imag();
}

// An m-fold perturbation makes F 2π/m-periodic, so one sector of nodes suffices.
int symmetry_sector(const ConformalPerturbation& f, int M) {
    return f.fold > 1 && M % f.fold == 0 && f.is_symmetric() ? M / f.fold : M;
}

FunctionalValue project(const std::vector<double>& F, int band) {
    const int M = static_cast<int>(F.size());
    const int all = M / 2 - 1;
    if (band <= 0 || band > all) band = all;
    auto g = fourier::sine_coefficients(F, all);
    FunctionalValue out;
    double tail = 0.0;
    for (int n = band; n < all; ++n) tail += g[n] * g[n];
    out.tail_norm = std::sqrt(tail);
    g.resize(band);
    out.sine_coefficients = std::move(g);
    return out;
}

}  // namespace

bool ConformalPerturbation::is_symmetric(double tol) const {
    for (std::size_t n = 0; n < coefficients.size(); ++n) {
        if ((static_cast<int>(n) + 1) % fold != 0 && std::fabs(coefficients[n]) > tol) return false;
    }
    return true;
}

double ConformalPerturbation::lipschitz_sum() const {
    double s = 0.0;
    for (std::size_t n = 1; n < coefficients.size(); ++n) s += n * std::fabs(coefficients[n]);
    return s;
}

Complex ConformalPerturbation::phi(Complex w) const {
    // Horner in 1/w.
    const Complex u = 1.0 / w;
    Complex acc = 0.0;
    for (std::size_t n = coefficients.size(); n-- > 0;) acc = acc * u + coefficients[n];
    return w + acc;
}

Complex ConformalPerturbation::phi_prime(Complex w) const {
    // 1 − Σ n a_n w^{-n-1}.
    const Complex u = 1.0 / w;
    Complex acc = 0.0;
    for (std::size_t n = coefficients.size(); n-- > 1;) acc = acc * u + static_cast<double>(n) * coefficients[n];
    return 1.0 - acc * u * u;
}

ConformalPerturbation symmetric_perturbation(int m, const std::vector<double>& a) {
    if (m < 1) throw PreconditionError("fold must be >= 1");
    ConformalPerturbation f;
    f.fold = m;
    f.coefficients.assign(a.size() * m, 0.0);
    for (std::size_t k = 0; k < a.size(); ++k) f.coefficients[(k + 1) * m - 1] = a[k];
    return f;
}

FunctionalValue evaluate_F(double alpha, double Omega, const ConformalPerturbation& f, int M, int band) {
    const greens::CombinedKernel kernel(alpha);
    const Samples s = sample(alpha, f, M);
    const int sector = symmetry_sector(f, M);
    std::vector<double> F(M);
#pragma omp parallel for schedule(static)
    for (int j = 0; j < sector; ++j) F[j] = functional_at(Omega, s, j, integral_at(kernel, s, j));
    for (int j = sector; j < M; ++j) F[j] = F[j - sector];
    return project(F, band);
}

FunctionalValue evaluate_F_serial(double alpha, double Omega, const ConformalPerturbation& f, int M, int band) {
    const greens::CombinedKernel kernel(alpha);
    const Samples s = sample(alpha, f, M);
    const int sector = symmetry_sector(f, M);
    std::vector<double> F(M);
    for (int j = 0; j < sector; ++j) F[j] = functional_at(Omega, s, j, integral_at(kernel, s, j));
    for (int j = sector; j < M; ++j) F[j] = F[j - sector];
    return project(F, band);
}

double linearized_multiplier(double alpha, double Omega, int n) {
    if (n < 0) throw PreconditionError("linearized_multiplier needs n >= 0");
    return (n + 1) * (spectrum::omega_bifurcation(n + 1, alpha) - Omega);
}

CrandallRabinowitzReport check_crandall_rabinowitz(double alpha, int m, int n_max) {
    if (m < 2) throw PreconditionError("Crandall-Rabinowitz check needs m >= 2");
    return check_crandall_rabinowitz(alpha, m, n_max, spectrum::omega_bifurcation(m, alpha));
}

CrandallRabinowitzReport check_crandall_rabinowitz(double alpha, int m, int n_max, double Omega) {
    if (m < 2) throw PreconditionError("Crandall-Rabinowitz check needs m >= 2");
    if (n_max < m - 1) throw PreconditionError("n_max must reach the kernel direction n = m-1");
    CrandallRabinowitzReport rep;
    rep.m = m;
    rep.alpha = alpha;
    rep.Omega = Omega;
    for (int n = 0; n <= n_max; ++n) {
        const double mu = linearized_multiplier(alpha, Omega, n);
        rep.spectrum.push_back(mu);
        if ((n + 1) % m == 0 && std::fabs(mu) <= 1e-12 * (n + 1)) rep.kernel_modes.push_back(n);
    }
    rep.kernel_dim = static_cast<int>(rep.kernel_modes.size());
    // F is affine in Ω, so ∂_Ω d_f F[v] is a difference in Ω of a central difference in f.
    const double eps = 1e-6;
    const int M = std::max(64, 8 * m);
    auto mode_m = [&](double Om, double a) {
        ConformalPerturbation f;
        f.fold = m;
        f.coefficients.assign(m, 0.0);
        f.coefficients[m - 1] = a;
        return evaluate_F(alpha, Om, f, M, m).sine_coefficients[m - 1];
    };
    rep.transversality =
        (mode_m(Omega + 1, eps) - mode_m(Omega, eps) - mode_m(Omega + 1, -eps) + mode_m(Omega, -eps)) / (2 * eps);
    return rep;
}

namespace {

struct BranchSystem {
    double alpha;
    int m;
    int N;
    int M;

    ConformalPerturbation perturbation(double s, const Eigen::VectorXd& x) const {
        std::vector<double> a(N);
        a[0] = s;
        for (int k = 1; k < N; ++k) a[k] = x[k - 1];
        return symmetric_perturbation(m, a);
    }

    FunctionalValue value(double s, const Eigen::VectorXd& x) const {
        return evaluate_F(alpha, x[N - 1], perturbation(s, x), M, N * m);
    }

    Eigen::VectorXd residual(const FunctionalValue& v) const {
        Eigen::VectorXd r(N);
        for (int k = 1; k <= N; ++k) r[k - 1] = v.sine_coefficients[k * m - 1];
        return r;
    }

    Eigen::MatrixXd jacobian(double s, const Eigen::VectorXd& x, const Eigen::VectorXd& r0) const {
        Eigen::MatrixXd J(N, N);
        for (int c = 0; c < N; ++c) {
            Eigen::VectorXd y = x;
            const double step = 1e-7 * std::max(1.0, std::fabs(x[c]));
            y[c] += step;
            J.col(c) = (residual(value(s, y)) - r0) / step;
        }
        return J;
    }
};

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace

namespace {

struct Solve {
    Eigen::VectorXd x;
    FunctionalValue value;
    double residual;
    int iterations;
};

Solve newton(const BranchSystem& sys, double s, Eigen::VectorXd x, const ContinuationOptions& opt) {
    auto fail = [&](const char* why, const Eigen::VectorXd& at, double norm) {
        char msg[160];
        std::snprintf(msg, sizeof msg, "continue_branch: %s at s = %.6g", why, s);
        return ConvergenceError(msg, std::vector<double>(at.data(), at.data() + at.size()), norm);
    };
    FunctionalValue v = sys.value(s, x);
    Eigen::VectorXd r = sys.residual(v);
    double norm = max_abs(v.sine_coefficients);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    bool have_jacobian = false;
    bool fresh = false;
    int it = 0;
    while (norm >= opt.tol) {
        if (it == opt.max_iterations) throw fail("no convergence", x, norm);
        if (!have_jacobian) {
            lu.compute(sys.jacobian(s, x, r));
            have_jacobian = fresh = true;
        }
        const Eigen::VectorXd dx = lu.solve(-r);
        bool accepted = false;
        Eigen::VectorXd y;
        FunctionalValue vy;
        double ny = 0.0;
        double t = 1.0;
        for (int halvings = 0; halvings <= 10 && !accepted; ++halvings, t *= 0.5) {
            y = x + t * dx;
            try {
                vy = sys.value(s, y);
            } catch (const GeometryError&) {
                continue;
            }
            ny = max_abs(vy.sine_coefficients);
            accepted = ny < norm;
        }
        ++it;
        if (!accepted) {
            if (fresh) throw fail("damped Newton stalled", x, norm);
            have_jacobian = false;
            continue;
        }
        // A Jacobian that no longer halves the residual is rebuilt.
        if (ny > 0.5 * norm) have_jacobian = false;
        fresh = false;
        x = y;
        v = std::move(vy);
        r = sys.residual(v);
        norm = ny;
    }
    return {std::move(x), std::move(v), norm, it};
}

int default_grid(int m, int band) {
    int M = 8 * m;
    while (M < 4 * (band + 1) * m) M *= 2;
    return M;
}

// Keeps Ω last and pads the new coefficients with zeros.
Eigen::VectorXd widen(const Eigen::VectorXd& x, int band) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(band);
    y.head(x.size() - 1) = x.head(x.size() - 1);
    y[band - 1] = x[x.size() - 1];
    return y;
}

}  // namespace

std::vector<BranchPoint> continue_branch(double alpha, int m, const std::vector<double>& amplitudes,
                                         const ContinuationOptions& opt) {
    if (m < 2) throw PreconditionError("continue_branch needs m >= 2");
    if (amplitudes.empty() || !(amplitudes.front() > 0.0) || amplitudes.front() > 1e-3) {
        throw PreconditionError("amplitudes must start in (0, 1e-3]");
    }
    for (std::size_t i = 1; i < amplitudes.size(); ++i) {
        if (!(amplitudes[i] > amplitudes[i - 1])) throw PreconditionError("amplitudes must be increasing");
    }
    if (opt.band < 1 || opt.max_band < opt.band) throw PreconditionError("need 1 <= band <= max_band");
    const int M0 = opt.grid == 0 ? default_grid(m, opt.band) : opt.grid;
    if (M0 < 4 * (opt.band + 1) * m) throw InvalidGridError("continue_branch: grid below 4(band+1)m");
    BranchSystem sys{alpha, m, opt.band, M0};

    Eigen::VectorXd x = Eigen::VectorXd::Zero(opt.band);
    x[opt.band - 1] = spectrum::omega_bifurcation(m, alpha);
    std::vector<BranchPoint> out;
    for (double s : amplitudes) {
        Solve sol = newton(sys, s, x, opt);
        int iterations = sol.iterations;
        // Slowly decaying coefficients leave residual above the band: refine.
        while (!(sol.value.tail_norm < opt.tail_tol)) {
            if (2 * sys.N > opt.max_band) {
                char msg[160];
                std::snprintf(msg, sizeof msg, "continue_branch: discarded modes carry %.3e at s = %.6g, band %d",
                              sol.value.tail_norm, s, sys.N);
                throw ConvergenceError(msg, std::vector<double>(sol.x.data(), sol.x.data() + sol.x.size()),
                                       sol.residual);
            }
            sys.N *= 2;
            sys.M *= 2;
            sol = newton(sys, s, widen(sol.x, sys.N), opt);
            iterations += sol.iterations;
        }
        x = sol.x;
        BranchPoint p;
        p.m = m;
        p.alpha = alpha;
        p.Omega = x[sys.N - 1];
        p.perturbation = sys.perturbation(s, x);
        p.residual = sol.residual;
        p.amplitude = s;
        p.tail_norm = sol.value.tail_norm;
        p.iterations = iterations;
        p.band = sys.N;
        p.grid = sys.M;
        out.push_back(std::move(p));
    }
    return out;
}

}  // namespace vortex::vstates
