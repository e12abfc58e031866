// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "vortex/cantor.hpp"
#include "vortex/contour.hpp"
#include "vortex/errors.hpp"
#include "vortex/greens.hpp"
#include "vortex/specfun.hpp"
#include "vortex/spectrum.hpp"
#include "vortex/vstates.hpp"

using namespace vortex;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

std::vector<double> log_space(double lo, double hi, int n) {
    std::vector<double> v;
    for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
    return v;
}

Outcome bessel_identities() {
    double worst = 0.0;
    bool bounds = true;
    for (int n = 0; n <= 32; ++n) {
        for (double x : log_space(1e-3, 1e3, 121)) {
            worst = std::max(worst, specfun::check_wronskian(n, x) * x);
            const auto [bi, bk] = specfun::check_ratio_bounds(n, x);
            bounds = bounds && bi && bk;
        }
    }
    return {worst <= 1e-10 && bounds,
            "max x*|Wronskian residual| = " + fmt("%.2e", worst) + (bounds ? ", ratio bounds hold" : ", ratio bound violated")};
}

Outcome integral_identities() {
    double worst = 0.0;
    for (int n = 1; n <= 16; ++n) {
        worst = std::max(worst, std::fabs(greens::log_kernel_coefficient(n, 8192) + 1.0 / n));
        for (double alpha : {0.3, 1.0, 3.0}) {
            const double exact = specfun::product_ik(n, 1.0 / alpha);
            worst = std::max(worst, std::fabs(greens::sw_kernel_coefficient(n, alpha, 8192) - exact));
        }
    }
    return {worst < 1e-6, "max abs error = " + fmt("%.2e", worst)};
}

Outcome linearization() {
    const double alpha = 1.0, delta = 1e-5;
    const int M = 256;
    double worst = 0.0;
    for (double Omega : {-0.2, 0.15, 0.6}) {
        for (int n = 0; n <= 16; ++n) {
            vstates::ConformalPerturbation p, q;
            p.coefficients.assign(n + 1, 0.0);
            q.coefficients.assign(n + 1, 0.0);
            p.coefficients[n] = delta;
            q.coefficients[n] = -delta;
            const auto gp = vstates::evaluate_F(alpha, Omega, p, M).sine_coefficients;
            const auto gq = vstates::evaluate_F(alpha, Omega, q, M).sine_coefficients;
            for (std::size_t r = 1; r <= gp.size(); ++r) {
                const double column = (gp[r - 1] - gq[r - 1]) / (2 * delta);
                const double expected =
                    r == std::size_t(n + 1) ? (n + 1) * (spectrum::omega_bifurcation(n + 1, alpha) - Omega) : 0.0;
                worst = std::max(worst, std::fabs(column - expected));
            }
        }
    }
    return {worst < 1e-6, "max abs deviation from diag((n+1)(Omega_{n+1} - Omega)) = " + fmt("%.2e", worst)};
}

Outcome eigenvalue_structure() {
    bool mono = true;
    double small_alpha = 0.0, large_m = 0.0;
    for (double alpha : log_space(0.05, 10.0, 20)) {
        for (int m = 1; m < 64; ++m)
            mono = mono && spectrum::omega_bifurcation(m, alpha) < spectrum::omega_bifurcation(m + 1, alpha);
        large_m = std::max(large_m, std::fabs(spectrum::omega_bifurcation(200, alpha) - spectrum::omega_infinity(alpha)));
    }
    for (int m = 1; m <= 64; ++m)
        small_alpha = std::max(small_alpha, std::fabs(spectrum::omega_bifurcation(m, 1e-3) - (m - 1.0) / (2.0 * m)));
    return {mono && small_alpha < 1e-3 && large_m < 1e-3,
            std::string(mono ? "strictly increasing" : "NOT monotone") + ", alpha->0 gap " + fmt("%.2e", small_alpha) +
                ", m=200 gap " + fmt("%.2e", large_m)};
}

Outcome branches() {
    std::vector<double> path;
    for (int k = 0; k <= 8; ++k) path.push_back(1e-4 + k * (0.08 - 1e-4) / 8);
    double residual = 0.0, gap = 0.0;
    for (int m : {3, 2}) {
        const auto br = vstates::continue_branch(1.0, m, path);
        for (const auto& p : br) residual = std::max(residual, p.residual);
        gap = std::max(gap, std::fabs(br.front().Omega - spectrum::omega_bifurcation(m, 1.0)));
    }
    return {residual < 1e-10 && gap < 1e-5,
            "max residual " + fmt("%.2e", residual) + ", |Omega(1e-4) - Omega_m| " + fmt("%.2e", gap)};
}

double sup_distance(const contour::RadialPatch& a, const contour::RadialPatch& b) {
    double d = 0.0;
    for (int k = 0; k < a.size(); ++k) d = std::max(d, std::fabs(a.samples[k] - b.samples[k]));
    return d;
}

Outcome rigid_rotation() {
    const auto br = vstates::continue_branch(1.0, 3, {1e-4, 0.01, 0.02, 0.03, 0.04, 0.05});
    const double Omega_V = br.back().Omega;
    const double period = 2 * kPi / Omega_V;
    // Co-rotating frame: the V-state is a fixed point.
    const auto co = contour::radial_patch_from_branch(br.back(), 256, -Omega_V).patch;
    const double e_co = sup_distance(contour::evolve(co, period, 0.2), co);
    // Lab frame: the profile turns once and comes back.
    const auto lab = contour::radial_patch_from_branch(br.back(), 256, 0.0).patch;
    const double e_lab = sup_distance(contour::evolve(lab, period, 0.02), lab);
    return {e_co <= 1e-4 && e_lab <= 1e-4,
            "period " + fmt("%.4f", period) + ", co-rotating error " + fmt("%.2e", e_co) + ", lab-frame error " +
                fmt("%.2e", e_lab)};
}

Outcome conservation_reversibility() {
    const int M = 128;
    const double eps = 0.05, T = 10.0;
    contour::RadialPatch p = contour::flat_patch(M, 0.5, 1.0);
    for (int k = 0; k < M; ++k) {
        const double t = 2 * kPi * k / M;
        p.samples[k] = eps * (std::cos(2 * t) + 0.6 * std::sin(3 * t) - 0.4 * std::cos(5 * t));
    }
    const double dt = contour::default_time_step(M, p.rotation_offset, p.alpha);
    const contour::Diagnostics d0 = contour::diagnostics(p);
    double drift_J = 0.0, drift_mean = 0.0;
    const auto fwd = contour::evolve(p, T, dt, [&](double, const contour::RadialPatch& q) {
        drift_J = std::max(drift_J, std::fabs(contour::diagnostics(q).J / d0.J - 1.0));
        drift_mean = std::max(drift_mean, std::fabs(contour::mean(q.samples) - contour::mean(p.samples)));
    });
    const auto back = contour::evolve(contour::reflect(p), -T, dt);
    const double rev = sup_distance(contour::reflect(fwd), back);
    return {drift_J < 1e-6 && drift_mean < 1e-12 && rev < 1e-6,
            "J drift " + fmt("%.2e", drift_J) + ", mean drift " + fmt("%.2e", drift_mean) + ", S Phi_T - Phi_-T S " +
                fmt("%.2e", rev)};
}

Outcome linear_solutions() {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> time(0.0, 100.0);
    double worst = 0.0;
    for (int i = 0; i < 10; ++i)
        worst = std::max(worst, contour::linear_qp_residual({2, 3}, {0.3, -0.7}, 0.5, 1.0, time(rng), 128));
    return {worst < 1e-8, "max residual " + fmt("%.2e", worst)};
}

Outcome cantor_scaling() {
    cantor::DiophantineSpec s;
    s.gamma = 1e-2;
    s.tau = 3.0;
    s.l_cutoff = 20;
    s.j_cutoff = 20;
    s.S = {2, 3};
    const auto f = cantor::scaling_fit(s, {1e-2, 3e-3, 1e-3, 3e-4}, 0.5, 1.5, 2000, 3);
    bool strict = true, bounded = std::isfinite(f.constant) && f.constant > 0.0;
    for (std::size_t i = 0; i < f.gammas.size(); ++i) {
        if (i > 0) strict = strict && f.excluded[i] < f.excluded[i - 1];
        bounded = bounded && f.excluded[i] <= f.constant * std::cbrt(f.gammas[i]) * (1 + 1e-12);
    }
    std::string detail = "excluded";
    for (double e : f.excluded) detail += " " + fmt("%.3e", e);
    detail += ", C = " + fmt("%.4f", f.constant) + ", fitted exponent " + fmt("%.3f", f.exponent);
    return {f.monotone && strict && bounded, detail};
}

Outcome transversality() {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> variant(0, 3), lcomp(-6, 6), jpick(-12, 12);
    const spectrum::Variant variants[] = {spectrum::Variant::pure, spectrum::Variant::plus_jV0,
                                          spectrum::Variant::plus_Omega_j, spectrum::Variant::difference};
    int accepted = 0, rejected = 0;
    double smallest = 1e300, worst_change = 0.0;
    while (accepted < 50) {
        spectrum::TransversalityQuery q;
        q.S = {2, 3};
        q.variant = variants[variant(rng)];
        q.l = {lcomp(rng), lcomp(rng)};
        q.j = jpick(rng);
        q.j0 = jpick(rng);
        q.q0 = 3;
        spectrum::TransversalityReport r;
        try {
            r = spectrum::transversality_report(q);
        } catch (const PreconditionError&) {
            ++rejected;  // not admissible
            continue;
        }
        ++accepted;
        smallest = std::min(smallest, r.margin);
        worst_change = std::max(worst_change, r.relative_change);
    }
    return {smallest > 0.0 && worst_change < 0.05, "50 admissible cases (" + std::to_string(rejected) +
                                                       " rejected draws), min margin " + fmt("%.3e", smallest) +
                                                       ", max grid-doubling change " + fmt("%.2e", worst_change)};
}

struct Criterion {
    int id;
    const char* name;
    double limit_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "Bessel identity suite", 5, bessel_identities},
        {2, "integral identity suite", 10, integral_identities},
        {3, "linearization vs multiplier", 30, linearization},
        {4, "eigenvalue structure", 5, eigenvalue_structure},
        {5, "branch continuation", 120, branches},
        {6, "rigid rotation of the V-state", 120, rigid_rotation},
        {7, "conservation and reversibility", 120, conservation_reversibility},
        {8, "linear quasi-periodic solutions", 10, linear_solutions},
        {9, "Cantor scaling", 60, cantor_scaling},
        {10, "transversality margins", 60, transversality},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool ok = o.pass && secs < c.limit_seconds;
        failed += !ok;
        std::printf("[%s] %2d %s: %s (%.2f s, limit %.0f s)\n", ok ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(),
                    secs, c.limit_seconds);
        std::fflush(stdout);
    }
    return failed;
}
