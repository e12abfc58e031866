#pragma once

#include <complex>
#include <vector>

namespace vortex::vstates {

using Complex = std::complex<double>;

// f(z) = Σ a_n z^{-n}; Φ(z) = z + f(z) maps the exterior of the unit disc onto
// the exterior of the patch.
struct ConformalPerturbation {
    std::vector<double> coefficients;  // a_0..a_N
    int fold = 1;

    // a_n = 0 unless n ≡ m−1 (mod m).
    bool is_symmetric(double tol = 0.0) const;
    // Σ n|a_n| < 1 keeps Φ' away from zero on the circle.
    double lipschitz_sum() const;
    Complex phi(Complex w) const;
    Complex phi_prime(Complex w) const;
};

// Coefficient a_{k m − 1} of an m-fold perturbation.
ConformalPerturbation symmetric_perturbation(int m, const std::vector<double>& a_km_minus_1);

struct FunctionalValue {
    std::vector<double> sine_coefficients;  // g_1..g_band
    double tail_norm = 0.0;                 // ℓ² norm of g_n above the band
};

// F_α(Ω, f)(w) = Im{(ΩΦ + I)(w) w̄ conj Φ'(w)} with
// I(w) = ⨏ Φ'(τ) k(|Φ(w) − Φ(τ)|) dτ, sampled at M nodes and projected on
// sin(nθ). band = 0 keeps every mode below M/2. Throws InvalidGridError for
// a grid that cannot resolve the perturbation (M < 4(N+1)) and GeometryError
// when |Φ'| nearly vanishes on the grid.
FunctionalValue evaluate_F(double alpha, double Omega, const ConformalPerturbation& f, int M, int band = 0);
FunctionalValue evaluate_F_serial(double alpha, double Omega, const ConformalPerturbation& f, int M,
                                  int band = 0);

// (n+1)(Ω^E_{n+1}(α) − Ω): the action of d_f F(Ω, 0) from a_n to e_{n+1}.
double linearized_multiplier(double alpha, double Omega, int n);

struct CrandallRabinowitzReport {
    int m = 0;
    double alpha = 0.0;
    double Omega = 0.0;
    int kernel_dim = 0;                 // vanishing multipliers on n ≡ m−1 (mod m), n ≤ n_max
    std::vector<int> kernel_modes;      // the n with vanishing multiplier
    double transversality = 0.0;        // e_m component of ∂_Ω d_f F[w̄^{m−1}], numerically
    std::vector<double> spectrum;       // multipliers for n = 0..n_max
    bool hypotheses_hold() const { return kernel_dim == 1 && transversality != 0.0; }
};

// At Ω = Ω_m^E(α).
CrandallRabinowitzReport check_crandall_rabinowitz(double alpha, int m, int n_max);
// At an arbitrary Ω, e.g. away from every eigenvalue.
CrandallRabinowitzReport check_crandall_rabinowitz(double alpha, int m, int n_max, double Omega);

struct BranchPoint {
    int m = 0;
    double alpha = 0.0;
    double Omega = 0.0;
    ConformalPerturbation perturbation;
    double residual = 0.0;   // max |g_{km}| over the band
    double amplitude = 0.0;  // a_{m−1}
    double tail_norm = 0.0;
    int iterations = 0;
    int band = 0;  // band and grid after any refinement
    int grid = 0;
};

struct ContinuationOptions {
    int band = 16;          // unknowns a_{km−1}, k = 2..band, equations g_{km}, k = 1..band
    int grid = 0;           // 0 selects the smallest m·2^k ≥ 4(band+1)m
    double tol = 1e-11;
    int max_iterations = 40;
    double tail_tol = 1e-8;  // ℓ² norm allowed in the sine modes above the band
    int max_band = 128;      // band and grid double while the tail check fails
};

// Fixes a_{m−1} = s for each amplitude and solves for the other coefficients
// and Ω by damped Newton, warm-started along the list. Throws
// ConvergenceError (with the last iterate) and GeometryError.
std::vector<BranchPoint> continue_branch(double alpha, int m, const std::vector<double>& amplitudes,
                                         const ContinuationOptions& options = {});

}  // namespace vortex::vstates
