#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vortex/vstates.hpp"

namespace vortex::contour {

// Boundary z(t, θ) = R(θ) e^{i(θ − Ωt)} with R = √(1 + 2r), sampled at θ_k = 2πk/M.
struct RadialPatch {
    std::vector<double> samples;
    double rotation_offset = 0.5;
    double alpha = 1.0;

    int size() const { return static_cast<int>(samples.size()); }
};

// Throws InvalidGridError for odd M or M < 8 and GeometryError if 1 + 2r ≤ 0.
void validate(const RadialPatch& patch);

RadialPatch flat_patch(int M, double Omega, double alpha);
// r = Σ a_j cos(jθ).
RadialPatch cosine_patch(int M, double Omega, double alpha, const std::vector<int>& modes,
                         const std::vector<double>& amplitudes);
// (Sr)(θ) = r(−θ).
RadialPatch reflect(const RadialPatch& patch);
double mean(std::span<const double> samples);

// A_r(θ, η) = |R(θ)e^{iθ} − R(η)e^{iη}|, with r interpolated spectrally.
double chord(const RadialPatch& patch, double theta, double eta);

// ∂_t r = −Ω∂_θ r + (1/2π)∫ k(A_r) ∂²_{θη}(R(θ)R(η) sin(η − θ)) dη, trapezoid in η with
// spectral ∂_θ and a 2/3-rule filter on the result. M even and ≥ 32.
std::vector<double> rhs(const RadialPatch& patch);
std::vector<double> rhs_serial(const RadialPatch& patch);

// V_r = Ω − V_r^E − V_r^SW, the transport speed of the linearized flow.
std::vector<double> transport_velocity(const RadialPatch& patch);

// −∂_θ(V_r ρ + L_r ρ) with L_r ρ = (1/2π)∫ ρ(η) k(A_r(θ, η)) dη; ρ must have zero mean.
std::vector<double> linearized_rhs(const RadialPatch& patch, std::span<const double> rho);

// 0.25 (2π/M) / (|Ω| + |Ω_∞(α)| + 1).
double default_time_step(int M, double Omega, double alpha);
// c (2π/M) / max|V_r|.
double stability_limit(const RadialPatch& patch, double c = 0.5);

// Classical RK4. |dt| must not exceed stability_limit(patch); negative dt
// integrates backwards. Throws InstabilityError if 1 + 2r ≤ 0 at a stage.
RadialPatch step_rk4(const RadialPatch& patch, double dt);

// ceil(|T|/dt) equal RK4 steps; the observer sees (t, patch) after every step.
RadialPatch evolve(const RadialPatch& patch, double T, double dt,
                   const std::function<void(double, const RadialPatch&)>& observer = {});

struct Diagnostics {
    double J = 0.0;
    double E = 0.0;
    double H = 0.0;
    double mean_r = 0.0;
};

enum class EnergyMethod { contour, area };

// J = (1/4)⨍(1 + 2r)², H = (E − ΩJ)/2.
Diagnostics diagnostics(const RadialPatch& patch, EnergyMethod method = EnergyMethod::contour);

// E = −(1/2π)∫_D Ψ dA as the double boundary integral
// (1/4π²)∮∮ χ(|z − ξ|) dz·dξ with Δχ = k, χ(ρ) = (ρ²/4)(log ρ − 1) + α² k(ρ).
double energy_contour(const RadialPatch& patch);
double energy_contour_serial(const RadialPatch& patch);
// Ψ from its boundary representation, integrated on a polar grid of 64
// Gauss-Legendre radii times M angles.
double energy_area(const RadialPatch& patch);
// E(r ≡ 0) = 1/16 − α²(1/2 − I_1(1/α)K_1(1/α)).
double flat_energy(double alpha);

// ρ(t, θ) = Σ_{j∈S} ρ_j cos(jθ − Ω_j^E(α)t) and its time derivative.
std::vector<double> linear_qp_solution(const std::vector<int>& S, const std::vector<double>& amplitudes,
                                       double Omega, double alpha, double t, int M);
std::vector<double> linear_qp_time_derivative(const std::vector<int>& S, const std::vector<double>& amplitudes,
                                              double Omega, double alpha, double t, int M);
// max_θ |∂_t ρ − linearized_rhs(flat, ρ)| at time t.
double linear_qp_residual(const std::vector<int>& S, const std::vector<double>& amplitudes, double Omega,
                          double alpha, double t, int M);

struct Conversion {
    RadialPatch patch;
    double phase_residual = 0.0;  // max_k |arg Φ(e^{iφ_k}) − θ_k|
};

// Solves arg Φ(e^{iφ}) = θ_k by Newton on the exact conformal map and sets
// r = (|Φ|² − 1)/2. A V-state rotating at Ω_V is steady for rotation_offset = −Ω_V.
Conversion radial_patch_from_branch(const vstates::BranchPoint& point, int M, double rotation_offset);

}  // namespace vortex::contour
