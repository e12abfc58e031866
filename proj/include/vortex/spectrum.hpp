#pragma once

#include <functional>
#include <vector>

namespace vortex::spectrum {

// Documented default for the rotation offset Ω.
inline constexpr double kDefaultRotationOffset = 0.5;

// I_1(λ)K_1(λ) − I_m(λ)K_m(λ); nonnegative, zero iff m = 1.
double omega_sw(int m, double lambda);

// Euler value (m−1)/(2m).
double omega_euler(int m);

// Ω_m^E(α) = (m−1)/(2m) − Ω^SW_m(1/α).
double omega_bifurcation(int m, double alpha);

// Limit of Ω_m^E(α) as m → ∞: 1/2 − I_1(1/α)K_1(1/α).
double omega_infinity(double alpha);

// V_0(α) = Ω + 1/2 − I_1(1/α)K_1(1/α).
double v0(double Omega, double alpha);

// Ω_j^E(α) = j(Ω + Ω_|j|^E(α)) for j ≠ 0; odd in j.
double equilibrium_frequency(int j, double Omega, double alpha);

// Ω_m^E(α) < Ω_{m+1}^E(α) for every 1 ≤ m < m_max.
bool check_monotonicity(double alpha, int m_max);

struct FrequencyVector {
    std::vector<int> tangential_set;
    double rotation_offset = kDefaultRotationOffset;
    double alpha = 1.0;
    std::vector<double> components;
};

// Throws PreconditionError unless S is nonempty, positive and strictly increasing.
void validate_tangential_set(const std::vector<int>& S);

FrequencyVector equilibrium_frequencies(const std::vector<int>& S, double Omega, double alpha);

// ⟨l⟩ = max(1, |l|_1).
double bracket(const std::vector<int>& l);

// Central finite-difference weights for the q-th derivative on offsets −p..p (Fornberg).
std::vector<double> central_weights(int q, int half_width);

// Half width giving sixth-order accuracy for the q-th derivative.
int stencil_half_width(int q);

// f^{(q)}(x) for q = 0..q0 with step h.
std::vector<double> derivatives(const std::function<double(double)>& f, double x, int q0, double h);

enum class Variant { pure, plus_jV0, plus_Omega_j, difference };

struct TransversalityQuery {
    std::vector<int> S;
    double Omega = kDefaultRotationOffset;
    std::vector<int> l;
    Variant variant = Variant::pure;
    int j = 0;   // signed; |j| ∉ S
    int j0 = 0;  // signed; |j0| ∉ S; difference variant only
    double alpha0 = 0.5;
    double alpha1 = 1.5;
    int q0 = 3;
    int grid_size = 2001;
    double step = 0.0;  // derivative step; 0 selects (α1 − α0)/(grid_size − 1)
};

struct TransversalityReport {
    double margin = 0.0;           // inf_α max_q |∂^q f| / ⟨l⟩ on grid_size points
    double refined_margin = 0.0;   // same on the doubled grid
    double relative_change = 0.0;  // |refined − margin| / margin
    double argmin_alpha = 0.0;
    double truncation_estimate = 0.0;  // max stencil error estimate from step h against 2h
    int grid_size = 0;
};

// The combination of frequencies whose derivatives are bounded from below.
std::function<double(double)> transversality_function(const TransversalityQuery& query);

TransversalityReport transversality_report(const TransversalityQuery& query);
TransversalityReport transversality_report_serial(const TransversalityQuery& query);
double transversality_margin(const TransversalityQuery& query);

// max_q sup_α |∂^q(Ω_j − Ω_j0)| / |j − j0| on an α-grid; j ≠ j0.
double derivative_bound_constant(int j, int j0, double Omega, double alpha0, double alpha1, int q0,
                                 int grid_size = 201);

enum class Augment { none, V0, V0_and_1 };

// Smallest singular value of the K×n sample matrix of a curve at Chebyshev
// points of [α0, α1], divided by √K. Columns are centered when requested.
double curve_smallest_singular_value(const std::function<std::vector<double>(double)>& curve,
                                     double alpha0, double alpha1, int samples, bool centered);

// Samples ω_Eq (augmented by V_0, and by 1) at 8(d+2) points. The constant
// column makes centering meaningless, so V0_and_1 uses the raw sample matrix.
double check_nondegeneracy(const std::vector<int>& S, double Omega, double alpha0, double alpha1,
                           Augment augment);

}  // namespace vortex::spectrum
