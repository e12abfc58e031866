#pragma once

#include <functional>
#include <vector>

#include "vortex/spectrum.hpp"

namespace vortex::cantor {

struct DiophantineSpec {
    double gamma = 1e-2;
    double tau = 3.0;
    int l_cutoff = 20;  // |l|_1 ≤ L
    int j_cutoff = 20;  // |j| ≤ J
    std::vector<int> S;
    double Omega = spectrum::kDefaultRotationOffset;
};

// Throws PreconditionError unless γ ∈ (0, 1), τ > 0, L, J ≥ 1 and S is a tangential set.
void validate(const DiophantineSpec& spec);

// τ_1 = d q_0 + 1.
double default_tau(int d, int q0);

enum class DivisorKind { pure, with_j_offset };

// |ω_Eq(α)·l| or |ω_Eq(α)·l + Ω_j^E(α)|; (l, j) = (0, 0) is a DomainError.
double small_divisor(const std::vector<int>& S, double Omega, double alpha, const std::vector<int>& l, int j,
                     DivisorKind kind);

// γ⟨j⟩/⟨l⟩^τ with ⟨j⟩ = max(1, |j|).
double threshold(const DiophantineSpec& spec, const std::vector<int>& l, int j);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
};

// Sorted union of the input intervals.
std::vector<Interval> merge(std::vector<Interval> intervals);
double measure(const std::vector<Interval>& intervals);

// {x ∈ [a, b] : g(x) < 0} for smooth g. Scans `resolution` + 1 points,
// bisects every sign change and every sampled local minimum that golden-section
// search pushes below zero, to `width`.
std::vector<Interval> sublevel_intervals(const std::function<double(double)>& g, double a, double b,
                                         int resolution, double width = 1e-8);

struct Resonance {
    std::vector<int> l;
    int j = 0;
    double excluded_length = 0.0;
};

struct ExclusionReport {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double surviving_measure = 0.0;
    std::vector<Interval> excluded_intervals;  // disjoint and sorted
    std::vector<Resonance> per_resonance;      // nonempty exclusions only
};

// Every (l, j) with |l|_1 ≤ L, |j| ≤ J, |j| ∉ S, (l, j) ≠ (0, 0); (l, j) and
// (−l, −j) give the same divisor and are enumerated once. j = 0 uses the pure divisor.
ExclusionReport excluded_set(const DiophantineSpec& spec, double alpha0, double alpha1, int resolution);
ExclusionReport excluded_set_serial(const DiophantineSpec& spec, double alpha0, double alpha1, int resolution);

// Largest violation ratio threshold/divisor over every resonance at `samples`
// points of each survivor; < 1 means the survivors are clean.
double audit_survivors(const DiophantineSpec& spec, const ExclusionReport& report, int samples);

struct RussmannReport {
    double measure = 0.0;  // |{|f| ≤ M}| at the requested level
    double transversality = 0.0;  // inf_x max_{q ≤ q0} |f^{(q)}(x)| on the check grid
    std::vector<double> levels;   // a decade of M values ending at the requested one
    std::vector<double> measures;
    double fitted_exponent = 0.0;  // least-squares slope of log measure against log M
    double bound_constant = 0.0;   // max measure · m^{1+1/q0} / M^{1/q0}
};

// Throws HypothesisViolated when inf max_q |f^{(q)}| < m on [a, b].
RussmannReport russmann_bound(const std::function<double(double)>& f, double a, double b, double m, double M,
                              int q0, int resolution = 20000);

struct ScalingFit {
    std::vector<double> gammas;
    std::vector<double> excluded;
    double exponent = 0.0;        // least-squares slope of log excluded against log γ
    double constant = 0.0;        // max excluded / γ^{1/q0}
    bool monotone = false;        // excluded nonincreasing as γ decreases
};

ScalingFit scaling_fit(DiophantineSpec spec, const std::vector<double>& gammas, double alpha0, double alpha1,
                       int resolution, int q0);

}  // namespace vortex::cantor
