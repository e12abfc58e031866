#include "vortex/spectrum.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "vortex/errors.hpp"
#include "vortex/specfun.hpp"

namespace vortex::spectrum {

namespace {

void require_order(int m) {
    if (m < 1) throw PreconditionError("frequency order must be >= 1, got " + std::to_string(m));
}

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw PreconditionError(std::string(what) + " must be positive");
}

void require_interval(double a0, double a1) {
    require_positive(a0, "alpha0");
    if (!(a1 > a0) || !std::isfinite(a1)) throw PreconditionError("alpha interval must satisfy alpha0 < alpha1");
}

bool contains(const std::vector<int>& S, int j) { return std::binary_search(S.begin(), S.end(), std::abs(j)); }

}  // namespace

double omega_sw(int m, double lambda) {
    require_order(m);
    require_positive(lambda, "lambda");
    if (m == 1) return 0.0;
    return specfun::product_ik(1, lambda) - specfun::product_ik(m, lambda);
}

double omega_euler(int m) {
    require_order(m);
    return (m - 1) / (2.0 * m);
}

double omega_bifurcation(int m, double alpha) {
    require_positive(alpha, "alpha");
    return omega_euler(m) - omega_sw(m, 1.0 / alpha);
}

double omega_infinity(double alpha) {
    require_positive(alpha, "alpha");
    return 0.5 - specfun::product_ik(1, 1.0 / alpha);
}

double v0(double Omega, double alpha) { return Omega + omega_infinity(alpha); }

double equilibrium_frequency(int j, double Omega, double alpha) {
    if (j == 0) throw PreconditionError("equilibrium frequency needs j != 0");
    return j * (Omega + omega_bifurcation(std::abs(j), alpha));
}

bool check_monotonicity(double alpha, int m_max) {
    if (m_max < 2) throw PreconditionError("check_monotonicity needs m_max >= 2");
    double prev = omega_bifurcation(1, alpha);
    for (int m = 2; m <= m_max; ++m) {
        const double cur = omega_bifurcation(m, alpha);
        if (!(cur > prev)) return false;
        prev = cur;
    }
    return true;
}

void validate_tangential_set(const std::vector<int>& S) {
    if (S.empty()) throw PreconditionError("tangential set is empty");
    for (std::size_t k = 0; k < S.size(); ++k) {
        if (S[k] < 1) throw PreconditionError("tangential modes must be positive");
        if (k > 0 && S[k] <= S[k - 1]) throw PreconditionError("tangential set must be strictly increasing");
    }
}

FrequencyVector equilibrium_frequencies(const std::vector<int>& S, double Omega, double alpha) {
    validate_tangential_set(S);
    require_positive(Omega, "rotation offset");
    require_positive(alpha, "alpha");
    FrequencyVector w{S, Omega, alpha, {}};
    for (int j : S) w.components.push_back(equilibrium_frequency(j, Omega, alpha));
    return w;
}

double bracket(const std::vector<int>& l) {
    long s = 0;
    for (int v : l) s += std::abs(v);
    return std::max<double>(1.0, static_cast<double>(s));
}

std::vector<double> central_weights(int q, int half_width) {
    if (q < 0 || half_width < 0 || 2 * half_width < q) throw PreconditionError("stencil too narrow");
    const int n = 2 * half_width + 1;
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = i - half_width;
    // c[k][i]: weight of node i for derivative k, built one node at a time.
    std::vector<std::vector<double>> c(q + 1, std::vector<double>(n, 0.0));
    c[0][0] = 1.0;
    double c1 = 1.0;
    for (int i = 1; i < n; ++i) {
        double c2 = 1.0;
        const int mn = std::min(i, q);
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - x[i - 1] * c[k][i - 1]) / c2;
                c[0][i] = -c1 * x[i - 1] * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (x[i] * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = x[i] * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c[q];
}

int stencil_half_width(int q) { return q <= 0 ? 0 : 3 + (q - 1) / 2; }

std::vector<double> derivatives(const std::function<double(double)>& f, double x, int q0, double h) {
    std::vector<double> out(q0 + 1);
    out[0] = f(x);
    for (int q = 1; q <= q0; ++q) {
        const int p = stencil_half_width(q);
        const auto w = central_weights(q, p);
        double acc = 0.0;
        for (int o = -p; o <= p; ++o) acc += w[o + p] * f(x + o * h);
        out[q] = acc / std::pow(h, q);
    }
    return out;
}

std::function<double(double)> transversality_function(const TransversalityQuery& qy) {
    validate_tangential_set(qy.S);
    require_positive(qy.Omega, "rotation offset");
    if (qy.l.size() != qy.S.size()) throw PreconditionError("l must have one entry per tangential mode");
    const bool l_zero = std::all_of(qy.l.begin(), qy.l.end(), [](int v) { return v == 0; });
    auto require_normal = [&](int j, const char* name) {
        if (j == 0 || contains(qy.S, j)) {
            throw PreconditionError(std::string(name) + " must be nonzero with |" + name + "| outside S");
        }
    };
    switch (qy.variant) {
        case Variant::pure:
            if (l_zero) throw PreconditionError("pure variant needs l != 0");
            break;
        case Variant::plus_jV0:
        case Variant::plus_Omega_j:
            require_normal(qy.j, "j");
            break;
        case Variant::difference:
            require_normal(qy.j, "j");
            require_normal(qy.j0, "j0");
            if (l_zero && qy.j == qy.j0) throw PreconditionError("degenerate case (l, j) = (0, j0)");
            break;
    }
    return [qy](double alpha) {
        double acc = 0.0;
        for (std::size_t k = 0; k < qy.S.size(); ++k) {
            if (qy.l[k] != 0) acc += qy.l[k] * equilibrium_frequency(qy.S[k], qy.Omega, alpha);
        }
        switch (qy.variant) {
            case Variant::pure: break;
            case Variant::plus_jV0: acc += qy.j * v0(qy.Omega, alpha); break;
            case Variant::plus_Omega_j: acc += equilibrium_frequency(qy.j, qy.Omega, alpha); break;
            case Variant::difference:
                acc += equilibrium_frequency(qy.j, qy.Omega, alpha) - equilibrium_frequency(qy.j0, qy.Omega, alpha);
                break;
        }
        return acc;
    };
}

namespace {

// Samples f on the doubled grid (spacing s), padded so that every grid point
// carries the step-h and step-2h stencils; h = r s.
struct SampledProblem {
    std::function<double(double)> f;
    int q0;
    int coarse;   // grid_size
    int fine;     // 2 grid_size − 1
    int r;        // h / s
    int pad;      // samples beyond each end
    double alpha0;
    double s;
    double norm;  // ⟨l⟩
    std::vector<std::vector<double>> weights;  // per q
    std::vector<double> values;

    explicit SampledProblem(const TransversalityQuery& qy) : f(transversality_function(qy)), q0(qy.q0) {
        require_interval(qy.alpha0, qy.alpha1);
        if (q0 < 1) throw PreconditionError("q0 must be >= 1");
        if (qy.grid_size < 2) throw PreconditionError("grid_size must be >= 2");
        coarse = qy.grid_size;
        fine = 2 * coarse - 1;
        alpha0 = qy.alpha0;
        s = (qy.alpha1 - qy.alpha0) / (fine - 1);
        r = qy.step > 0.0 ? std::max(1, static_cast<int>(std::lround(qy.step / s))) : 2;
        pad = 2 * stencil_half_width(q0) * r;
        if (!(alpha0 - pad * s > 0.0)) throw PreconditionError("derivative stencil leaves alpha > 0");
        norm = bracket(qy.l);
        weights.resize(q0 + 1);
        for (int q = 1; q <= q0; ++q) weights[q] = central_weights(q, stencil_half_width(q));
        values.resize(fine + 2 * pad);
    }

    double alpha_at(long k) const { return alpha0 + (k - pad) * s; }

    double stencil(int i, int q, int stride) const {
        const int p = stencil_half_width(q);
        double acc = 0.0;
        for (int o = -p; o <= p; ++o) acc += weights[q][o + p] * values[pad + i + o * stride];
        return acc / std::pow(stride * s, q);
    }

    // max_q |f^{(q)}| / ⟨l⟩ at fine index i, and the stencil error estimate.
    std::pair<double, double> evaluate(int i) const {
        double best = std::fabs(values[pad + i]);
        double trunc = 0.0;
        for (int q = 1; q <= q0; ++q) {
            const double dh = stencil(i, q, r);
            // Sixth-order error: (D_2h − D_h) / (2^6 − 1).
            trunc = std::max(trunc, std::fabs(stencil(i, q, 2 * r) - dh) / 63.0);
            best = std::max(best, std::fabs(dh));
        }
        return {best / norm, trunc / norm};
    }

    TransversalityReport finish(const std::vector<double>& level, const std::vector<double>& trunc) const {
        TransversalityReport rep;
        rep.grid_size = coarse;
        rep.margin = std::numeric_limits<double>::infinity();
        rep.refined_margin = std::numeric_limits<double>::infinity();
        for (int i = 0; i < fine; ++i) {
            if (i % 2 == 0 && level[i] < rep.margin) {
                rep.margin = level[i];
                rep.argmin_alpha = alpha_at(pad + i);
            }
            rep.refined_margin = std::min(rep.refined_margin, level[i]);
            rep.truncation_estimate = std::max(rep.truncation_estimate, trunc[i]);
        }
        rep.relative_change = std::fabs(rep.refined_margin - rep.margin) / rep.margin;
        return rep;
    }
};

}  // namespace

TransversalityReport transversality_report(const TransversalityQuery& query) {
    SampledProblem P(query);
    const long n = static_cast<long>(P.values.size());
#pragma omp parallel for schedule(static)
    for (long k = 0; k < n; ++k) P.values[k] = P.f(P.alpha_at(k));
    std::vector<double> level(P.fine), trunc(P.fine);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < P.fine; ++i) std::tie(level[i], trunc[i]) = P.evaluate(i);
    return P.finish(level, trunc);
}

TransversalityReport transversality_report_serial(const TransversalityQuery& query) {
    SampledProblem P(query);
    for (std::size_t k = 0; k < P.values.size(); ++k) P.values[k] = P.f(P.alpha_at(static_cast<long>(k)));
    std::vector<double> level(P.fine), trunc(P.fine);
    for (int i = 0; i < P.fine; ++i) std::tie(level[i], trunc[i]) = P.evaluate(i);
    return P.finish(level, trunc);
}

double transversality_margin(const TransversalityQuery& query) { return transversality_report(query).margin; }

double derivative_bound_constant(int j, int j0, double Omega, double alpha0, double alpha1, int q0,
                                 int grid_size) {
    require_interval(alpha0, alpha1);
    if (j == j0 || j == 0 || j0 == 0) throw PreconditionError("derivative bound needs distinct nonzero j, j0");
    auto f = [=](double a) { return equilibrium_frequency(j, Omega, a) - equilibrium_frequency(j0, Omega, a); };
    const double h = (alpha1 - alpha0) / 2000.0;
    if (!(alpha0 - stencil_half_width(q0) * h > 0.0)) throw PreconditionError("derivative stencil leaves alpha > 0");
    double worst = 0.0;
    for (int i = 0; i < grid_size; ++i) {
        const double a = alpha0 + (alpha1 - alpha0) * i / (grid_size - 1);
        for (double d : derivatives(f, a, q0, h)) worst = std::max(worst, std::fabs(d));
    }
    return worst / std::abs(j - j0);
}

double curve_smallest_singular_value(const std::function<std::vector<double>(double)>& curve,
                                     double alpha0, double alpha1, int samples, bool centered) {
    require_interval(alpha0, alpha1);
    if (samples < 2) throw PreconditionError("need at least two samples");
    Eigen::MatrixXd A;
    for (int k = 0; k < samples; ++k) {
        const double t = std::cos(std::numbers::pi * (k + 0.5) / samples);
        const auto row = curve(0.5 * (alpha0 + alpha1) + 0.5 * (alpha1 - alpha0) * t);
        if (k == 0) A.resize(samples, static_cast<long>(row.size()));
        if (static_cast<long>(row.size()) != A.cols()) throw PreconditionError("curve dimension changed");
        for (long c = 0; c < A.cols(); ++c) A(k, c) = row[c];
    }
    if (A.cols() > samples) throw PreconditionError("need at least as many samples as dimensions");
    if (centered) A.rowwise() -= A.colwise().mean();
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    return svd.singularValues().minCoeff() / std::sqrt(static_cast<double>(samples));
}

double check_nondegeneracy(const std::vector<int>& S, double Omega, double alpha0, double alpha1,
                           Augment augment) {
    validate_tangential_set(S);
    require_positive(Omega, "rotation offset");
    auto curve = [&](double a) {
        auto row = equilibrium_frequencies(S, Omega, a).components;
        if (augment != Augment::none) row.push_back(v0(Omega, a));
        if (augment == Augment::V0_and_1) row.push_back(1.0);
        return row;
    };
    const int d = static_cast<int>(S.size());
    return curve_smallest_singular_value(curve, alpha0, alpha1, 8 * (d + 2), augment != Augment::V0_and_1);
}

}  // namespace vortex::spectrum
