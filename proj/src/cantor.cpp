#include "vortex/cantor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vortex/errors.hpp"

namespace vortex::cantor {

namespace {

double bracket_j(int j) { return std::max(1, std::abs(j)); }

bool in_set(const std::vector<int>& S, int j) { return std::find(S.begin(), S.end(), std::abs(j)) != S.end(); }

// Lattice points l ∈ Z^d with |l|_1 ≤ L.
void enumerate_l(int d, int L, std::vector<int>& current, std::vector<std::vector<int>>& out) {
    const int used = [&] {
        int s = 0;
        for (int v : current) s += std::abs(v);
        return s;
    }();
    if (static_cast<int>(current.size()) == d) {
        out.push_back(current);
        return;
    }
    for (int v = -(L - used); v <= L - used; ++v) {
        current.push_back(v);
        enumerate_l(d, L, current, out);
        current.pop_back();
    }
}

// One representative of each ±(l, j) pair: the first nonzero entry of (l, j) is positive.
bool canonical(const std::vector<int>& l, int j) {
    for (int v : l) {
        if (v != 0) return v > 0;
    }
    return j > 0;
}

constexpr double kInvPhi = 0.6180339887498949;

double golden_minimum(const std::function<double(double)>& g, double a, double b, double width) {
    double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
    double gc = g(c), gd = g(d);
    while (b - a > width) {
        if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - kInvPhi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + kInvPhi * (b - a);
            gd = g(d);
        }
    }
    return 0.5 * (a + b);
}

// Root of g between pos (g > 0) and neg (g < 0); returns the endpoint on the positive side.
double bisect_outer(const std::function<double(double)>& g, double pos, double neg, double width) {
    while (std::fabs(neg - pos) > width) {
        const double mid = 0.5 * (pos + neg);
        if (g(mid) < 0.0) {
            neg = mid;
        } else {
            pos = mid;
        }
    }
    return pos;
}

// Sublevel set of g from samples on the uniform grid x_k = a + k(b − a)/n.
std::vector<Interval> refine(const std::vector<double>& v, const std::function<double(double)>& g, double a,
                             double b, double width) {
    const int n = static_cast<int>(v.size()) - 1;
    const double h = (b - a) / n;
    auto x = [&](int k) { return k == n ? b : a + k * h; };
    std::vector<Interval> out;
    int k = 0;
    while (k <= n) {
        if (v[k] < 0.0) {
            int e = k;
            while (e < n && v[e + 1] < 0.0) ++e;
            const double lo = k == 0 ? a : bisect_outer(g, x(k - 1), x(k), width);
            const double hi = e == n ? b : bisect_outer(g, x(e + 1), x(e), width);
            out.push_back({lo, hi});
            k = e + 1;
            continue;
        }
        // A positive sampled local minimum may hide a dip between its neighbours.
        if (k > 0 && k < n && v[k] <= v[k - 1] && v[k] <= v[k + 1] && v[k - 1] >= 0.0 && v[k + 1] >= 0.0) {
            const double slope = 0.5 * std::fabs(v[k + 1] - v[k - 1]);
            const double curvature = std::fabs(v[k + 1] + v[k - 1] - 2.0 * v[k]);
            if (v[k] < 2.0 * (slope + curvature)) {
                const double xm = golden_minimum(g, x(k - 1), x(k + 1), 0.1 * width);
                if (g(xm) < 0.0) {
                    out.push_back({bisect_outer(g, x(k - 1), xm, width), bisect_outer(g, x(k + 1), xm, width)});
                }
            }
        }
        ++k;
    }
    return out;
}

struct Problem {
    DiophantineSpec spec;
    double a = 0.0, b = 0.0;
    int n = 0;
    std::vector<std::vector<int>> ls;
    std::vector<int> js;
    // table[k][i]: ω_i at α_k for i < d, then Ω_{j}^E for j = 1..J.
    std::vector<std::vector<double>> table;
};

double combination(const std::vector<int>& S, const std::vector<int>& l, int j, const std::vector<double>& row) {
    double s = 0.0;
    for (std::size_t i = 0; i < S.size(); ++i) s += l[i] * row[i];
    if (j != 0) {
        const double w = row[S.size() + std::abs(j) - 1];
        s += j > 0 ? w : -w;
    }
    return s;
}

std::vector<double> frequency_row(const DiophantineSpec& spec, double alpha) {
    std::vector<double> row;
    for (int s : spec.S) row.push_back(spectrum::equilibrium_frequency(s, spec.Omega, alpha));
    for (int j = 1; j <= spec.j_cutoff; ++j) row.push_back(spectrum::equilibrium_frequency(j, spec.Omega, alpha));
    return row;
}

Problem build(const DiophantineSpec& spec, double a, double b, int resolution, bool parallel) {
    validate(spec);
    if (!(a > 0.0) || !(b > a)) throw PreconditionError("alpha interval must satisfy 0 < alpha0 < alpha1");
    if (resolution < 1000) throw PreconditionError("excluded_set needs resolution >= 1000");
    Problem p;
    p.spec = spec;
    p.a = a;
    p.b = b;
    p.n = resolution;
    std::vector<int> cur;
    enumerate_l(static_cast<int>(spec.S.size()), spec.l_cutoff, cur, p.ls);
    p.table.resize(resolution + 1);
    const double h = (b - a) / resolution;
#pragma omp parallel for schedule(static) if (parallel)
    for (int k = 0; k <= resolution; ++k) p.table[k] = frequency_row(spec, k == resolution ? b : a + k * h);
    return p;
}

std::vector<Interval> resonance_intervals(const Problem& p, const std::vector<int>& l, int j) {
    const double thr = threshold(p.spec, l, j);
    std::vector<double> v(p.n + 1);
    for (int k = 0; k <= p.n; ++k) v[k] = std::fabs(combination(p.spec.S, l, j, p.table[k])) - thr;
    const auto g = [&](double alpha) {
        const DivisorKind kind = j == 0 ? DivisorKind::pure : DivisorKind::with_j_offset;
        return small_divisor(p.spec.S, p.spec.Omega, alpha, l, j, kind) - thr;
    };
    return merge(refine(v, g, p.a, p.b, 1e-8));
}

ExclusionReport run(const DiophantineSpec& spec, double a, double b, int resolution, bool parallel) {
    const Problem p = build(spec, a, b, resolution, parallel);
    struct Pair {
        std::size_t l;
        int j;
    };
    std::vector<Pair> pairs;
    for (std::size_t li = 0; li < p.ls.size(); ++li) {
        for (int j = -spec.j_cutoff; j <= spec.j_cutoff; ++j) {
            if (j != 0 && in_set(spec.S, j)) continue;
            if (!canonical(p.ls[li], j)) continue;
            pairs.push_back({li, j});
        }
    }
    std::vector<std::vector<Interval>> found(pairs.size());
    const long np = static_cast<long>(pairs.size());
#pragma omp parallel for schedule(dynamic, 16) if (parallel)
    for (long i = 0; i < np; ++i) found[i] = resonance_intervals(p, p.ls[pairs[i].l], pairs[i].j);

    ExclusionReport r;
    r.alpha0 = a;
    r.alpha1 = b;
    std::vector<Interval> all;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (found[i].empty()) continue;
        r.per_resonance.push_back({p.ls[pairs[i].l], pairs[i].j, measure(found[i])});
        all.insert(all.end(), found[i].begin(), found[i].end());
    }
    r.excluded_intervals = merge(std::move(all));
    r.surviving_measure = (b - a) - measure(r.excluded_intervals);
    return r;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

void validate(const DiophantineSpec& spec) {
    if (!(spec.gamma > 0.0 && spec.gamma < 1.0)) throw PreconditionError("gamma must lie in (0, 1)");
    if (!(spec.tau > 0.0)) throw PreconditionError("tau must be positive");
    if (spec.l_cutoff < 1 || spec.j_cutoff < 1) throw PreconditionError("cutoffs must be positive");
    spectrum::validate_tangential_set(spec.S);
    if (!std::isfinite(spec.Omega)) throw PreconditionError("rotation offset must be finite");
}

double default_tau(int d, int q0) {
    if (d < 1 || q0 < 1) throw PreconditionError("default_tau needs d, q0 >= 1");
    return d * q0 + 1.0;
}

double small_divisor(const std::vector<int>& S, double Omega, double alpha, const std::vector<int>& l, int j,
                     DivisorKind kind) {
    if (l.size() != S.size()) throw PreconditionError("l must have one entry per tangential mode");
    const bool l_zero = std::all_of(l.begin(), l.end(), [](int v) { return v == 0; });
    const int jj = kind == DivisorKind::pure ? 0 : j;
    if (l_zero && jj == 0) throw DomainError("small divisor of the degenerate index (0, 0)");
    double s = 0.0;
    for (std::size_t i = 0; i < S.size(); ++i) s += l[i] * spectrum::equilibrium_frequency(S[i], Omega, alpha);
    if (jj != 0) s += spectrum::equilibrium_frequency(jj, Omega, alpha);
    return std::fabs(s);
}

double threshold(const DiophantineSpec& spec, const std::vector<int>& l, int j) {
    return spec.gamma * bracket_j(j) / std::pow(spectrum::bracket(l), spec.tau);
}

std::vector<Interval> merge(std::vector<Interval> intervals) {
    std::sort(intervals.begin(), intervals.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    std::vector<Interval> out;
    for (const Interval& iv : intervals) {
        if (!out.empty() && iv.lo <= out.back().hi) {
            out.back().hi = std::max(out.back().hi, iv.hi);
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

double measure(const std::vector<Interval>& intervals) {
    double s = 0.0;
    for (const Interval& iv : intervals) s += iv.length();
    return s;
}

std::vector<Interval> sublevel_intervals(const std::function<double(double)>& g, double a, double b,
                                         int resolution, double width) {
    if (!(b > a)) throw PreconditionError("sublevel_intervals needs a < b");
    if (resolution < 2) throw PreconditionError("sublevel_intervals needs resolution >= 2");
    std::vector<double> v(resolution + 1);
    const double h = (b - a) / resolution;
    for (int k = 0; k <= resolution; ++k) v[k] = g(k == resolution ? b : a + k * h);
    return merge(refine(v, g, a, b, width));
}

ExclusionReport excluded_set(const DiophantineSpec& spec, double alpha0, double alpha1, int resolution) {
    return run(spec, alpha0, alpha1, resolution, true);
}

ExclusionReport excluded_set_serial(const DiophantineSpec& spec, double alpha0, double alpha1, int resolution) {
    return run(spec, alpha0, alpha1, resolution, false);
}

double audit_survivors(const DiophantineSpec& spec, const ExclusionReport& report, int samples) {
    validate(spec);
    std::vector<std::vector<int>> ls;
    std::vector<int> cur;
    enumerate_l(static_cast<int>(spec.S.size()), spec.l_cutoff, cur, ls);
    struct Condition {
        const std::vector<int>* l;
        int j;
        double threshold;
    };
    std::vector<Condition> conditions;
    for (const auto& l : ls) {
        for (int j = -spec.j_cutoff; j <= spec.j_cutoff; ++j) {
            if ((j != 0 && in_set(spec.S, j)) || !canonical(l, j)) continue;
            conditions.push_back({&l, j, threshold(spec, l, j)});
        }
    }
    const double h = (report.alpha1 - report.alpha0) / samples;
    double worst = 0.0;
#pragma omp parallel for schedule(dynamic, 8) reduction(max : worst)
    for (int k = 0; k <= samples; ++k) {
        const double alpha = report.alpha0 + k * h;
        const bool excluded = std::any_of(report.excluded_intervals.begin(), report.excluded_intervals.end(),
                                          [&](const Interval& iv) { return alpha >= iv.lo && alpha <= iv.hi; });
        if (excluded) continue;
        const std::vector<double> row = frequency_row(spec, alpha);
        for (const Condition& c : conditions) {
            const double d = std::fabs(combination(spec.S, *c.l, c.j, row));
            worst = std::max(worst, c.threshold / std::max(d, std::numeric_limits<double>::min()));
        }
    }
    return worst;
}

RussmannReport russmann_bound(const std::function<double(double)>& f, double a, double b, double m, double M,
                              int q0, int resolution) {
    if (!(b > a) || !(m > 0.0) || !(M > 0.0) || q0 < 1) throw PreconditionError("russmann_bound: invalid arguments");
    RussmannReport r;
    const int checks = 2000;
    const double h = (b - a) / checks;
    double inf = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= checks; ++k) {
        const std::vector<double> d = spectrum::derivatives(f, a + k * h, q0, h);
        double best = 0.0;
        for (double v : d) best = std::max(best, std::fabs(v));
        inf = std::min(inf, best);
    }
    r.transversality = inf;
    if (inf < m * (1.0 - 1e-6)) throw HypothesisViolated("russmann_bound: inf max_q |f^(q)| is below m");
    std::vector<double> logs_M, logs_mu;
    for (int k = 4; k >= 0; --k) {
        const double level = M * std::pow(10.0, -0.25 * k);
        const double mu = measure(sublevel_intervals([&](double x) { return std::fabs(f(x)) - level; }, a, b,
                                                     resolution, 1e-12 * (b - a)));
        r.levels.push_back(level);
        r.measures.push_back(mu);
        if (mu > 0.0) {
            logs_M.push_back(std::log(level));
            logs_mu.push_back(std::log(mu));
        }
        r.bound_constant = std::max(r.bound_constant, mu * std::pow(m, 1.0 + 1.0 / q0) / std::pow(level, 1.0 / q0));
    }
    r.measure = r.measures.back();
    r.fitted_exponent = logs_M.size() >= 2 ? slope(logs_M, logs_mu) : 0.0;
    return r;
}

ScalingFit scaling_fit(DiophantineSpec spec, const std::vector<double>& gammas, double alpha0, double alpha1,
                       int resolution, int q0) {
    if (gammas.size() < 2) throw PreconditionError("scaling_fit needs at least two gamma values");
    ScalingFit s;
    s.gammas = gammas;
    std::sort(s.gammas.begin(), s.gammas.end(), std::greater<>());
    std::vector<double> lg, le;
    for (double g : s.gammas) {
        spec.gamma = g;
        const ExclusionReport r = excluded_set(spec, alpha0, alpha1, resolution);
        const double ex = (alpha1 - alpha0) - r.surviving_measure;
        s.excluded.push_back(ex);
        s.constant = std::max(s.constant, ex / std::pow(g, 1.0 / q0));
        if (ex > 0.0) {
            lg.push_back(std::log(g));
            le.push_back(std::log(ex));
        }
    }
    s.monotone = true;
    for (std::size_t i = 1; i < s.excluded.size(); ++i) s.monotone = s.monotone && s.excluded[i] <= s.excluded[i - 1];
    s.exponent = lg.size() >= 2 ? slope(lg, le) : 0.0;
    return s;
}

}  // namespace vortex::cantor
