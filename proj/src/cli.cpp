#include "vortex/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <memory>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "vortex/cantor.hpp"
#include "vortex/contour.hpp"
#include "vortex/errors.hpp"
#include "vortex/fourier.hpp"
#include "vortex/greens.hpp"
#include "vortex/parallel.hpp"
#include "vortex/specfun.hpp"
#include "vortex/spectrum.hpp"
#include "vortex/vstates.hpp"

namespace vortex::cli {

using json = nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string render(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
std::string render(int v) { return std::to_string(v); }
std::string render(const std::string& v) { return v; }

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// Parameters of one subcommand; `resolved()` is the RunConfig that is hashed.
class Params {
public:
    explicit Params(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& name, T& var, const std::string& description) {
        CLI::Option* o = app_->add_option("--" + name, var, description)
                             ->capture_default_str()
                             ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
        renderers_.emplace_back(name, [&var] { return render(var); });
        return o;
    }

    // Output paths are recorded but not hashed, so one RunConfig gives one hash wherever it is written.
    CLI::Option* add_output(const std::string& name, std::string& var, const std::string& description) {
        return app_->add_option("--" + name, var, description)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }

    std::map<std::string, std::string> resolved() const {
        std::map<std::string, std::string> m;
        for (const auto& [name, f] : renderers_) m[name] = f();
        return m;
    }

    CLI::App* app() const { return app_; }

private:
    CLI::App* app_;
    std::vector<std::pair<std::string, std::function<std::string()>>> renderers_;
};

struct Context {
    std::string command;
    std::map<std::string, std::string> config;
    std::string hash;
    json summary = json::object();
    std::vector<std::string> outputs;

    std::string metadata() const {
        std::string s = "# vortex_alpha " + command + "\n# config_hash " + hash + "\n";
        for (const auto& [k, v] : config) s += "# " + k + "=" + v + "\n";
        return s;
    }

    void write_csv(const std::string& path, const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
        if (path.empty()) return;
        std::string s = metadata();
        for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
        s += "\n";
        for (const auto& row : rows) {
            for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + render(row[i]);
            s += "\n";
        }
        write_atomic(path, s);
        outputs.push_back(path);
    }

    void write_json(const std::string& path, json body) {
        if (path.empty()) return;
        body["command"] = command;
        body["config"] = config;
        body["config_hash"] = hash;
        write_atomic(path, body.dump(2) + "\n");
        outputs.push_back(path);
    }
};

class Command {
public:
    virtual ~Command() = default;
    virtual void run(Context& ctx) = 0;
    Params& params() { return *params_; }

protected:
    std::unique_ptr<Params> params_;
};

vortex::contour::RadialPatch cosine_radial(int M, double Omega, double alpha, const std::vector<int>& modes,
                                           const std::vector<double>& amplitudes) {
    try {
        return vortex::contour::cosine_patch(M, Omega, alpha, modes, amplitudes);
    } catch (const GeometryError& e) {
        throw PreconditionError(std::string("initial profile: ") + e.what());
    }
}

// Boundary of a radial patch at t = 0 with tangents from the spectral derivative.
greens::BoundaryCurve boundary_of(const vortex::contour::RadialPatch& p) {
    const int M = p.size();
    const std::vector<double> dr = fourier::derivative(p.samples);
    greens::BoundaryCurve c;
    for (int k = 0; k < M; ++k) {
        const double R = std::sqrt(1.0 + 2.0 * p.samples[k]);
        const std::complex<double> e = std::polar(1.0, kTwoPi * k / M);
        c.points.push_back(R * e);
        c.tangents.push_back(std::complex<double>(dr[k] / R, R) * e);
    }
    return c;
}

// ---------------------------------------------------------------------------

class Bessel : public Command {
public:
    explicit Bessel(CLI::App* app) {
        params_ = std::make_unique<Params>(app);
        params_->add("n-min", n_min, "smallest order");
        params_->add("n-max", n_max, "largest order");
        params_->add("x-min", x_min, "smallest argument");
        params_->add("x-max", x_max, "largest argument");
        params_->add("points", points, "log-spaced arguments");
        params_->add_output("out", out, "CSV of scaled values and identity residuals");
    }

    void run(Context& ctx) override {
        if (n_min < 0 || n_max < n_min) throw PreconditionError("need 0 <= n-min <= n-max");
        if (!(x_min > 0.0) || !(x_max >= x_min) || points < 1) throw PreconditionError("need 0 < x-min <= x-max and points >= 1");
        std::vector<std::vector<double>> rows;
        double worst = 0.0;
        bool bounds = true;
        for (int n = n_min; n <= n_max; ++n) {
            for (int k = 0; k < points; ++k) {
                const double x = points == 1 ? x_min : x_min * std::pow(x_max / x_min, double(k) / (points - 1));
                const double res = specfun::check_wronskian(n, x);
                const auto [bi, bk] = specfun::check_ratio_bounds(n, x);
                bounds = bounds && bi && bk;
                worst = std::max(worst, res * x);
                rows.push_back({double(n), x, specfun::bessel_i_scaled(n, x), specfun::bessel_k_scaled(n, x), res,
                                double(bi), double(bk)});
            }
        }
        ctx.write_csv(out, {"n", "x", "i_scaled", "k_scaled", "wronskian_residual", "ratio_bound_i", "ratio_bound_k"}, rows);
        ctx.summary["max_scaled_wronskian_residual"] = worst;
        ctx.summary["ratio_bounds_hold"] = bounds;
        ctx.summary["evaluations"] = rows.size();
    }

private:
    int n_min = 0, n_max = 32, points = 61;
    double x_min = 1e-3, x_max = 1e3;
    std::string out;
};

class Velocity : public Command {
public:
    explicit Velocity(CLI::App* app) {
        params_ = std::make_unique<Params>(app);
        params_->add("alpha", alpha, "filter scale");
        params_->add("M", M, "boundary nodes");
        params_->add("mode", mode, "radial perturbation mode j (r = amplitude cos j theta)");
        params_->add("amplitude", amplitude, "radial perturbation amplitude");
        params_->add("radii", radii, "target radii, a:b:n or a list");
        params_->add("angle", angle, "polar angle of the targets");
        params_->add_output("out", out, "CSV of velocities");
    }

    void run(Context& ctx) override {
        const std::vector<double> rs = parse_real_list(radii);
        const auto patch = mode == 0 ? contour::flat_patch(M, 0.5, alpha)
                                     : cosine_radial(M, 0.5, alpha, {mode}, {amplitude});
        const greens::BoundaryCurve curve = boundary_of(patch);
        std::vector<std::complex<double>> targets;
        for (double r : rs) targets.push_back(std::polar(r, angle));
        const auto v = greens::velocity_at_targets(alpha, curve, targets);
        std::vector<std::vector<double>> rows;
        double vmax = 0.0;
        for (std::size_t i = 0; i < rs.size(); ++i) {
            rows.push_back({rs[i], targets[i].real(), targets[i].imag(), v[i].real(), v[i].imag()});
            vmax = std::max(vmax, std::abs(v[i]));
        }
        ctx.write_csv(out, {"radius", "x", "y", "u", "v"}, rows);
        ctx.summary["targets"] = rs.size();
        ctx.summary["max_speed"] = vmax;
    }

private:
    double alpha = 1.0, amplitude = 0.0, angle = 0.3;
    int M = 256, mode = 0;
    std::string radii = "0.25,0.5,0.75,1.5,2", out;
};

class Spectrum : public Command {
public:
    explicit Spectrum(CLI::App* app) {
        params_ = std::make_unique<Params>(app);
        params_->add("alpha", alpha, "filter scale");
        params_->add("m-max", m_max, "largest symmetry order");
        params_->add("Omega", Omega, "rotation offset for the equilibrium frequencies");
        params_->add_output("out", out, "CSV with one row per m");
    }

    void run(Context& ctx) override {
        if (m_max < 1) throw PreconditionError("m-max must be >= 1");
        std::vector<std::vector<double>> rows;
        for (int m = 1; m <= m_max; ++m) {
            rows.push_back({double(m), spectrum::omega_bifurcation(m, alpha), spectrum::omega_euler(m),
                            spectrum::omega_sw(m, 1.0 / alpha), spectrum::equilibrium_frequency(m, Omega, alpha)});
        }
        ctx.write_csv(out, {"m", "omega_bifurcation", "omega_euler", "omega_sw", "equilibrium_frequency"}, rows);
        ctx.summary["rows"] = rows.size();
        ctx.summary["monotone"] = m_max < 2 || spectrum::check_monotonicity(alpha, m_max);
        ctx.summary["omega_infinity"] = spectrum::omega_infinity(alpha);
    }

private:
    double alpha = 1.0, Omega = spectrum::kDefaultRotationOffset;
    int m_max = 16;
    std::string out;
};

spectrum::Variant parse_variant(const std::string& s) {
    if (s == "pure") return spectrum::Variant::pure;
    if (s == "plus_jV0") return spectrum::Variant::plus_jV0;
    if (s == "plus_Omega_j") return spectrum::Variant::plus_Omega_j;
    if (s == "difference") return spectrum::Variant::difference;
    throw PreconditionError("variant must be pure, plus_jV0, plus_Omega_j or difference");
}

class Transversality : public Command {
public:
    explicit Transversality(CLI::App* app) {
        params_ = std::make_unique<Params>(app);
        params_->add("S", S, "tangential set, comma separated");
        params_->add("Omega", Omega, "rotation offset");
        params_->add("l", l, "lattice vector, comma separated");
        params_->add("variant", variant, "pure | plus_jV0 | plus_Omega_j | difference");
        params_->add("j", j, "normal mode index");
        params_->add("j0", j0, "second normal mode index (difference)");
        params_->add("alpha0", alpha0, "left end of the parameter interval");
        params_->add("alpha1", alpha1, "right end of the parameter interval");
        params_->add("q0", q0, "highest derivative order");
        params_->add("grid", grid, "grid points");
        params_->add_output("out", out, "JSON report");
    }

    void run(Context& ctx) override {
        spectrum::TransversalityQuery q;
        q.S = parse_int_list(S);
        q.Omega = Omega;
        q.l = parse_int_list(l);
        q.variant = parse_variant(variant);
        q.j = j;
        q.j0 = j0;
        q.alpha0 = alpha0;
        q.alpha1 = alpha1;
        q.q0 = q0;
        q.grid_size = grid;
        const spectrum::TransversalityReport r = spectrum::transversality_report(q);
        json body = {{"margin", r.margin},
                     {"refined_margin", r.refined_margin},
                     {"relative_change", r.relative_change},
                     {"argmin_alpha", r.argmin_alpha},
                     {"truncation_estimate", r.truncation_estimate},
                     {"grid_size", r.grid_size}};
        ctx.write_json(out, body);
        ctx.summary.update(body);
    }

private:
    std::string S = "2,3", l = "1,-1", variant = "pure", out;
    double Omega = spectrum::kDefaultRotationOffset, alpha0 = 0.5, alpha1 = 1.5;
    int j = 0, j0 = 0, q0 = 3, grid = 2001;
};

class Branch : public Command {
public:
    explicit Branch(CLI::App* app) {
        params_ = std::make_unique<Params>(app);
        params_->add("alpha", alpha, "filter scale");
        params_->add("m", m, "symmetry order");
        params_->add("amplitudes", amplitudes, "a_{m-1} values, a:b:n or a list");
        params_->add("band", band, "initial Fourier band");
        params_->add("max-band", max_band, "largest band after refinement");
        params_->add("tol", tol, "Newton residual tolerance");
        params_->add("max-iterations", max_iterations, "Newton iterations per point");
        params_->add("tail-tol", tail_tol, "allowed norm of the discarded modes");
        params_->add_output("out", out, "CSV with one row per branch point");
        params_->add_output("coefficients-out", coefficients_out, "JSON with the conformal coefficients");
    }

    void run(Context& ctx) override {
        vstates::ContinuationOptions o;
        o.band = band;
        o.max_band = max_band;
        o.tol = tol;
        o.max_iterations = max_iterations;
        o.tail_tol = tail_tol;
        const auto points = vstates::continue_branch(alpha, m, parse_real_list(amplitudes), o);
        std::vector<std::vector<double>> rows;
        json coeffs = json::array();
        double worst = 0.0;
        for (const auto& p : points) {
            rows.push_back({p.amplitude, p.Omega, p.residual, p.tail_norm, double(p.iterations), double(p.band),
                            double(p.grid)});
            coeffs.push_back({{"amplitude", p.amplitude}, {"Omega", p.Omega}, {"coefficients", p.perturbation.coefficients}});
            worst = std::max(worst, p.residual);
        }
        ctx.write_csv(out, {"amplitude", "Omega", "residual", "tail_norm", "iterations", "band", "grid"}, rows);
        ctx.write_json(coefficients_out, {{"alpha", alpha}, {"m", m}, {"points", coeffs}});
        ctx.summary["points"] = points.size();
        ctx.summary["max_residual"] = worst;
        ctx.summary["Omega_first"] = points.front().Omega;
        ctx.summary["Omega_last"] = points.back().Omega;
        ctx.summary["Omega_bifurcation"] = spectrum::omega_bifurcation(m, alpha);
    }

private:
    double alpha = 1.0, tol = 1e-11, tail_tol = 1e-8;
    int m = 3, band = 16, max_band = 128, max_iterations = 40;
    std::string amplitudes = "1e-4:0.08:9", out, coefficients_out;
};

class Simulate : public Command {
public:
    explicit Simulate(CLI::App* app) {
        params_ = std::make_unique<Params>(app);
        params_->add("alpha", alpha, "filter scale");
        params_->add("Omega", Omega, "rotation offset (cosine initial data)");
        params_->add("M", M, "grid points");
        params_->add("init", init, "cosine | vstate");
        params_->add("modes", modes, "cosine modes, comma separated");
        params_->add("amplitudes", amplitudes, "cosine amplitudes, comma separated");
        params_->add("vstate-m", vstate_m, "V-state symmetry order");
        params_->add("vstate-s", vstate_s, "V-state amplitude a_{m-1}");
        params_->add("frame", frame, "corotating | lab (vstate initial data)");
        params_->add("T", T, "final time; negative integrates backwards");
        params_->add("dt", dt, "time step; 0 selects the default");
        params_->add("every", every, "diagnostics every n steps");
        params_->add_output("out", out, "CSV trajectory of the diagnostics");
        params_->add_output("profile-out", profile_out, "CSV of the final profile");
    }

    void run(Context& ctx) override {
        if (every < 1) throw PreconditionError("every must be >= 1");
        if (!(dt >= 0.0)) throw PreconditionError("dt must be >= 0");
        contour::RadialPatch p0;
        if (init == "cosine") {
            p0 = cosine_radial(M, Omega, alpha, parse_int_list(modes), parse_real_list(amplitudes));
        } else if (init == "vstate") {
            if (frame != "corotating" && frame != "lab") throw PreconditionError("frame must be corotating or lab");
            if (!(vstate_s > 1e-4)) throw PreconditionError("vstate-s must exceed 1e-4");
            std::vector<double> path{1e-4};
            const int n = static_cast<int>(std::ceil(vstate_s / 0.01));
            for (int k = 1; k <= n; ++k) path.push_back(vstate_s * k / n);
            const auto branch = vstates::continue_branch(alpha, vstate_m, path);
            const double offset = frame == "corotating" ? -branch.back().Omega : 0.0;
            p0 = contour::radial_patch_from_branch(branch.back(), M, offset).patch;
            ctx.summary["vstate_Omega"] = branch.back().Omega;
        } else {
            throw PreconditionError("init must be cosine or vstate");
        }
        const double step = dt > 0.0 ? dt : contour::default_time_step(M, p0.rotation_offset, alpha);
        const contour::Diagnostics d0 = contour::diagnostics(p0);
        std::vector<std::vector<double>> rows{{0.0, d0.J, d0.E, d0.H, d0.mean_r}};
        long n = 0;
        double drift_J = 0.0, drift_mean = 0.0;
        auto record = [&](double t, const contour::RadialPatch& q) {
            const contour::Diagnostics d = contour::diagnostics(q);
            rows.push_back({t, d.J, d.E, d.H, d.mean_r});
            drift_J = std::max(drift_J, std::fabs(d.J / d0.J - 1.0));
            drift_mean = std::max(drift_mean, std::fabs(d.mean_r - d0.mean_r));
        };
        const contour::RadialPatch p = contour::evolve(p0, T, step, [&](double t, const contour::RadialPatch& q) {
            if (++n % every == 0) record(t, q);
        });
        // The final state is always reported.
        if (n % every != 0) record(T, p);
        ctx.write_csv(out, {"t", "J", "E", "H", "mean_r"}, rows);
        std::vector<std::vector<double>> profile;
        for (int k = 0; k < M; ++k) profile.push_back({kTwoPi * k / M, p.samples[k], p0.samples[k]});
        ctx.write_csv(profile_out, {"theta", "r", "r_initial"}, profile);
        double change = 0.0;
        for (int k = 0; k < M; ++k) change = std::max(change, std::fabs(p.samples[k] - p0.samples[k]));
        ctx.summary["steps"] = n;
        ctx.summary["dt"] = T / std::max<long>(n, 1);
        ctx.summary["relative_J_drift"] = drift_J;
        ctx.summary["mean_drift"] = drift_mean;
        ctx.summary["max_profile_change"] = change;
    }

private:
    double alpha = 1.0, Omega = spectrum::kDefaultRotationOffset, vstate_s = 0.05, T = 1.0, dt = 0.0;
    int M = 128, vstate_m = 3, every = 10;
    std::string init = "cosine", modes = "2,3", amplitudes = "0.05,0.03", frame = "corotating", out, profile_out;
};

class Cantor : public Command {
public:
    explicit Cantor(CLI::App* app) {
        params_ = std::make_unique<Params>(app);
        params_->add("S", S, "tangential set");
        params_->add("Omega", Omega, "rotation offset");
        params_->add("gamma", gamma, "gamma values, a:b:n or a list");
        params_->add("tau", tau, "exponent; 0 selects d q0 + 1");
        params_->add("L", L, "cutoff on |l|_1");
        params_->add("J", J, "cutoff on |j|");
        params_->add("alpha0", alpha0, "left end of the parameter interval");
        params_->add("alpha1", alpha1, "right end of the parameter interval");
        params_->add("resolution", resolution, "scan points");
        params_->add("q0", q0, "transversality order used in the scaling fit");
        params_->add_output("out", out, "JSON exclusion reports");
        params_->add_output("scaling-out", scaling_out, "CSV of (gamma, excluded, surviving)");
    }

    void run(Context& ctx) override {
        cantor::DiophantineSpec spec;
        spec.S = parse_int_list(S);
        spec.Omega = Omega;
        spec.tau = tau > 0.0 ? tau : cantor::default_tau(static_cast<int>(spec.S.size()), q0);
        spec.l_cutoff = L;
        spec.j_cutoff = J;
        const std::vector<double> gammas = parse_real_list(gamma);
        json reports = json::array();
        std::vector<std::vector<double>> rows;
        for (double g : gammas) {
            spec.gamma = g;
            const cantor::ExclusionReport r = cantor::excluded_set(spec, alpha0, alpha1, resolution);
            json intervals = json::array(), res = json::array();
            for (const auto& iv : r.excluded_intervals) intervals.push_back({iv.lo, iv.hi});
            for (const auto& x : r.per_resonance) res.push_back({{"l", x.l}, {"j", x.j}, {"excluded_length", x.excluded_length}});
            reports.push_back({{"gamma", g},
                               {"surviving_measure", r.surviving_measure},
                               {"alpha_interval", {r.alpha0, r.alpha1}},
                               {"excluded_intervals", intervals},
                               {"per_resonance", res}});
            rows.push_back({g, (alpha1 - alpha0) - r.surviving_measure, r.surviving_measure});
        }
        ctx.write_json(out, {{"tau", spec.tau}, {"reports", reports}});
        ctx.write_csv(scaling_out, {"gamma", "excluded", "surviving"}, rows);
        std::vector<double> surviving;
        for (const auto& row : rows) surviving.push_back(row[2]);
        ctx.summary["tau"] = spec.tau;
        ctx.summary["surviving_measure"] = surviving;
        if (rows.size() >= 2) {
            double c = 0.0;
            for (const auto& row : rows) c = std::max(c, row[1] / std::pow(row[0], 1.0 / q0));
            ctx.summary["bound_constant"] = c;
        }
    }

private:
    std::string S = "2,3", gamma = "1e-2", out, scaling_out;
    double Omega = spectrum::kDefaultRotationOffset, tau = 3.0, alpha0 = 0.5, alpha1 = 1.5;
    int L = 20, J = 20, resolution = 2000, q0 = 3;
};

class Verify : public Command {
public:
    explicit Verify(CLI::App* app) {
        params_ = std::make_unique<Params>(app);
        params_->add("suite", suite, "identities | bessel");
        params_->add("seed", seed, "seed for the extra random sample points");
        params_->add("random-points", random_points, "random (n, x) points added to the grid");
        params_->add_output("out", out, "JSON report");
    }

    void run(Context& ctx) override {
        if (suite != "identities" && suite != "bessel") throw PreconditionError("suite must be identities or bessel");
        if (random_points < 0) throw PreconditionError("random-points must be >= 0");
        json body;
        double wr = 0.0;
        bool bounds = true;
        auto check = [&](int n, double x) {
            wr = std::max(wr, specfun::check_wronskian(n, x) * x);
            const auto [bi, bk] = specfun::check_ratio_bounds(n, x);
            bounds = bounds && bi && bk;
        };
        for (int n = 0; n <= 32; ++n) {
            for (int k = 0; k <= 120; ++k) check(n, std::pow(10.0, -3.0 + 6.0 * k / 120));
        }
        std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
        std::uniform_int_distribution<int> order(0, 32);
        std::uniform_real_distribution<double> expo(-3.0, 3.0);
        for (int i = 0; i < random_points; ++i) check(order(rng), std::pow(10.0, expo(rng)));
        body["wronskian_max_scaled_residual"] = wr;
        body["ratio_bounds_hold"] = bounds;
        bool pass = wr <= 1e-10 && bounds;
        if (suite == "identities") {
            double log_err = 0.0, sw_err = 0.0;
            for (int n = 1; n <= 16; ++n) {
                log_err = std::max(log_err, std::fabs(greens::log_kernel_coefficient(n, 8192) + 1.0 / n));
                for (double a : {0.3, 1.0, 3.0}) {
                    sw_err = std::max(sw_err, std::fabs(greens::sw_kernel_coefficient(n, a, 8192) -
                                                        specfun::product_ik(n, 1.0 / a)));
                }
            }
            body["log_kernel_max_error"] = log_err;
            body["sw_kernel_max_error"] = sw_err;
            pass = pass && log_err <= 1e-6 && sw_err <= 1e-6;
        }
        body["pass"] = pass;
        ctx.write_json(out, body);
        ctx.summary.update(body);
        if (!pass) throw HypothesisViolated("verify: a residual exceeds its tolerance");
    }

private:
    std::string suite = "identities", out;
    int seed = 0, random_points = 200;
};

// Moves `--config <file>` out of `args` and appends its entries as flags, so
// that under TakeLast the file overrides the command line.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw PreconditionError("--config needs a file");
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty()) return args;
    for (const auto& [k, v] : read_config(path)) {
        args.push_back("--" + k);
        args.push_back(v);
    }
    return args;
}

json failure(const std::string& command, const std::string& kind, const std::string& message) {
    return {{"command", command}, {"status", "error"}, {"kind", kind}, {"message", message}};
}

}  // namespace

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw PreconditionError("cannot read config file " + path);
    std::map<std::string, std::string> m;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        std::string key, value;
        if (eq != std::string::npos) {
            key = trim(line.substr(0, eq));
            value = trim(line.substr(eq + 1));
        } else {
            const auto sp = line.find_first_of(" \t");
            if (sp == std::string::npos) throw PreconditionError("config line " + std::to_string(lineno) + " has no value");
            key = trim(line.substr(0, sp));
            value = trim(line.substr(sp));
        }
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        if (key.empty() || value.empty()) throw PreconditionError("config line " + std::to_string(lineno) + " is malformed");
        m[key] = value;
    }
    return m;
}

std::uint64_t fnv1a(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void write_atomic(const std::string& path, const std::string& content) {
    const std::filesystem::path target(path);
    std::filesystem::path tmp = target;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
        if (!o) throw PreconditionError("cannot write " + tmp.string());
        o << content;
        o.flush();
        if (!o) throw PreconditionError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, target, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw PreconditionError("cannot rename onto " + path + ": " + ec.message());
    }
}

std::vector<double> parse_real_list(const std::string& text) {
    auto to_double = [](const std::string& s) {
        std::size_t pos = 0;
        const double v = std::stod(trim(s), &pos);
        if (pos != trim(s).size()) throw std::invalid_argument(s);
        return v;
    };
    std::vector<double> out;
    try {
        if (text.find(':') != std::string::npos) {
            std::vector<std::string> parts;
            std::stringstream ss(text);
            for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
            if (parts.size() != 3) throw std::invalid_argument(text);
            const double a = to_double(parts[0]), b = to_double(parts[1]);
            const int n = std::stoi(parts[2]);
            if (n < 1) throw std::invalid_argument(text);
            for (int k = 0; k < n; ++k) out.push_back(n == 1 ? a : a + (b - a) * k / (n - 1));
        } else {
            std::stringstream ss(text);
            for (std::string p; std::getline(ss, p, ',');) out.push_back(to_double(p));
        }
    } catch (const std::exception&) {
        throw PreconditionError("cannot parse real list '" + text + "'");
    }
    if (out.empty()) throw PreconditionError("empty real list");
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    try {
        for (std::string p; std::getline(ss, p, ',');) {
            std::size_t pos = 0;
            const std::string t = trim(p);
            out.push_back(std::stoi(t, &pos));
            if (pos != t.size()) throw std::invalid_argument(t);
        }
    } catch (const std::exception&) {
        throw PreconditionError("cannot parse integer list '" + text + "'");
    }
    if (out.empty()) throw PreconditionError("empty integer list");
    return out;
}

int dispatch(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    apply_thread_budget();
    CLI::App app("Vortex patches of the Euler-alpha model", "vortex_alpha");
    app.require_subcommand(1);
    std::map<std::string, std::unique_ptr<Command>> commands;
    auto add = [&](const std::string& name, const std::string& description, auto make) {
        CLI::App* sub = app.add_subcommand(name, description);
        commands[name] = make(sub);
    };
    add("bessel", "Bessel values and identity residuals", [](CLI::App* s) { return std::make_unique<Bessel>(s); });
    add("velocity", "velocity induced by a radial patch", [](CLI::App* s) { return std::make_unique<Velocity>(s); });
    add("spectrum", "bifurcation and equilibrium frequencies", [](CLI::App* s) { return std::make_unique<Spectrum>(s); });
    add("transversality", "transversality margins", [](CLI::App* s) { return std::make_unique<Transversality>(s); });
    add("branch", "V-state branch continuation", [](CLI::App* s) { return std::make_unique<Branch>(s); });
    add("simulate", "radial contour dynamics", [](CLI::App* s) { return std::make_unique<Simulate>(s); });
    add("cantor", "Diophantine exclusion analysis", [](CLI::App* s) { return std::make_unique<Cantor>(s); });
    add("verify", "identity battery", [](CLI::App* s) { return std::make_unique<Verify>(s); });

    std::string command = raw_args.empty() ? "" : raw_args.front();
    try {
        std::vector<std::string> args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        out << failure(command, "validation", e.what()).dump() << "\n";
        return kValidationError;
    } catch (const std::exception& e) {
        out << failure(command, "validation", e.what()).dump() << "\n";
        return kValidationError;
    }

    CLI::App* selected = app.get_subcommands().front();
    command = selected->get_name();
    Command& cmd = *commands.at(command);
    Context ctx;
    ctx.command = command;
    ctx.config = cmd.params().resolved();
    std::string canonical = command;
    for (const auto& [k, v] : ctx.config) canonical += "\n" + k + "=" + v;
    ctx.hash = hex(fnv1a(canonical));

    auto finish = [&](json summary, int code) {
        summary["config_hash"] = ctx.hash;
        summary["outputs"] = ctx.outputs;
        out << summary.dump() << "\n";
        return code;
    };
    try {
        cmd.run(ctx);
    } catch (const ConvergenceError& e) {
        json f = failure(command, "numerical", e.what());
        f["last_iterate"] = e.last_iterate();
        f["last_residual"] = e.last_residual();
        return finish(f, kNumericalFailure);
    } catch (const InstabilityError& e) {
        return finish(failure(command, "numerical", e.what()), kNumericalFailure);
    } catch (const HypothesisViolated& e) {
        json f = failure(command, "numerical", e.what());
        f.update(ctx.summary);
        f["status"] = "error";
        return finish(f, kNumericalFailure);
    } catch (const GeometryError& e) {
        return finish(failure(command, "numerical", e.what()), kNumericalFailure);
    } catch (const std::invalid_argument& e) {
        return finish(failure(command, "validation", e.what()), kValidationError);
    } catch (const std::domain_error& e) {
        return finish(failure(command, "validation", e.what()), kValidationError);
    } catch (const std::exception& e) {
        return finish(failure(command, "numerical", e.what()), kNumericalFailure);
    }
    json summary = ctx.summary;
    summary["command"] = command;
    summary["status"] = "ok";
    return finish(summary, kSuccess);
}

}  // namespace vortex::cli
