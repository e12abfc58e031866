#include "vortex/specfun.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <optional>

#include "vortex/errors.hpp"

namespace vortex::specfun {

namespace {

constexpr double kSeriesTolerance = 1e-17;
constexpr double kLn2Hi = 6.93147180369123816490e-01;
constexpr double kLn2Lo = 1.90821492927058770002e-10;

// Neumaier compensated sum.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double v) {
        const double t = sum + v;
        if (std::fabs(sum) >= std::fabs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    void scale(double f) {
        sum *= f;
        carry *= f;
    }
    double value() const { return sum + carry; }
};

ExtendedValue normalized(double m, long e) {
    if (m == 0.0 || !std::isfinite(m)) return {m, 0};
    int k = 0;
    const double f = std::frexp(m, &k);
    return {f, e + k};
}

// e^{s x} for s = +1 or -1, with the binary exponent split off exactly.
ExtendedValue exp_extended(double x, int s) {
    const double t = s * x;
    if (std::fabs(t) < 700.0) return normalized(std::exp(t), 0);
    const double k = std::floor(t / std::numbers::ln2);
    const double r = (t - k * kLn2Hi) - k * kLn2Lo;
    return normalized(std::exp(r), static_cast<long>(k));
}

ExtendedValue divide(const ExtendedValue& a, const ExtendedValue& b) {
    return normalized(a.mantissa / b.mantissa, a.exponent - b.exponent);
}

// I_n(x), unscaled, power series.
ExtendedValue i_series(int n, double x) {
    if (x == 0.0) return ExtendedValue::from(n == 0 ? 1.0 : 0.0);
    const double h = 0.5 * x;
    ExtendedValue lead = ExtendedValue::from(1.0);
    for (int k = 1; k <= n; ++k) lead = lead * (h / k);

    const double q = h * h;
    CompensatedSum s;
    s.add(1.0);
    double term = 1.0;
    long shift = 0;
    for (int m = 0;; ++m) {
        const double denom = (m + 1.0) * (n + m + 1.0);
        term *= q / denom;
        s.add(term);
        if (denom > q && term < kSeriesTolerance * s.sum) break;
        if (s.sum > 0x1p900) {
            s.scale(0x1p-900);
            term *= 0x1p-900;
            shift += 900;
        }
    }
    return normalized(s.value(), shift) * lead;
}

// e^{-x} I_n(x) from the Hankel expansion, if it reaches the series tolerance.
std::optional<double> i_asymptotic_scaled(int n, double x) {
    const double mu = 4.0 * n * static_cast<double>(n);
    CompensatedSum s;
    s.add(1.0);
    double term = 1.0;
    for (int k = 1; k < 400; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -term * (mu - odd * odd) / (8.0 * k * x);
        if (std::fabs(next) > std::fabs(term)) return std::nullopt;
        term = next;
        s.add(term);
        if (std::fabs(term) < kSeriesTolerance * std::fabs(s.sum)) {
            return s.value() / std::sqrt(2.0 * std::numbers::pi * x);
        }
    }
    return std::nullopt;
}

// K_n(x), unscaled, Appendix-A series; intended for x <= kKSeriesMaxArgument.
ExtendedValue k_series(int n, double x) {
    const double h = 0.5 * x;
    const double q = h * h;
    const double lg = std::log(h);

    if (n == 0) {
        CompensatedSum si;
        CompensatedSum sp;
        double u = 1.0;
        double psi = -kEulerGamma;
        si.add(1.0);
        sp.add(psi);
        for (int m = 1; m < 200; ++m) {
            u *= q / (static_cast<double>(m) * m);
            psi += 1.0 / m;
            si.add(u);
            sp.add(u * psi);
            if (u * (1.0 + std::fabs(psi)) < 1e-18 * si.sum) break;
        }
        return ExtendedValue::from(-lg * si.value() + sp.value());
    }

    // Every piece is expressed relative to lead = (1/2)(x/2)^{-n}(n-1)!.
    CompensatedSum finite;
    finite.add(1.0);
    double c = 1.0;
    for (int k = 1; k < n; ++k) {
        c *= -q / (static_cast<double>(k) * (n - k));
        finite.add(c);
    }

    double rho = 1.0;  // (x/2)^{2n} / (n! (n-1)!)
    for (int k = 1; k <= n && rho != 0.0; ++k) {
        rho *= q / k;
        if (k < n) rho /= k;
        if (rho < 1e-300) rho = 0.0;
    }

    CompensatedSum si;
    CompensatedSum sp;
    if (rho != 0.0) {
        double u = 1.0;
        double psi1 = -kEulerGamma;
        double psi2 = -kEulerGamma;
        for (int k = 1; k <= n; ++k) psi2 += 1.0 / k;
        si.add(1.0);
        sp.add(psi1 + psi2);
        for (int k = 1; k < 200; ++k) {
            u *= q / (static_cast<double>(k) * (n + k));
            psi1 += 1.0 / k;
            psi2 += 1.0 / (n + k);
            si.add(u);
            sp.add(u * (psi1 + psi2));
            if (u * (1.0 + std::fabs(psi1 + psi2)) < 1e-18) break;
        }
    }
    const double sign_odd = (n % 2 == 1) ? 1.0 : -1.0;  // (-1)^{n+1}
    const double rel = finite.value() +
                       rho * (sign_odd * 2.0 * lg * si.value() - sign_odd * sp.value());

    ExtendedValue lead = ExtendedValue::from(0.5);
    for (int k = 1; k <= n; ++k) lead = lead * (1.0 / h);
    for (int k = 1; k < n; ++k) lead = lead * static_cast<double>(k);
    return lead * rel;
}

// Steed's continued fraction (Temme) for e^x K_0(x), e^x K_1(x), x >= 2.
void k01_continued_fraction(double x, double& k0, double& k1) {
    const double a1 = 0.25;
    double b = 2.0 * (1.0 + x);
    double d = 1.0 / b;
    double h = d;
    double delh = d;
    double q1 = 0.0;
    double q2 = 1.0;
    double q = a1;
    double c = a1;
    double a = -a1;
    double s = 1.0 + q * delh;
    for (int i = 1; i < 10000; ++i) {
        a -= 2 * i;
        c = -a * c / (i + 1.0);
        const double qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        const double dels = q * delh;
        s += dels;
        if (std::fabs(dels / s) < 1e-17) break;
    }
    h *= a1;
    k0 = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
    k1 = k0 * (x + 0.5 - h) / x;
}

void require_nonnegative(double x) {
    if (!(x >= 0.0)) throw DomainError("Bessel I: argument must be >= 0");
}

void require_positive(double x) {
    if (!(x > 0.0)) throw DomainError("Bessel K: argument must be > 0");
}

}  // namespace

ExtendedValue ExtendedValue::from(double v) { return normalized(v, 0); }

double ExtendedValue::to_double() const {
    if (exponent > 4096) return std::ldexp(mantissa, 4096);
    if (exponent < -4096) return std::ldexp(mantissa, -4096);
    return std::ldexp(mantissa, static_cast<int>(exponent));
}

double ExtendedValue::log() const {
    return std::log(mantissa) + static_cast<double>(exponent) * std::numbers::ln2;
}

ExtendedValue ExtendedValue::operator*(const ExtendedValue& o) const {
    return normalized(mantissa * o.mantissa, exponent + o.exponent);
}

ExtendedValue ExtendedValue::operator*(double s) const {
    return normalized(mantissa * s, exponent);
}

ExtendedValue bessel_i_extended(int n, double x) {
    require_nonnegative(x);
    n = std::abs(n);
    if (x >= kIAsymptoticMinArgument) {
        if (const auto a = i_asymptotic_scaled(n, x)) return ExtendedValue::from(*a);
    }
    return i_series(n, x) * exp_extended(x, -1);
}

ExtendedValue bessel_k_extended(int n, double x) {
    require_positive(x);
    n = std::abs(n);
    if (x <= kKSeriesMaxArgument) return k_series(n, x) * std::exp(x);
    double km = 0.0;
    double kc = 0.0;
    k01_continued_fraction(x, km, kc);
    if (n == 0) return ExtendedValue::from(km);
    long shift = 0;
    for (int k = 1; k < n; ++k) {
        const double kn = km + (2.0 * k / x) * kc;
        km = kc;
        kc = kn;
        if (kc > 0x1p800) {
            km *= 0x1p-800;
            kc *= 0x1p-800;
            shift += 800;
        }
    }
    return normalized(kc, shift);
}

bool uses_i_asymptotic(int n, double x) {
    require_nonnegative(x);
    return x >= kIAsymptoticMinArgument && i_asymptotic_scaled(std::abs(n), x).has_value();
}

double bessel_i(int n, double x) {
    require_nonnegative(x);
    n = std::abs(n);
    if (x >= kIAsymptoticMinArgument) {
        if (const auto a = i_asymptotic_scaled(n, x)) return *a * std::exp(x);
    }
    return i_series(n, x).to_double();
}

double bessel_k(int n, double x) {
    require_positive(x);
    n = std::abs(n);
    if (x <= kKSeriesMaxArgument) return k_series(n, x).to_double();
    return (bessel_k_extended(n, x) * exp_extended(x, -1)).to_double();
}

double bessel_i_scaled(int n, double x) { return bessel_i_extended(n, x).to_double(); }

double bessel_k_scaled(int n, double x) { return bessel_k_extended(n, x).to_double(); }

BesselEval evaluate(int n, double x) {
    require_positive(x);
    BesselEval out;
    out.order = std::abs(n);
    out.argument = x;
    out.scaled = x > kScalingThreshold;
    if (out.scaled) {
        out.value_i = bessel_i_scaled(n, x);
        out.value_k = bessel_k_scaled(n, x);
    } else {
        out.value_i = bessel_i(n, x);
        out.value_k = bessel_k(n, x);
    }
    return out;
}

double product_ik(int n, double x) {
    if (n < 1) throw DomainError("product_ik: order must be >= 1");
    require_positive(x);
    if (x <= kKSeriesMaxArgument) return (i_series(n, x) * k_series(n, x)).to_double();
    return (bessel_i_extended(n, x) * bessel_k_extended(n, x)).to_double();
}

double bessel_i0(double x) {
    require_nonnegative(x);
    if (x < kIAsymptoticMinArgument) {
        const double q = 0.25 * x * x;
        double u = 1.0;
        double s = 1.0;
        for (int m = 1; m < 500; ++m) {
            u *= q / (static_cast<double>(m) * m);
            s += u;
            if (u < kSeriesTolerance * s) break;
        }
        return s;
    }
    return bessel_i(0, x);
}

double bessel_k0(double x) {
    require_positive(x);
    if (x <= kKSeriesMaxArgument) return k_series(0, x).to_double();
    double k0 = 0.0;
    double k1 = 0.0;
    k01_continued_fraction(x, k0, k1);
    return k0 * std::exp(-x);
}

double check_wronskian(int n, double x) {
    require_positive(x);
    n = std::abs(n);
    const ExtendedValue im = bessel_i_extended(n - 1, x);
    const ExtendedValue i0 = bessel_i_extended(n, x);
    const ExtendedValue ip = bessel_i_extended(n + 1, x);
    const ExtendedValue km = bessel_k_extended(n - 1, x);
    const ExtendedValue k0 = bessel_k_extended(n, x);
    const ExtendedValue kp = bessel_k_extended(n + 1, x);
    // I' = (I_{n-1} + I_{n+1})/2, K' = -(K_{n-1} + K_{n+1})/2.
    const double w = 0.5 * ((im * k0).to_double() + (ip * k0).to_double() +
                            (i0 * km).to_double() + (i0 * kp).to_double());
    return std::fabs(w - 1.0 / x);
}

std::pair<bool, bool> check_ratio_bounds(int n, double x) {
    require_positive(x);
    n = std::abs(n);
    const double bound = std::hypot(x, static_cast<double>(n));
    const ExtendedValue i0 = bessel_i_extended(n, x);
    const double ri = 0.5 * x *
                      (divide(bessel_i_extended(n - 1, x), i0).to_double() +
                       divide(bessel_i_extended(n + 1, x), i0).to_double());
    const ExtendedValue k0 = bessel_k_extended(n, x);
    const double rk = -0.5 * x *
                      (divide(bessel_k_extended(n - 1, x), k0).to_double() +
                       divide(bessel_k_extended(n + 1, x), k0).to_double());
    return {ri < bound, rk < -bound};
}

}  // namespace vortex::specfun
