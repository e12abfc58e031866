#pragma once

#include <utility>

namespace vortex::specfun {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Above this argument evaluate() switches to exponentially scaled values.
inline constexpr double kScalingThreshold = 700.0;

// K_n uses the Appendix-A series up to this argument and Steed's continued
// fraction for K_0, K_1 followed by upward recurrence beyond it.
inline constexpr double kKSeriesMaxArgument = 2.0;

// Smallest argument at which the Hankel expansion of I_n is attempted. It is
// accepted only once its smallest term drops below the series stopping
// tolerance, so the effective switch grows with n.
inline constexpr double kIAsymptoticMinArgument = 20.0;

// value = mantissa * 2^exponent; mantissa is 0 or in [0.5, 1).
struct ExtendedValue {
    double mantissa = 0.0;
    long exponent = 0;

    static ExtendedValue from(double v);
    double to_double() const;
    double log() const;
    ExtendedValue operator*(const ExtendedValue& o) const;
    ExtendedValue operator*(double s) const;
};

// Exponentially scaled I and K stay finite for every order and argument.
struct BesselEval {
    int order = 0;
    double argument = 0.0;
    double value_i = 0.0;  // I_n(x), or e^{-x} I_n(x) when scaled
    double value_k = 0.0;  // K_n(x), or e^{x} K_n(x) when scaled
    bool scaled = false;
};

// Negative orders follow I_{-n} = I_n and K_{-n} = K_n.
double bessel_i(int n, double x);
double bessel_k(int n, double x);
double bessel_i_scaled(int n, double x);  // e^{-x} I_n(x)
double bessel_k_scaled(int n, double x);  // e^{x} K_n(x)
ExtendedValue bessel_i_extended(int n, double x);  // e^{-x} I_n(x)
ExtendedValue bessel_k_extended(int n, double x);  // e^{x} K_n(x)

// Whether I_n(x) is taken from the Hankel expansion rather than the series.
bool uses_i_asymptotic(int n, double x);

// Scaled iff x > kScalingThreshold.
BesselEval evaluate(int n, double x);

// I_n(x) K_n(x), finite for large n where the factors alone over/underflow.
double product_ik(int n, double x);

// Fast double-only paths for the order-0 kernel.
double bessel_i0(double x);
double bessel_k0(double x);

// |I_n' K_n - I_n K_n' - 1/x| with derivatives from the order recurrences.
double check_wronskian(int n, double x);

// (x I_n'/I_n < sqrt(x^2+n^2), x K_n'/K_n < -sqrt(x^2+n^2)).
std::pair<bool, bool> check_ratio_bounds(int n, double x);

}  // namespace vortex::specfun
