#pragma once

// High-precision reference evaluations, independent of the library code paths.

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>

namespace oracle {

using mp = boost::multiprecision::cpp_bin_float_50;

// Direct power series for I_n with a fixed number of terms.
inline mp bessel_i_series(int n, const mp& x, int terms = 200) {
    const mp h = x / 2;
    mp lead = 1;
    for (int k = 1; k <= n; ++k) lead *= h / k;
    mp term = lead;
    mp sum = 0;
    for (int m = 0; m < terms; ++m) {
        sum += term;
        term *= h * h / ((m + 1) * mp(n + m + 1));
    }
    return sum;
}

// Appendix-A series for K_n. Cancellation costs ~x/ln(10) digits; fine for x <~ 20.
inline mp bessel_k_series(int n, const mp& x, int terms = 200) {
    const mp h = x / 2;
    const mp q = h * h;
    const mp gamma = boost::math::constants::euler<mp>();
    mp finite = 0;
    if (n > 0) {
        for (int k = 0; k < n; ++k) {
            mp t = boost::math::factorial<mp>(n - k - 1) / boost::math::factorial<mp>(k);
            t *= pow(-q, k);
            finite += t;
        }
        finite *= pow(h, -n) / 2;
    }
    const mp logterm = ((n % 2 == 1) ? 1 : -1) * log(h) * bessel_i_series(n, x, terms);
    mp psi1 = -gamma;
    mp psi2 = -gamma;
    for (int k = 1; k <= n; ++k) psi2 += mp(1) / k;
    mp u = pow(h, n) / boost::math::factorial<mp>(n);
    mp tail = 0;
    for (int k = 0; k < terms; ++k) {
        tail += (psi1 + psi2) * u;
        u *= q / ((k + 1) * mp(n + k + 1));
        psi1 += mp(1) / (k + 1);
        psi2 += mp(1) / (n + k + 1);
    }
    tail *= ((n % 2 == 0) ? 1 : -1) * mp(0.5);
    return finite + logterm + tail;
}

inline double i(int n, double x) {
    return static_cast<double>(bessel_i_series(n, mp(x), 400));
}

inline double k(int n, double x) {
    if (x <= 12.0) return static_cast<double>(bessel_k_series(n, mp(x), 400));
    return static_cast<double>(boost::math::cyl_bessel_k(mp(n), mp(x)));
}

inline double i_scaled(int n, double x) {
    return static_cast<double>(boost::math::cyl_bessel_i(mp(n), mp(x)) * exp(-mp(x)));
}

inline double k_scaled(int n, double x) {
    return static_cast<double>(boost::math::cyl_bessel_k(mp(n), mp(x)) * exp(mp(x)));
}

inline double product_ik(int n, double x) {
    if (x <= 12.0) return static_cast<double>(bessel_i_series(n, mp(x), 400) * bessel_k_series(n, mp(x), 400));
    return static_cast<double>(boost::math::cyl_bessel_i(mp(n), mp(x)) * boost::math::cyl_bessel_k(mp(n), mp(x)));
}

inline double rel_err(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace oracle
