#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "vortex/errors.hpp"
#include "vortex/specfun.hpp"

using namespace vortex::specfun;
using oracle::rel_err;

namespace {

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
    return out;
}

}  // namespace

TEST_CASE("I_n at the origin is the first series term") {
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(bessel_i(1, 0.0) == 0.0);
    CHECK(bessel_i(7, 0.0) == 0.0);
}

TEST_CASE("I_n matches the extended-precision series") {
    CHECK(rel_err(bessel_i(3, 2.5), oracle::i(3, 2.5)) < 1e-12);
    for (int n : {0, 1, 2, 5, 10, 32}) {
        for (double x : log_grid(1e-3, 15.0, 25)) {
            CHECK_MESSAGE(rel_err(bessel_i(n, x), oracle::i(n, x)) < 1e-13, "n=" << n << " x=" << x);
        }
    }
}

TEST_CASE("I_n is continuous across the Hankel switch") {
    for (int n : {0, 1, 3, 8}) {
        double x = kIAsymptoticMinArgument;
        while (!uses_i_asymptotic(n, x)) x += 0.25;
        double lo = x - 0.25;
        double hi = x;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (uses_i_asymptotic(n, mid) ? hi : lo) = mid;
        }
        const double below = bessel_i_scaled(n, lo);
        const double above = bessel_i_scaled(n, hi);
        CHECK_MESSAGE(rel_err(below, above) < 1e-9, "n=" << n << " switch=" << hi);
        CHECK(rel_err(above, oracle::i_scaled(n, hi)) < 1e-13);
        CHECK(rel_err(below, oracle::i_scaled(n, lo)) < 1e-13);
    }
}

TEST_CASE("K_n small-argument logarithm and large-argument decay") {
    const double x = 1e-6;
    CHECK(std::fabs(bessel_k(0, x) + std::log(x / 2) + kEulerGamma) < 1e-5);
    // First-order Hankel asymptotics; the next term (4n^2-1)/(8x) limits this to n <= 1.
    for (int n : {0, 1}) {
        const double ratio = bessel_k(n, 50.0) * std::sqrt(2 * 50.0 / std::numbers::pi) * std::exp(50.0);
        CHECK(std::fabs(ratio - 1.0) < 0.02);
    }
}

TEST_CASE("K_n matches the extended-precision series") {
    CHECK(rel_err(bessel_k(2, 1.3), oracle::k(2, 1.3)) < 1e-11);
    for (int n : {0, 1, 2, 3, 7, 16, 32}) {
        for (double x : log_grid(1e-3, 40.0, 31)) {
            CHECK_MESSAGE(rel_err(bessel_k(n, x), oracle::k(n, x)) < 1e-12, "n=" << n << " x=" << x);
        }
    }
}

TEST_CASE("scaled values beyond the overflow threshold") {
    for (int n : {0, 1, 4, 20}) {
        const BesselEval e = evaluate(n, 900.0);
        CHECK(e.scaled);
        CHECK(rel_err(e.value_i, oracle::i_scaled(n, 900.0)) < 1e-12);
        CHECK(rel_err(e.value_k, oracle::k_scaled(n, 900.0)) < 1e-12);
    }
    const BesselEval e = evaluate(3, 5.0);
    CHECK_FALSE(e.scaled);
    CHECK(e.value_i == bessel_i(3, 5.0));
}

TEST_CASE("negative orders follow the symmetry convention") {
    for (int n : {1, 2, 9}) {
        CHECK(bessel_i(-n, 1.7) == bessel_i(n, 1.7));
        CHECK(bessel_k(-n, 1.7) == bessel_k(n, 1.7));
    }
}

TEST_CASE("domain errors") {
    CHECK_THROWS_AS(bessel_i(0, -1.0), vortex::DomainError);
    CHECK_THROWS_AS(bessel_k(0, 0.0), vortex::DomainError);
    CHECK_THROWS_AS(bessel_k(2, -0.5), vortex::DomainError);
    CHECK_THROWS_AS(product_ik(0, 1.0), vortex::DomainError);
}

TEST_CASE("product I_n K_n") {
    CHECK(rel_err(product_ik(1, 1.0), oracle::product_ik(1, 1.0)) < 1e-11);
    for (int n = 1; n <= 64; ++n) {
        for (double x : log_grid(0.01, 100.0, 41)) {
            const double p = product_ik(n, x);
            CHECK(p > 0.0);
            CHECK(p < 1.0 / (2.0 * n));
        }
        CHECK(rel_err(product_ik(n, 1e-8), 1.0 / (2.0 * n)) < 1e-6);
    }
    // Large orders where the factors are not representable as doubles.
    for (int n : {200, 500}) {
        CHECK(rel_err(product_ik(n, 1.0), oracle::product_ik(n, 1.0)) < 1e-12);
        CHECK(rel_err(product_ik(n, 300.0), oracle::product_ik(n, 300.0)) < 1e-11);
    }
}

TEST_CASE("I_n K_n is strictly decreasing in x") {
    for (int n : {1, 2, 5, 17, 64}) {
        const auto xs = log_grid(1e-3, 1e3, 400);
        for (std::size_t i = 1; i < xs.size(); ++i) {
            CHECK(product_ik(n, xs[i]) < product_ik(n, xs[i - 1]));
        }
    }
}

TEST_CASE("Wronskian examples") {
    CHECK(check_wronskian(2, 1.7) < 4 * std::numeric_limits<double>::epsilon());
    CHECK(check_wronskian(0, 10.0) < 1e-11);
    CHECK(check_wronskian(5, 0.01) < 1e-10 * 100);
}

TEST_CASE("Wronskian on the log grid") {
    for (int n = 0; n <= 32; ++n) {
        for (double x : log_grid(1e-3, 1e3, 61)) {
            CHECK_MESSAGE(check_wronskian(n, x) <= 1e-10 / x, "n=" << n << " x=" << x);
        }
    }
}

TEST_CASE("ratio bounds") {
    CHECK(check_ratio_bounds(3, 2.0) == std::pair{true, true});
    CHECK(check_ratio_bounds(0, 0.5) == std::pair{true, true});
    CHECK(check_ratio_bounds(20, 0.1) == std::pair{true, true});
    for (int n = 0; n <= 32; n += 4) {
        for (double x : log_grid(1e-3, 1e3, 31)) CHECK(check_ratio_bounds(n, x) == std::pair{true, true});
    }
}

TEST_CASE("order recurrence I_{n-1} - I_{n+1} = (2n/x) I_n") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> order(1, 40);
    std::uniform_real_distribution<double> logx(std::log(1e-2), std::log(800.0));
    for (int trial = 0; trial < 300; ++trial) {
        const int n = order(rng);
        const double x = std::exp(logx(rng));
        const double lhs = bessel_i_scaled(n - 1, x) - bessel_i_scaled(n + 1, x);
        const double rhs = 2.0 * n / x * bessel_i_scaled(n, x);
        CHECK_MESSAGE(std::fabs(lhs - rhs) <= 1e-10 * std::fabs(rhs), "n=" << n << " x=" << x);
    }
}

TEST_CASE("antiderivative of u K_0(u)") {
    using boost::math::quadrature::gauss_kronrod;
    for (double X : {0.3, 1.0, 4.0, 12.0}) {
        const double integral =
            gauss_kronrod<double, 61>::integrate([](double u) { return u * bessel_k0(u); }, 0.0, X, 15, 1e-13);
        CHECK(std::fabs(integral - (1.0 - X * bessel_k(1, X))) < 1e-11);
    }
}

TEST_CASE("high-order asymptotics of I_nu") {
    const double nu = 60.0;
    const double x = 1.0;
    const double ratio = bessel_i(60, x) * std::sqrt(2 * std::numbers::pi * nu) * std::pow(2 * nu / (std::exp(1.0) * x), nu);
    CHECK(std::fabs(ratio - 1.0) < 0.05);
}

TEST_CASE("fast order-0 paths agree with the general ones") {
    for (double x : log_grid(1e-4, 50.0, 60)) {
        CHECK(rel_err(bessel_k0(x), oracle::k(0, x)) < 1e-13);
        CHECK(rel_err(bessel_i0(x), oracle::i(0, x)) < 1e-13);
    }
}
