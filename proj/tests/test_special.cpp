#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "lbcoh/model.hpp"
#include "lbcoh/special.hpp"

using namespace lbc;

namespace {

// Composite Simpson on [a, b] with n (even) panels.
template <class F>
cplx simpson(F f, double a, double b, long n) {
    const double h = (b - a) / static_cast<double>(n);
    cplx s = f(a) + f(b);
    for (long i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + static_cast<double>(i) * h);
    return s * h / 3.0;
}

// Binomial form sum_l C(n,l) (-x)^l / l!, in extended precision to absorb the cancellation.
double laguerre_binomial(long n, double x) {
    long double sum = 0.0L, term = 1.0L;
    for (long l = 0; l <= n; ++l) {
        if (l > 0) term *= -static_cast<long double>(x) * static_cast<long double>(n - l + 1) /
                          (static_cast<long double>(l) * static_cast<long double>(l));
        sum += term;
    }
    return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("phi1 and phi2 match their definitions away from zero and their series near zero") {
    for (cplx z : {cplx(2.0, 0.0), cplx(0.3, 5.0), cplx(1e-3, 40.0), cplx(7.0, -2.0)}) {
        CHECK(std::abs(phi1(z) - (1.0 - std::exp(-z)) / z) < 1e-14);
        CHECK(std::abs(phi2(z) - (z - 1.0 + std::exp(-z)) / (z * z)) < 1e-14);
    }
    CHECK(std::abs(phi1(0.0) - 1.0) < 1e-16);
    CHECK(std::abs(phi2(0.0) - 0.5) < 1e-16);
    // two-term Taylor expansions at |z| = 1e-6
    const cplx z(1e-6, 1e-6);
    CHECK(std::abs(phi1(z) - (1.0 - z / 2.0 + z * z / 6.0)) < 1e-18);
    CHECK(std::abs(phi2(z) - (0.5 - z / 6.0 + z * z / 24.0)) < 1e-18);
}

TEST_CASE("moment_exp agrees with direct quadrature") {
    for (long m : {0L, 1L, 3L, 10L, 40L}) {
        for (cplx x : {cplx(0.0, 0.0), cplx(0.5, 2.0), cplx(3.0, -30.0), cplx(60.0, 5.0), cplx(0.0, 100.0)}) {
            const auto f = [&](double u) { return std::pow(u, static_cast<double>(m)) * std::exp(-x * u); };
            const cplx ref = simpson(f, 0.0, 1.0, 20000);
            CHECK(std::abs(moment_exp(m, x) - ref) < 1e-10 * std::max(1.0, std::abs(ref)));
        }
    }
}

TEST_CASE("laguerre_damped") {
    for (long n : {0L, 1L, 2L, 5L, 12L}) {
        for (double x : {0.0, 0.1, 1.0, 3.7, 10.0}) {
            CHECK(laguerre_damped(n, x) ==
                  doctest::Approx(laguerre_binomial(n, x) * std::exp(-0.5 * x)).epsilon(1e-13).scale(1.0));
        }
    }
    // n = 1 vanishes at x = 1
    CHECK(std::abs(laguerre_damped(1, 1.0)) < 1e-16);
    // large n stays finite and bounded by one (|L_n(x) e^{-x/2}| <= 1)
    for (double x : {0.01, 1.0, 50.0, 1e3}) {
        const double v = laguerre_damped(10000, x);
        CHECK(std::isfinite(v));
        CHECK(std::abs(v) <= 1.0);
    }
}

TEST_CASE("tail_exp_inv_sq") {
    CHECK(tail_exp_inv_sq(0.0, 2.0) == cplx(0.5, 0.0));
    for (double theta : {3.0, -3.0, 0.25}) {
        const double X = 1.0, Y = 400.0;
        const auto f = [&](double x) { return std::polar(1.0, theta * x) / (x * x); };
        // finite part plus the leading asymptotic terms of the remainder,
        // e^{i theta Y} (i / theta) sum_k (k+1)! (-i / theta)^k / Y^{k+2}
        const cplx I(0.0, 1.0);
        cplx rest = 0.0, c = 1.0;
        double fact = 1.0;
        for (int k = 0; k < 4; ++k) {
            fact *= static_cast<double>(k + 1);
            rest += fact * c / std::pow(Y, k + 2);
            c *= -I / theta;
        }
        rest *= I / theta * std::polar(1.0, theta * Y);
        const cplx ref = simpson(f, X, Y, 2000000) + rest;
        CHECK(std::abs(tail_exp_inv_sq(theta, X) - ref) < 1e-9);
    }
}

TEST_CASE("tail_lorentz") {
    CHECK(tail_lorentz(2.0, 0.0) == doctest::Approx(0.5));
    for (double k : {0.1, 1.0, 30.0}) {
        CHECK(tail_lorentz(1.5, k) == doctest::Approx((0.5 * pi - std::atan(1.5 / k)) / k).epsilon(1e-14));
    }
}
