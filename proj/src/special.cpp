#include "lbcoh/special.hpp"

#include <gsl/gsl_sf_expint.h>

#include <cmath>

#include "lbcoh/model.hpp"

namespace lbc {

cplx phi1(cplx z) {
    if (std::abs(z) < 0.25) {
        // sum_{k>=0} (-z)^k / (k+1)!
        cplx term = 1.0, sum = 1.0;
        for (int k = 1; k < 30; ++k) {
            term *= -z / static_cast<double>(k + 1);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (1.0 - std::exp(-z)) / z;
}

cplx phi2(cplx z) {
    if (std::abs(z) < 0.5) {
        // sum_{k>=0} (-z)^k / (k+2)!
        cplx term = 0.5, sum = 0.5;
        for (int k = 1; k < 40; ++k) {
            term *= -z / static_cast<double>(k + 2);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    return (z - 1.0 + std::exp(-z)) / (z * z);
}

cplx moment_exp(long m, cplx x) {
    const double ax = std::abs(x);
    if (ax <= static_cast<double>(m) + 1.0) {
        // e^{-x} sum_k x^k / ((m+1)(m+2)...(m+1+k)); every ratio |x|/(m+1+k) is below one
        cplx term = 1.0 / static_cast<double>(m + 1), sum = term;
        for (long k = 1; k < 100000; ++k) {
            term *= x / static_cast<double>(m + 1 + k);
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return std::exp(-x) * sum;
    }
    // forward recursion I_k = (k I_{k-1} - e^{-x}) / x, stable when |x| > m
    const cplx ex = std::exp(-x);
    cplx value = phi1(x);
    for (long k = 1; k <= m; ++k) value = (static_cast<double>(k) * value - ex) / x;
    return value;
}

double laguerre_damped(long n, double x) {
    double scale = -0.5 * x;  // log of the accumulated damping factor
    double prev = 1.0;
    if (n == 0) return std::exp(scale);
    double cur = 1.0 - x;
    for (long k = 1; k < n; ++k) {
        const double next = ((2.0 * k + 1.0 - x) * cur - k * prev) / (k + 1.0);
        prev = cur;
        cur = next;
        const double mag = std::abs(cur);
        if (mag > 1e150) {
            prev /= mag;
            cur /= mag;
            scale += std::log(mag);
        }
    }
    return cur * std::exp(scale);
}

cplx tail_exp_inv_sq(double theta, double X) {
    if (theta == 0.0) return 1.0 / X;
    const double a = std::abs(theta) * X;
    const double th = std::abs(theta);
    const cplx value = std::polar(1.0 / X, a) + th * (gsl_sf_Si(a) - 0.5 * pi) -
                       cplx(0.0, th * gsl_sf_Ci(a));
    return theta > 0.0 ? value : std::conj(value);
}

double tail_lorentz(double X, double k) {
    if (k == 0.0) return 1.0 / X;
    return std::atan2(k, X) / k;
}

}  // namespace lbc
