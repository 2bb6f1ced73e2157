#pragma once

#include <complex>

namespace lbc {

using cplx = std::complex<double>;

// (1 - e^{-z}) / z, accurate for small |z|.
cplx phi1(cplx z);

// (z - 1 + e^{-z}) / z^2, accurate for small |z|.
cplx phi2(cplx z);

// I_m(x) = int_0^1 u^m e^{-x u} du for m >= 0 and Re x >= 0.
cplx moment_exp(long m, cplx x);

// L_n(x) e^{-x/2} via the three-term recurrence with exponent tracking (x >= 0).
double laguerre_damped(long n, double x);

// int_X^inf e^{i x theta} / x^2 dx for X > 0 and any real theta.
cplx tail_exp_inv_sq(double theta, double X);

// int_X^inf dx / (x^2 + k^2) for X > 0, k >= 0.
double tail_lorentz(double X, double k);

}  // namespace lbc
