#pragma once

#include <vector>

#include "lbcoh/model.hpp"

namespace lbc {

// Reservoir replaced by M discrete modes placed symmetrically about omega0 at half-integer
// offsets, omega_j = omega0 + (j + 1/2 - M/2) d_omega, with d_omega = 2 pi / (r (t_end + tau));
// tau is the feedback roundtrip (0 for the Markovian density).
struct DiscreteModeSystem {
    double omega0 = 0.0;
    double d_omega = 0.0;
    std::vector<double> omega;   // [rad/s]
    std::vector<double> lambda;  // sqrt(s(omega_j) d_omega) [rad/s]

    long size() const { return static_cast<long>(omega.size()); }
    double recurrence_time() const { return 2.0 * pi / d_omega; }
};

// Throws RecurrenceTooShort if the spacing would bring the first echo inside t_end.
DiscreteModeSystem make_mode_system(const ModelParams& params, long n_modes, double t_end,
                                    double recurrence_factor = 1.25);

struct OracleResult {
    std::vector<double> times;
    std::vector<cplx> f;          // coefficient of b(0) in b(t)
    double max_norm_drift = 0.0;  // max_t | |f|^2 + sum |h_j|^2 - 1 |
    double dt_ode = 0.0;
};

constexpr double kNormTolerance = 1e-6;

// Classical fixed-step RK4 on (f, h_1..h_M), carried in the frame rotating at omega0.
// dt_ode <= 0 selects 0.05 / max|omega_j - omega0|; the step is then shrunk so that it divides
// the output spacing.  Throws NormDriftExceeded if the norm drifts by more than `tolerance`.
OracleResult integrate(const DiscreteModeSystem& system, const std::vector<double>& times,
                       double dt_ode = 0.0, double tolerance = kNormTolerance);

// Exact solution by diagonalising the (M+1)x(M+1) Hermitian generator; M <= 1024.
OracleResult integrate_exact(const DiscreteModeSystem& system, const std::vector<double>& times);

struct Deviation {
    double max_abs = 0.0;
    double t_worst = 0.0;
};

Deviation compare(const std::vector<double>& times, const std::vector<cplx>& oracle_f,
                  const std::vector<cplx>& analytic_F);

}  // namespace lbc
