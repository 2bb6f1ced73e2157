#pragma once

#include <complex>
#include <vector>

#include "lbcoh/model.hpp"
#include "lbcoh/propagators.hpp"

namespace lbc {

struct KernelOptions {
    int threads = 0;             // 0 = OpenMP default
    bool serial_reference = false;
    bool band_tails = true;      // add the analytic contribution of frequencies outside the band
};

// Integrated kernels on the time grid.  Frequency integrals are stored already reduced:
//   Q(t)      = int s |G|^2 d omega                (unitarity: |F|^2 + Q = 1)
//   R_vac(t)  = int s |N|^2 d omega
//   R_th(t)   = int s 2 n(|omega|) |N|^2 d omega   (thermal excess, infrared-cut when Markovian)
//   GN(t)     = int s G N^* d omega
// where G, N are shapes (divided by g) so that the density s appears once.
struct KernelSet {
    TimeGrid times;
    double D = 0.0;
    std::vector<cplx> gamma;   // int_0^t F
    std::vector<cplx> Gamma2;  // int_0^t gamma
    std::vector<double> phi;
    std::vector<double> Q, R_vac, R_th;
    std::vector<cplx> GN;
    // portions of the above contributed by the analytic band tails
    std::vector<double> Q_tail, R_vac_tail, R_th_tail;
    std::vector<cplx> GN_tail;
    long n_modes = 0;

    std::vector<cplx> gammaD() const;
    std::vector<double> phiD() const;
    std::vector<double> R_total() const;  // R_vac + R_th
};

std::vector<cplx> compute_gamma(const PropagatorSet& props, const ModelParams& params);
std::vector<cplx> compute_Gamma2(const PropagatorSet& props, const ModelParams& params,
                                 const std::vector<cplx>& gamma);

// N(t, omega) = int_0^t G(t', omega) dt' for one frequency (shape, divided by g).
std::vector<cplx> compute_N(const PropagatorSet& props, const ModelParams& params, double omega);

// Frequency-reduced kernels and the phase phi(t).
KernelSet compute_kernels(const ModelParams& params, const PropagatorSet& props,
                          const FrequencyGrid& grid, const KernelOptions& options = {});

// Phase from gamma and GN:  phi = Im int_0^t (F gamma^* + GN) dt'.
std::vector<double> compute_phi(const ModelParams& params, const PropagatorSet& props,
                                const std::vector<cplx>& gamma, const std::vector<cplx>& GN);

// Per-column weights s(omega) w and s(omega) 2 n(|omega|) w (thermal excess, masked).
struct ColumnWeights {
    std::vector<double> omega, vac, th;
};
ColumnWeights column_weights(const ModelParams& params, const FrequencyGrid& grid);

}  // namespace lbc
