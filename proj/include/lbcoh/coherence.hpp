#pragma once

#include <complex>
#include <vector>

#include "lbcoh/kernels.hpp"
#include "lbcoh/model.hpp"

namespace lbc {

struct CoherenceTrace {
    TimeGrid times;
    std::vector<cplx> sigma_S, sigma_LB, sigma_R, P;
    std::vector<double> eta;
};

std::vector<cplx> sigma_S(const KernelSet& kernels, const ModelParams& params);
std::vector<cplx> sigma_LB_thermal(const std::vector<cplx>& gammaD, double T_lb, double omega0);
std::vector<cplx> sigma_LB_fock(const std::vector<cplx>& gammaD, long n);
std::vector<cplx> sigma_R_thermal(const KernelSet& kernels);

// LB factor for whatever initial state the parameters select.
std::vector<cplx> sigma_LB(const KernelSet& kernels, const ModelParams& params);

CoherenceTrace assemble(const TimeGrid& times, std::vector<cplx> sS, std::vector<cplx> sLB,
                        std::vector<cplx> sR);

// ln eta(t) built from the kernels directly; stays finite where eta itself underflows.
std::vector<double> log_eta(const KernelSet& kernels, const ModelParams& params);

// Closed form for a Markovian reservoir at zero temperature with a thermal link boson.
// It corresponds to the flat density 2 kappa / pi (see MarkovDensity::Doubled).
cplx markov_closed_form(double t, const ModelParams& params);

// Independent-boson limit (link boson decoupled from its reservoir).
cplx ibm_closed_form(double t, const ModelParams& params);

struct SimulationOptions {
    double t_end = 200e-12;
    double dt = 0.0;  // 0 = largest admissible step
    FrequencyOptions frequency;
    KernelOptions kernel;
};

struct Simulation {
    ModelParams params;
    TimeGrid times;
    FrequencyGrid frequencies;
    PropagatorSet propagators;
    KernelSet kernels;
    CoherenceTrace trace;
};

Simulation simulate(const ModelParams& params, const SimulationOptions& options = {});

// max_t | |F|^2 + Q - 1 |; zero for an exact propagator with a unitary density.
double unitarity_defect(const Simulation& sim);

}  // namespace lbc
