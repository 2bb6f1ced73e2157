#include "lbcoh/coherence.hpp"

#include <algorithm>
#include <cmath>

#include "lbcoh/errors.hpp"
#include "lbcoh/special.hpp"

namespace lbc {

std::vector<cplx> sigma_S(const KernelSet& kernels, const ModelParams& params) {
    const ModelParams p = params.validated ? params : validate(params);
    std::vector<cplx> out(kernels.phi.size());
    const double D2 = p.D * p.D;
    for (long n = 0; n < kernels.times.size(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        const double t = kernels.times.t(n);
        out[i] = p.p0 * std::polar(1.0, -p.omega_eg * t - D2 * kernels.phi[i]);
    }
    return out;
}

std::vector<cplx> sigma_LB_thermal(const std::vector<cplx>& gammaD, double T_lb, double omega0) {
    const double nb = bose_occupation(omega0, T_lb);
    std::vector<cplx> out(gammaD.size());
    for (std::size_t i = 0; i < gammaD.size(); ++i)
        out[i] = std::exp(-0.5 * std::norm(gammaD[i]) * (2.0 * nb + 1.0));
    return out;
}

std::vector<cplx> sigma_LB_fock(const std::vector<cplx>& gammaD, long n) {
    if (n < 0) throw Error(ErrorCode::InvalidParameter, "Fock occupation must be >= 0");
    std::vector<cplx> out(gammaD.size());
    for (std::size_t i = 0; i < gammaD.size(); ++i) out[i] = laguerre_damped(n, std::norm(gammaD[i]));
    return out;
}

std::vector<cplx> sigma_R_thermal(const KernelSet& kernels) {
    std::vector<cplx> out(kernels.R_vac.size());
    const double D2 = kernels.D * kernels.D;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::exp(-0.5 * D2 * (kernels.R_vac[i] + kernels.R_th[i]));
    return out;
}

std::vector<cplx> sigma_LB(const KernelSet& kernels, const ModelParams& params) {
    const auto gD = kernels.gammaD();
    switch (params.lb_initial.kind) {
        case LbInitial::Kind::Thermal: return sigma_LB_thermal(gD, params.T_lb, params.omega0);
        case LbInitial::Kind::Vacuum: return sigma_LB_thermal(gD, 0.0, params.omega0);
        case LbInitial::Kind::Fock: return sigma_LB_fock(gD, params.lb_initial.fock_n);
    }
    return sigma_LB_thermal(gD, params.T_lb, params.omega0);
}

std::vector<double> log_eta(const KernelSet& kernels, const ModelParams& params) {
    const ModelParams p = params.validated ? params : validate(params);
    const auto gD = kernels.gammaD();
    const double D2 = kernels.D * kernels.D;
    std::vector<double> out(gD.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        double lb = 0.0;
        switch (p.lb_initial.kind) {
            case LbInitial::Kind::Thermal:
                lb = -std::norm(gD[i]) * (2.0 * bose_occupation(p.omega0, p.T_lb) + 1.0);
                break;
            case LbInitial::Kind::Vacuum: lb = -std::norm(gD[i]); break;
            case LbInitial::Kind::Fock:
                lb = std::log(std::norm(laguerre_damped(p.lb_initial.fock_n, std::norm(gD[i]))));
                break;
        }
        out[i] = lb - D2 * (kernels.R_vac[i] + kernels.R_th[i]);
    }
    return out;
}

CoherenceTrace assemble(const TimeGrid& times, std::vector<cplx> sS, std::vector<cplx> sLB,
                        std::vector<cplx> sR) {
    if (sS.size() != sLB.size() || sS.size() != sR.size() ||
        static_cast<long>(sS.size()) != times.size())
        throw Error(ErrorCode::NonUniformGrid, "coherence factors sampled on different grids");
    CoherenceTrace tr;
    tr.times = times;
    tr.P.resize(sS.size());
    tr.eta.resize(sS.size());
    for (std::size_t i = 0; i < sS.size(); ++i) tr.P[i] = sS[i] * sLB[i] * sR[i];
    const double p0 = std::norm(tr.P.front());
    if (p0 == 0.0) throw Error(ErrorCode::ZeroInitialCoherence, "|P(0)| = 0");
    for (std::size_t i = 0; i < sS.size(); ++i) tr.eta[i] = std::norm(tr.P[i]) / p0;
    tr.sigma_S = std::move(sS);
    tr.sigma_LB = std::move(sLB);
    tr.sigma_R = std::move(sR);
    return tr;
}

cplx markov_closed_form(double t, const ModelParams& params) {
    const ModelParams p = params.validated ? params : validate(params);
    const cplx prefactor = p.p0 * std::polar(1.0, -p.omega_eg * t);
    if (t <= 0.0) return prefactor;
    const double k = p.kappa, w0 = p.omega0, nb = bose_occupation(w0, p.T_lb);
    const cplx B(k, w0), Bc = std::conj(B);
    const double B2 = std::norm(B), D2 = p.D * p.D;
    const double ek = std::exp(-k * t), e2k = std::exp(-2.0 * k * t);
    const double c = std::cos(w0 * t), s = std::sin(w0 * t);
    const cplx bracket = 2.0 * Bc * t + nb * (1.0 + e2k) + 0.5 * (3.0 - e2k) +
                         cplx(0.0, w0 * w0 / B2 * s * ek) - (2.0 * nb + 1.0) * c * ek +
                         2.0 * k / B2 * (-2.0 * Bc + Bc * std::exp(-B * t) + B * std::exp(-Bc * t));
    // (w0 / 2k)(1 - e^{-2kt}) = w0 t phi1(2kt), finite as kappa -> 0
    const double drift = w0 * t * phi1(cplx(2.0 * k * t, 0.0)).real();
    const double shift = (3.0 * k * s + 4.0 * w0 * c) * k / B2 * ek - drift;
    const cplx exponent = -D2 / B2 * bracket + cplx(0.0, D2 / B2 * shift);
    return prefactor * std::exp(exponent);
}

cplx ibm_closed_form(double t, const ModelParams& params) {
    const ModelParams p = params.validated ? params : validate(params);
    const double nb = p.lb_initial.kind == LbInitial::Kind::Thermal ? bose_occupation(p.omega0, p.T_lb) : 0.0;
    const double w0 = p.omega0, D2 = p.D * p.D;
    const cplx em = std::polar(1.0, -w0 * t), ep = std::polar(1.0, w0 * t);
    const cplx exponent = cplx(0.0, D2 / w0 * t) - D2 / (w0 * w0) * ((1.0 + nb) * (1.0 - em) + nb * (1.0 - ep));
    return p.p0 * std::polar(1.0, -p.omega_eg * t) * std::exp(exponent);
}

Simulation simulate(const ModelParams& params, const SimulationOptions& options) {
    Simulation sim;
    sim.params = validate(params);
    sim.times = make_time_grid(sim.params, options.t_end, options.dt);
    sim.frequencies = make_frequency_grid(sim.params, sim.times, options.frequency);
    sim.propagators = make_propagators(sim.params, sim.times);
    sim.kernels = compute_kernels(sim.params, sim.propagators, sim.frequencies, options.kernel);
    sim.trace = assemble(sim.times, sigma_S(sim.kernels, sim.params), sigma_LB(sim.kernels, sim.params),
                         sigma_R_thermal(sim.kernels));
    return sim;
}

double unitarity_defect(const Simulation& sim) {
    double d = 0.0;
    for (long n = 0; n < sim.times.size(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        d = std::max(d, std::abs(std::norm(sim.propagators.F[i]) + sim.kernels.Q[i] - 1.0));
    }
    return d;
}

}  // namespace lbc
