#include "lbcoh/model.hpp"

#include <cmath>
#include <limits>

#include "lbcoh/errors.hpp"

namespace lbc {

ModelParams validate(const ModelParams& params) {
    ModelParams p = params;
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(p.omega0) || p.omega0 <= 0.0)
        throw Error(ErrorCode::NonPositiveFrequency, "omega0 must be positive");
    if (!finite(p.D) || p.D < 0.0) throw Error(ErrorCode::InvalidParameter, "D must be >= 0");
    if (!finite(p.kappa) || p.kappa < 0.0)
        throw Error(ErrorCode::InvalidParameter, "kappa must be >= 0");
    if (!finite(p.omega_eg)) throw Error(ErrorCode::InvalidParameter, "omega_eg must be finite");
    if (p.coupling_mode == CouplingMode::Feedback) {
        if (!p.tau) throw Error(ErrorCode::MissingTau, "feedback mode requires tau");
        if (!finite(*p.tau) || *p.tau <= 0.0)
            throw Error(ErrorCode::InvalidParameter, "tau must be positive");
    }
    if (p.tau && (!finite(*p.tau) || *p.tau <= 0.0))
        throw Error(ErrorCode::InvalidParameter, "tau must be positive");
    if (!finite(p.T_reservoir) || !finite(p.T_lb) || p.T_reservoir < 0.0 || p.T_lb < 0.0)
        throw Error(ErrorCode::NegativeTemperature, "temperatures must be >= 0");
    if (p.lb_initial.kind == LbInitial::Kind::Fock && p.lb_initial.fock_n < 0)
        throw Error(ErrorCode::InvalidParameter, "Fock occupation must be >= 0");
    if (!finite(p.p0.real()) || !finite(p.p0.imag()) || std::abs(p.p0) > 0.5 * (1.0 + 1e-12))
        throw Error(ErrorCode::InvalidParameter, "|p0| must not exceed 1/2");

    p.n_b = p.lb_initial.kind == LbInitial::Kind::Thermal ? bose_occupation(p.omega0, p.T_lb) : 0.0;
    if (p.coupling_mode == CouplingMode::Feedback || p.markov_density == MarkovDensity::Doubled)
        p.density_scale = 2.0 * p.kappa / pi;
    else
        p.density_scale = p.kappa / pi;
    p.validated = true;
    return p;
}

double bose_occupation(double omega, double T) {
    if (T < 0.0) throw Error(ErrorCode::NegativeTemperature, "temperature must be >= 0");
    if (T == 0.0) return 0.0;
    if (omega == 0.0) throw Error(ErrorCode::ZeroFrequency, "occupation diverges at omega = 0");
    if (omega < 0.0) throw Error(ErrorCode::NonPositiveFrequency, "occupation needs omega > 0");
    const double x = PhysicalConstants::hbar * omega / (PhysicalConstants::kB * T);
    return 1.0 / std::expm1(x);
}

double coupling_density(CouplingMode mode, double omega, const ModelParams& params) {
    const ModelParams& p = params.validated ? params : validate(params);
    if (mode == CouplingMode::Markovian) {
        return p.markov_density == MarkovDensity::Doubled ? 2.0 * p.kappa / pi : p.kappa / pi;
    }
    const double s = std::sin(0.5 * omega * *p.tau);
    return 2.0 * p.kappa / pi * s * s;
}

std::vector<DensityTerm> density_terms(const ModelParams& params) {
    const ModelParams p = params.validated ? params : validate(params);
    if (p.coupling_mode == CouplingMode::Markovian) return {{p.density_scale, 0.0}};
    // (2k/pi) sin^2(w tau/2) = (k/pi) (1 - cos(w tau))
    const double half = 0.5 * p.density_scale;
    return {{half, 0.0}, {-0.5 * half, *p.tau}, {-0.5 * half, -*p.tau}};
}

double max_time_step(const ModelParams& params) { return 2.0 * pi / (40.0 * params.omega0); }

TimeGrid make_time_grid(const ModelParams& params, double t_end, double dt_request) {
    const ModelParams p = params.validated ? params : validate(params);
    if (!(t_end > 0.0) || !std::isfinite(t_end))
        throw Error(ErrorCode::InvalidParameter, "t_end must be positive");
    const double dt_max = max_time_step(p);
    if (dt_request > dt_max * (1.0 + 1e-12))
        throw Error(ErrorCode::InvalidParameter, "dt exceeds 2 pi / (40 omega0)");
    double dt = dt_request > 0.0 ? dt_request : dt_max;

    TimeGrid grid;
    if (p.coupling_mode == CouplingMode::Feedback) {
        const double tau = *p.tau;
        long per_tau = static_cast<long>(std::ceil(tau / dt * (1.0 - 1e-12)));
        if (per_tau < 3) per_tau = 3;
        grid.n_per_tau = per_tau;
        dt = tau / static_cast<double>(per_tau);
    }
    grid.dt = dt;
    grid.n_steps = static_cast<long>(std::ceil(t_end / dt * (1.0 - 1e-12)));
    if (grid.n_steps < 1) grid.n_steps = 1;
    grid.t_end = grid.t(grid.n_steps);
    return grid;
}

FrequencyGrid make_frequency_grid(const ModelParams& params, const TimeGrid& time,
                                  const FrequencyOptions& options) {
    const ModelParams p = params.validated ? params : validate(params);
    if (!(options.band_factor > 1.0))
        throw Error(ErrorCode::InvalidParameter, "band factor must exceed 1");
    if (!(options.kink_resolution > 0.0))
        throw Error(ErrorCode::InvalidParameter, "kink resolution must be positive");
    if (!(options.omega_min_frac > 0.0))
        throw Error(ErrorCode::InvalidParameter, "omega_min_frac must be positive");

    const double lo = -(options.band_factor - 1.0) * p.omega0;
    const double hi = (options.band_factor + 1.0) * p.omega0;

    double target;
    if (options.n_modes > 0) {
        if (options.n_modes < 3) throw Error(ErrorCode::InvalidParameter, "need at least 3 modes");
        target = (hi - lo) / static_cast<double>(options.n_modes - 1);
    } else {
        double span = time.t_end;
        if (p.coupling_mode == CouplingMode::Feedback) span += *p.tau;
        target = 2.0 * pi / (options.recurrence_factor * span);
        // The thermal weight has a |omega| kink at zero; the trapezoid sum plus its kink
        // correction is only accurate once the grid resolves |N(omega)|^2 (width ~ 1/t).
        if (p.coupling_mode == CouplingMode::Feedback && p.T_reservoir > 0.0 && time.t_end > 0.0)
            target = std::min(target, options.kink_resolution / time.t_end);
    }

    FrequencyGrid grid;
    grid.ir_cutoff = options.omega_min_frac * p.omega0;
    const bool ir_active = p.coupling_mode == CouplingMode::Markovian && p.T_reservoir > 0.0;
    if (ir_active) {
        // put the cutoff on a node so the masked integrand is only cut at grid points
        if (options.n_modes <= 0)
            target = std::min(target, grid.ir_cutoff / static_cast<double>(options.ir_points));
        const double k = std::ceil(grid.ir_cutoff / target * (1.0 - 1e-12));
        grid.d_omega = grid.ir_cutoff / k;
    } else {
        grid.d_omega = target;
    }
    grid.j_first = static_cast<long>(std::floor(lo / grid.d_omega));
    const long j_last = static_cast<long>(std::ceil(hi / grid.d_omega));
    grid.n_modes = j_last - grid.j_first + 1;
    grid.omega_min = grid.omega(0);
    grid.omega_max = grid.omega(grid.n_modes - 1);
    grid.weights.assign(static_cast<std::size_t>(grid.n_modes), grid.d_omega);
    grid.weights.front() *= 0.5;
    grid.weights.back() *= 0.5;
    return grid;
}

const char* to_string(CouplingMode mode) {
    return mode == CouplingMode::Markovian ? "markovian" : "feedback";
}

const char* to_string(MarkovDensity density) {
    return density == MarkovDensity::Unitary ? "unitary" : "doubled";
}

std::string to_string(const LbInitial& initial) {
    switch (initial.kind) {
        case LbInitial::Kind::Thermal: return "thermal";
        case LbInitial::Kind::Vacuum: return "vacuum";
        case LbInitial::Kind::Fock: return "fock:" + std::to_string(initial.fock_n);
    }
    return "thermal";
}

}  // namespace lbc
