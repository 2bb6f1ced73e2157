#include "lbcoh/propagators.hpp"

#include <cmath>

#include "lbcoh/errors.hpp"
#include "lbcoh/special.hpp"

namespace lbc {

namespace {

const ModelParams& checked(const ModelParams& p, ModelParams& storage) {
    if (p.validated) return p;
    storage = validate(p);
    return storage;
}

cplx B_of(const ModelParams& p) { return {p.kappa, p.omega0}; }

long roundtrips(double t, double tau) {
    return static_cast<long>(std::floor(t / tau));
}

// log of kappa^m s^m / m!
double log_term(long m, double kappa, double s) {
    if (m == 0) return 0.0;
    return static_cast<double>(m) * std::log(kappa * s) - std::lgamma(static_cast<double>(m) + 1.0);
}

}  // namespace

cplx markov_F(double t, const ModelParams& params) {
    ModelParams tmp;
    const ModelParams& p = checked(params, tmp);
    return std::exp(-B_of(p) * t);
}

cplx markov_G(double t, double omega, const ModelParams& params) {
    ModelParams tmp;
    const ModelParams& p = checked(params, tmp);
    // -i (e^{-i w t} - e^{-B t}) / (B - i w) = -i e^{-i w t} t phi1((B - i w) t)
    const cplx z = B_of(p) - cplx(0.0, omega);
    return cplx(0.0, -1.0) * std::polar(1.0, -omega * t) * t * phi1(z * t);
}

cplx feedback_F_envelope(double t, const ModelParams& params) {
    ModelParams tmp;
    const ModelParams& p = checked(params, tmp);
    if (!p.tau) throw Error(ErrorCode::MissingTau, "feedback propagator needs tau");
    const double tau = *p.tau;
    const long m_max = p.kappa > 0.0 ? roundtrips(t, tau) : 0;
    cplx sum = 0.0;
    for (long m = 0; m <= m_max; ++m) {
        const double s = t - static_cast<double>(m) * tau;
        if (s < 0.0 || (m > 0 && s == 0.0)) continue;
        const double logmag = log_term(m, p.kappa, s) - p.kappa * s;
        // e^{-i w0 s} e^{i w0 t} = e^{i w0 m tau}
        sum += std::polar(std::exp(logmag), p.omega0 * static_cast<double>(m) * tau);
    }
    return sum;
}

cplx feedback_F(double t, const ModelParams& params) {
    ModelParams tmp;
    const ModelParams& p = checked(params, tmp);
    if (!p.tau) throw Error(ErrorCode::MissingTau, "feedback propagator needs tau");
    const double tau = *p.tau;
    const long m_max = p.kappa > 0.0 ? roundtrips(t, tau) : 0;
    cplx sum = 0.0;
    for (long m = 0; m <= m_max; ++m) {
        const double s = t - static_cast<double>(m) * tau;
        if (s < 0.0 || (m > 0 && s == 0.0)) continue;
        const double logmag = log_term(m, p.kappa, s) - p.kappa * s;
        sum += std::polar(std::exp(logmag), -p.omega0 * s);
    }
    return sum;
}

cplx feedback_G(double t, double omega, const ModelParams& params) {
    ModelParams tmp;
    const ModelParams& p = checked(params, tmp);
    if (!p.tau) throw Error(ErrorCode::MissingTau, "feedback propagator needs tau");
    const double tau = *p.tau;
    const cplx z = B_of(p) - cplx(0.0, omega);  // A + B
    const long m_max = p.kappa > 0.0 ? roundtrips(t, tau) : 0;
    cplx sum = 0.0;
    for (long m = 0; m <= m_max; ++m) {
        const double s = t - static_cast<double>(m) * tau;
        if (s <= 0.0) continue;
        // -i e^{A s} kappa^m s^{m+1} / m! * int_0^1 u^m e^{-z s u} du
        const double logmag = log_term(m, p.kappa, s) + std::log(s);
        sum += std::polar(std::exp(logmag), -omega * s) * moment_exp(m, z * s);
    }
    return cplx(0.0, -1.0) * sum;
}

cplx recursion_G(long m, double t, double omega, const ModelParams& params) {
    ModelParams tmp;
    const ModelParams& p = checked(params, tmp);
    if (m < 0) throw Error(ErrorCode::InvalidParameter, "roundtrip index must be >= 0");
    const double tau = p.tau ? *p.tau : 0.0;
    const double s = t - static_cast<double>(m) * tau;
    if (s <= 0.0) return 0.0;
    if (m > 0 && p.kappa == 0.0) return 0.0;
    const cplx B = B_of(p);
    const cplx z = B - cplx(0.0, omega);
    const cplx zs = z * s;

    // bracket = e^{A s} - e^{-B s} sum_{n<=m} (zs)^n / n!  =  e^{-B s} sum_{n>m} (zs)^n / n!
    cplx bracket;
    if (std::abs(zs) < 2.0) {
        cplx term = 1.0;
        for (long n = 1; n <= m; ++n) term *= zs / static_cast<double>(n);
        cplx tail = 0.0;
        for (long n = m + 1; n < m + 200; ++n) {
            term *= zs / static_cast<double>(n);
            tail += term;
            if (std::abs(term) < 1e-18 * std::abs(tail)) break;
        }
        bracket = std::exp(-B * s) * tail;
    } else {
        cplx term = 1.0, partial = 1.0;
        for (long n = 1; n <= m; ++n) {
            term *= zs / static_cast<double>(n);
            partial += term;
        }
        bracket = std::polar(1.0, -omega * s) - std::exp(-B * s) * partial;
    }

    // kappa^m / z^{m+1}: built by repeated multiplication, renormalised pairwise
    cplx factor = 1.0 / z;
    double log_scale = 0.0;
    const cplx ratio = p.kappa / z;
    for (long n = 0; n < m; ++n) {
        factor *= ratio;
        const double mag = std::abs(factor);
        if (mag < 1e-150 || mag > 1e150) {
            factor /= mag;
            log_scale += std::log(mag);
        }
    }
    return cplx(0.0, -1.0) * factor * bracket * std::exp(log_scale);
}

double coupling_amplitude(double omega, const ModelParams& params) {
    ModelParams tmp;
    const ModelParams& p = checked(params, tmp);
    return std::sqrt(coupling_density(p.coupling_mode, omega, p));
}

PropagatorSet make_propagators(const ModelParams& params, const TimeGrid& times) {
    ModelParams tmp;
    const ModelParams& p = checked(params, tmp);
    PropagatorSet set;
    set.times = times;
    set.mode = p.coupling_mode;
    set.B = B_of(p);
    const auto n = static_cast<std::size_t>(times.size());
    set.F.resize(n);
    set.envelope.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = times.t(static_cast<long>(i));
        if (p.coupling_mode == CouplingMode::Markovian) {
            set.envelope[i] = std::exp(-p.kappa * t);
            set.F[i] = std::polar(std::exp(-p.kappa * t), -p.omega0 * t);
        } else {
            set.envelope[i] = feedback_F_envelope(t, p);
            set.F[i] = set.envelope[i] * std::polar(1.0, -p.omega0 * t);
        }
    }
    return set;
}

std::vector<cplx> materialize_G(const ModelParams& params, const TimeGrid& times,
                                const std::vector<double>& omegas) {
    ModelParams tmp;
    const ModelParams& p = checked(params, tmp);
    std::vector<cplx> out(static_cast<std::size_t>(times.size()) * omegas.size());
    for (long n = 0; n < times.size(); ++n)
        for (std::size_t j = 0; j < omegas.size(); ++j) {
            const double t = times.t(n);
            out[static_cast<std::size_t>(n) * omegas.size() + j] =
                p.coupling_mode == CouplingMode::Markovian ? markov_G(t, omegas[j], p)
                                                           : feedback_G(t, omegas[j], p);
        }
    return out;
}

}  // namespace lbc
