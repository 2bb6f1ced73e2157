#include "lbcoh/kernels.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lbcoh/errors.hpp"
#include "lbcoh/quadrature.hpp"
#include "lbcoh/special.hpp"

namespace lbc {

std::vector<cplx> KernelSet::gammaD() const {
    std::vector<cplx> out(gamma.size());
    for (std::size_t i = 0; i < gamma.size(); ++i) out[i] = D * gamma[i];
    return out;
}

std::vector<double> KernelSet::phiD() const {
    std::vector<double> out(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) out[i] = D * D * phi[i];
    return out;
}

std::vector<double> KernelSet::R_total() const {
    std::vector<double> out(R_vac.size());
    for (std::size_t i = 0; i < R_vac.size(); ++i) out[i] = R_vac[i] + R_th[i];
    return out;
}

namespace {

StepPlan plan_for(const PropagatorSet& props) {
    return StepPlan(props.times.n_steps, props.mode == CouplingMode::Feedback ? props.times.n_per_tau : 0);
}

// ---------------------------------------------------------------------------------------
// analytic contribution of |omega| beyond the band edges

// d [g(X)/2 + sum_{j>=1} g(X + j d)] - int_X^inf g for g(x) = A(x) e^{i theta x}, to first
// order in the derivative of the slowly varying amplitude A.
cplx edge_sum_correction(double theta, double X, double A, double dA, double d) {
    const double phi = theta * d;
    double c0, c1;  // c0 multiplies i A, c1 multiplies dA
    if (std::abs(phi) < 1e-3) {
        const double p2 = phi * phi;
        c0 = -theta * d * d * (1.0 / 12.0 + p2 / 720.0);
        c1 = -d * d * (1.0 / 12.0 + p2 / 240.0);
    } else {
        const double h = 0.5 * phi;
        c0 = (h / std::tan(h) - 1.0) / theta;
        const double sh = std::sin(h);
        c1 = (1.0 - h * h / (sh * sh)) / (theta * theta);
    }
    return std::polar(1.0, theta * X) * (cplx(0.0, c0 * A) + c1 * dA);
}

struct TailModel {
    std::vector<DensityTerm> terms;
    double kappa = 0.0, omega0 = 0.0;
    double x_hi = 0.0, x_lo = 0.0;  // band edges measured from omega0
    double w_hi = 0.0, w_lo = 0.0;  // band edges measured from 0 (absolute values)
    double s_mean = 0.0;
    double c_vac = 0.0, c_th = 0.0;
    // int over both tails of s_mean / (omega (B - i omega)) and s_mean / (omega |B - i omega|^2)
    cplx k1 = 0.0;
    cplx k2 = 0.0;

    double d_omega = 0.0;

    // The band is summed with trapezoid weights on the grid; the tails continue that sum, not
    // the integral, so every tail integral carries the sum-minus-integral edge term.
    cplx tl(double theta) const {
        if (theta == 0.0) {
            auto A = [&](double X) { return 1.0 / (X * X + kappa * kappa); };
            auto dA = [&](double X) { return -2.0 * X * A(X) * A(X); };
            return tail_lorentz(x_hi, kappa) + tail_lorentz(x_lo, kappa) +
                   edge_sum_correction(0.0, x_hi, A(x_hi), dA(x_hi), d_omega) +
                   edge_sum_correction(0.0, x_lo, A(x_lo), dA(x_lo), d_omega);
        }
        return inv_sq_sum(theta, x_hi) + inv_sq_sum(-theta, x_lo);
    }
    cplx tw(double theta) const { return inv_sq_sum(theta, w_hi) + inv_sq_sum(-theta, w_lo); }

    cplx inv_sq_sum(double theta, double X) const {
        return tail_exp_inv_sq(theta, X) + edge_sum_correction(theta, X, 1.0 / (X * X), -2.0 / (X * X * X), d_omega);
    }
};

struct ThermalTailData {
    const ModelParams* params;
};

// integrated in u = omega / omega0 so that GSL sees O(1) magnitudes
double thermal_tail_integrand(double u, void* data) {
    const auto* d = static_cast<const ThermalTailData*>(data);
    const ModelParams& p = *d->params;
    const double omega = u * p.omega0;
    const double x = PhysicalConstants::hbar * omega / (PhysicalConstants::kB * p.T_reservoir);
    if (x > 700.0) return 0.0;
    const double n = 1.0 / std::expm1(x);
    return coupling_density(p.coupling_mode, omega, p) * 2.0 * n / (u * u);
}

double thermal_tail(const ModelParams& p, double from) {
    if (p.T_reservoir <= 0.0) return 0.0;
    ThermalTailData data{&p};
    gsl_function fn;
    fn.function = &thermal_tail_integrand;
    fn.params = &data;
    auto* ws = gsl_integration_workspace_alloc(2000);
    double result = 0.0, abserr = 0.0;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    gsl_integration_qagiu(&fn, from / p.omega0, 0.0, 1e-10, 2000, ws, &result, &abserr);
    gsl_set_error_handler(old);
    gsl_integration_workspace_free(ws);
    return result / p.omega0;
}

// int_{|omega| > edge} d omega / (omega (B - i omega)) over the upper (W_hi) and lower (W_lo) tails
cplx rational_tail_k1(cplx B, double w_hi, double w_lo) {
    const cplx I(0.0, 1.0);
    const cplx upper = (0.5 * pi * I + std::log(B / w_hi - I)) / B;
    const cplx lower = (0.5 * pi * I - std::log(B / w_lo + I)) / B;
    return upper + lower;
}

// int_{|omega| > edge} d omega / (omega |B - i omega|^2), from partial fractions
double rational_tail_k2(double kappa, double omega0, double w_hi, double w_lo) {
    const double A = 1.0 / (omega0 * omega0 + kappa * kappa);
    const double x_hi = w_hi - omega0, x_lo = w_lo + omega0;
    const double upper = -std::log(w_hi) + 0.5 * std::log(x_hi * x_hi + kappa * kappa) +
                         omega0 / kappa * std::atan2(kappa, x_hi);
    const double lower = std::log(w_lo) - 0.5 * std::log(x_lo * x_lo + kappa * kappa) +
                         omega0 / kappa * std::atan2(kappa, x_lo);
    return A * (upper + lower);
}

struct FourierTailData {
    cplx b;     // B / omega0
    double sign;  // +1 upper tail, -1 lower tail
    int part;   // 0, 1: Re, Im of 1/(u (b - i u)); 2: 1/(u |b - i u|^2)
};

double fourier_tail_integrand(double u, void* data) {
    const auto* d = static_cast<const FourierTailData*>(data);
    const double w = d->sign * u;
    const cplx z = d->b - cplx(0.0, w);
    if (d->part == 2) return 1.0 / (w * std::norm(z));
    const cplx v = 1.0 / (w * z);
    return d->part == 0 ? v.real() : v.imag();
}

// int_{u0}^inf g(u) e^{i k u} du for one real part g
cplx fourier_tail(FourierTailData data, double u0, double k) {
    gsl_function fn;
    fn.function = &fourier_tail_integrand;
    fn.params = &data;
    auto* ws = gsl_integration_workspace_alloc(1000);
    auto* cyc = gsl_integration_workspace_alloc(1000);
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    double re = 0.0, im = 0.0, err = 0.0;
    const double ak = std::abs(k);
    auto* tc = gsl_integration_qawo_table_alloc(ak, 1.0, GSL_INTEG_COSINE, 50);
    gsl_integration_qawf(&fn, u0, 1e-14, 1000, ws, cyc, tc, &re, &err);
    gsl_integration_qawo_table_set(tc, ak, 1.0, GSL_INTEG_SINE);
    gsl_integration_qawf(&fn, u0, 1e-14, 1000, ws, cyc, tc, &im, &err);
    gsl_set_error_handler(old);
    gsl_integration_qawo_table_free(tc);
    gsl_integration_workspace_free(cyc);
    gsl_integration_workspace_free(ws);
    return {re, k < 0.0 ? -im : im};
}

// int over both tails of e^{i omega theta} / (omega (B - i omega))  (k1) and
// e^{i omega theta} / (omega |B - i omega|^2)  (k2), theta != 0
std::pair<cplx, cplx> modulated_rational_tails(const ModelParams& p, double theta, double w_hi,
                                                double w_lo) {
    const cplx b = cplx(p.kappa, p.omega0) / p.omega0;
    const double k = theta * p.omega0;
    cplx k1 = 0.0, k2 = 0.0;
    for (double sign : {1.0, -1.0}) {
        const double u0 = (sign > 0.0 ? w_hi : w_lo) / p.omega0;
        const double ks = sign * k;  // e^{i omega theta} = e^{i sign k u}
        const cplx re = fourier_tail({b, sign, 0}, u0, ks);
        const cplx im = fourier_tail({b, sign, 1}, u0, ks);
        const cplx nrm = fourier_tail({b, sign, 2}, u0, ks);
        k1 += re + cplx(0.0, 1.0) * im;
        k2 += nrm;
    }
    // d omega = omega0 du;  1/(omega (B - i omega)) = omega0^-2 (...), 1/(omega |.|^2) = omega0^-3 (...)
    return {k1 / p.omega0, k2 / (p.omega0 * p.omega0)};
}

TailModel make_tail_model(const ModelParams& p, const FrequencyGrid& grid) {
    TailModel tm;
    tm.terms = density_terms(p);
    tm.kappa = p.kappa;
    tm.omega0 = p.omega0;
    tm.x_hi = grid.omega_max - p.omega0;
    tm.x_lo = p.omega0 - grid.omega_min;
    tm.w_hi = grid.omega_max;
    tm.w_lo = -grid.omega_min;
    tm.d_omega = grid.d_omega;
    for (const auto& c : tm.terms)
        if (c.theta == 0.0) tm.s_mean += c.amplitude;
    cplx cv = 0.0;
    for (const auto& c : tm.terms) cv += c.amplitude * tm.tw(c.theta);
    tm.c_vac = cv.real();
    tm.c_th = thermal_tail(p, tm.w_hi) + thermal_tail(p, tm.w_lo);
    tm.k1 = tm.s_mean * rational_tail_k1(cplx(p.kappa, p.omega0), tm.w_hi, tm.w_lo);
    tm.k2 = tm.s_mean * rational_tail_k2(p.kappa, p.omega0, tm.w_hi, tm.w_lo);
    for (const auto& c : tm.terms) {
        if (c.theta == 0.0) continue;
        const auto [m1, m2] = modulated_rational_tails(p, c.theta, tm.w_hi, tm.w_lo);
        tm.k1 += c.amplitude * m1;
        tm.k2 += c.amplitude * m2;
    }
    return tm;
}

void add_tails(const ModelParams& p, const PropagatorSet& props, const FrequencyGrid& grid,
               KernelSet& ks) {
    if (p.kappa == 0.0) return;
    const TailModel tm = make_tail_model(p, grid);
    const long nt = props.times.size();
    for (long n = 0; n < nt; ++n) {
        const auto i = static_cast<std::size_t>(n);
        if (n == 0) continue;
        const double t = props.times.t(n);
        const cplx F = props.F[i];
        const cplx env = props.envelope[i];
        const double a = 1.0 + std::norm(F);
        // Outside the band G and N follow from Phi ~ (1 - F e^{i w t}) / (B - i w):
        //   s Phi Nhat^* ~ i s gamma^* (e^{-i w t} - F) / (w (B - i w)) - i s |Phi|^2 / w
        // The pieces that do not oscillate with t are integrated exactly (k1, k2);
        // everything oscillating uses the leading 1/w^2 behaviour.
        cplx q = 0.0, osc = 0.0;
        for (const auto& c : tm.terms) {
            const cplx phase = std::polar(c.amplitude, p.omega0 * c.theta);
            q += phase * (a * tm.tl(c.theta) - 2.0 * env * tm.tl(t + c.theta));
            osc += c.amplitude * tm.tw(c.theta - t);
        }
        const double g2 = std::norm(ks.gamma[i]);
        ks.Q_tail[i] = q.real();
        ks.R_vac_tail[i] = g2 * tm.c_vac;
        ks.R_th_tail[i] = g2 * tm.c_th;
        const cplx I(0.0, 1.0);
        ks.GN_tail[i] = std::conj(ks.gamma[i]) * (-I * F * tm.k1 - osc) - I * a * tm.k2;
        ks.Q[i] += ks.Q_tail[i];
        ks.R_vac[i] += ks.R_vac_tail[i];
        ks.R_th[i] += ks.R_th_tail[i];
        ks.GN[i] += ks.GN_tail[i];
    }
}

// ---------------------------------------------------------------------------------------
// frequency reduction

struct Shared {
    const StepPlan* plan;
    double dt;
    long nt;
    const std::vector<cplx>* env;
    const std::vector<cplx>* gamma;
    const std::vector<cplx>* Gamma2;
    std::vector<cplx> rot0;  // e^{i omega0 t_n}
    double omega0;
};

// Accumulators laid out as [n] for each quantity.
struct Sums {
    std::vector<double> q, rv, rt, pr, pi;
    explicit Sums(long nt)
        : q(static_cast<std::size_t>(nt), 0.0), rv(q), rt(q), pr(q), pi(q) {}
};

// Straightforward column-by-column evaluation with std::complex arithmetic.
void reduce_serial(const Shared& sh, const ColumnWeights& cw, Sums& out) {
    const auto& env = *sh.env;
    const auto& gamma = *sh.gamma;
    const auto& Gamma2 = *sh.Gamma2;
    for (std::size_t j = 0; j < cw.omega.size(); ++j) {
        const double omega = cw.omega[j];
        if (cw.vac[j] == 0.0 && cw.th[j] == 0.0) continue;
        const double nu = omega - sh.omega0;
        const auto fw = filon_weights(nu * sh.dt);
        cplx Phi = 0.0;
        for (long n = 0; n + 1 < sh.nt; ++n) {
            const Step& st = (*sh.plan)[n];
            const auto& w = fw.w[static_cast<std::size_t>(st.kind)];
            cplx local = 0.0;
            for (int k = 0; k < StepPlan::stencil_size(st.kind); ++k)
                local += w[static_cast<std::size_t>(k)] * env[static_cast<std::size_t>(st.first + k)];
            Phi += sh.dt * std::polar(1.0, nu * sh.dt * static_cast<double>(n)) * local;
            const auto i = static_cast<std::size_t>(n + 1);
            const double t = sh.dt * static_cast<double>(n + 1);
            cplx Gh;
            if (omega == 0.0)
                Gh = Gamma2[i];
            else
                Gh = (gamma[i] * std::polar(1.0, omega * t) - Phi) / cplx(0.0, omega);
            out.q[i] += cw.vac[j] * std::norm(Phi);
            out.rv[i] += cw.vac[j] * std::norm(Gh);
            out.rt[i] += cw.th[j] * std::norm(Gh);
            const cplx pg = cw.vac[j] * Phi * std::conj(Gh);
            out.pr[i] += pg.real();
            out.pi[i] += pg.imag();
        }
    }
}

constexpr int kBlock = 8;
constexpr long kResync = 256;

// Blocked evaluation over kBlock columns at a time, real arithmetic, vectorisable.
void reduce_block(const Shared& sh, const ColumnWeights& cw, long j0, long j1, Sums& out) {
    const auto& env = *sh.env;
    const auto& gamma = *sh.gamma;
    const auto& Gamma2 = *sh.Gamma2;
    const double dt = sh.dt;

    alignas(64) double wr[kStencilKinds][4][kBlock], wi[kStencilKinds][4][kBlock];
    alignas(64) double rr[kBlock], ri[kBlock], pr[kBlock], pi_[kBlock];
    alignas(64) double fr[kBlock], fi[kBlock];  // Phi
    alignas(64) double ar[kBlock], ai[kBlock];  // coefficient of (gamma e - Phi): -i/omega
    alignas(64) double zsel[kBlock], nu[kBlock], om[kBlock], wv[kBlock], wt[kBlock];

    for (int k = 0; k < kBlock; ++k) {
        const long j = j0 + k;
        if (j < j1) {
            om[k] = cw.omega[static_cast<std::size_t>(j)];
            wv[k] = cw.vac[static_cast<std::size_t>(j)];
            wt[k] = cw.th[static_cast<std::size_t>(j)];
        } else {
            om[k] = sh.omega0;
            wv[k] = 0.0;
            wt[k] = 0.0;
        }
        nu[k] = om[k] - sh.omega0;
        const auto fw = filon_weights(nu[k] * dt);
        for (int s = 0; s < kStencilKinds; ++s)
            for (int q = 0; q < 4; ++q) {
                wr[s][q][k] = fw.w[static_cast<std::size_t>(s)][static_cast<std::size_t>(q)].real() * dt;
                wi[s][q][k] = fw.w[static_cast<std::size_t>(s)][static_cast<std::size_t>(q)].imag() * dt;
            }
        const cplx r = std::polar(1.0, nu[k] * dt);
        rr[k] = r.real();
        ri[k] = r.imag();
        pr[k] = 1.0;
        pi_[k] = 0.0;
        fr[k] = fi[k] = 0.0;
        if (om[k] == 0.0) {
            ar[k] = ai[k] = 0.0;
            zsel[k] = 1.0;
        } else {
            ar[k] = 0.0;
            ai[k] = -1.0 / om[k];
            zsel[k] = 0.0;
        }
    }

    for (long n = 0; n + 1 < sh.nt; ++n) {
        const Step& st = (*sh.plan)[n];
        const int size = StepPlan::stencil_size(st.kind);
        double er[4] = {0, 0, 0, 0}, ei[4] = {0, 0, 0, 0};
        for (int q = 0; q < size; ++q) {
            er[q] = env[static_cast<std::size_t>(st.first + q)].real();
            ei[q] = env[static_cast<std::size_t>(st.first + q)].imag();
        }
        const auto i = static_cast<std::size_t>(n + 1);
        const double gr = gamma[i].real(), gi = gamma[i].imag();
        const double cr = sh.rot0[i].real(), ci = sh.rot0[i].imag();
        const double g2r = Gamma2[i].real(), g2i = Gamma2[i].imag();
        const auto& Wr = wr[st.kind];
        const auto& Wi = wi[st.kind];
        double sq = 0.0, srv = 0.0, srt = 0.0, spr = 0.0, spi = 0.0;
#pragma omp simd reduction(+ : sq, srv, srt, spr, spi)
        for (int k = 0; k < kBlock; ++k) {
            double lr = 0.0, li = 0.0;
            for (int q = 0; q < 4; ++q) {
                lr += Wr[q][k] * er[q] - Wi[q][k] * ei[q];
                li += Wr[q][k] * ei[q] + Wi[q][k] * er[q];
            }
            // Phi += e^{i nu t_n} * local
            fr[k] += pr[k] * lr - pi_[k] * li;
            fi[k] += pr[k] * li + pi_[k] * lr;
            // advance phase to t_{n+1}
            const double npr = pr[k] * rr[k] - pi_[k] * ri[k];
            const double npi = pr[k] * ri[k] + pi_[k] * rr[k];
            pr[k] = npr;
            pi_[k] = npi;
            // e^{i omega t_{n+1}} = e^{i nu t} e^{i omega0 t}
            const double xr = npr * cr - npi * ci;
            const double xi = npr * ci + npi * cr;
            // gamma e - Phi
            const double dr = gr * xr - gi * xi - fr[k];
            const double di = gr * xi + gi * xr - fi[k];
            const double hr = ar[k] * dr - ai[k] * di + zsel[k] * g2r;
            const double hi = ar[k] * di + ai[k] * dr + zsel[k] * g2i;
            const double phi2 = fr[k] * fr[k] + fi[k] * fi[k];
            const double h2 = hr * hr + hi * hi;
            sq += wv[k] * phi2;
            srv += wv[k] * h2;
            srt += wt[k] * h2;
            // Phi conj(H)
            spr += wv[k] * (fr[k] * hr + fi[k] * hi);
            spi += wv[k] * (fi[k] * hr - fr[k] * hi);
        }
        out.q[i] += sq;
        out.rv[i] += srv;
        out.rt[i] += srt;
        out.pr[i] += spr;
        out.pi[i] += spi;
        if ((n + 1) % kResync == 0) {
            for (int k = 0; k < kBlock; ++k) {
                const cplx p = std::polar(1.0, nu[k] * dt * static_cast<double>(n + 1));
                pr[k] = p.real();
                pi_[k] = p.imag();
            }
        }
    }
}

void reduce_parallel(const Shared& sh, const ColumnWeights& cw, int threads, Sums& out) {
    // Columns that carry no weight are dropped up front; the remaining ones are cut into
    // a fixed set of contiguous chunks whose partial sums are combined in chunk order, so
    // the result does not depend on the number of threads.
    std::vector<long> active;
    for (std::size_t j = 0; j < cw.omega.size(); ++j)
        if (cw.vac[j] != 0.0 || cw.th[j] != 0.0) active.push_back(static_cast<long>(j));
    ColumnWeights packed;
    for (long j : active) {
        packed.omega.push_back(cw.omega[static_cast<std::size_t>(j)]);
        packed.vac.push_back(cw.vac[static_cast<std::size_t>(j)]);
        packed.th.push_back(cw.th[static_cast<std::size_t>(j)]);
    }
    const long n_cols = static_cast<long>(packed.omega.size());
    const long n_blocks = (n_cols + kBlock - 1) / kBlock;
    if (n_blocks == 0) return;
    const long n_chunks = std::min<long>(64, n_blocks);
    std::vector<std::unique_ptr<Sums>> partial(static_cast<std::size_t>(n_chunks));

#ifdef _OPENMP
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#endif
    for (long c = 0; c < n_chunks; ++c) {
        auto sums = std::make_unique<Sums>(sh.nt);
        const long b0 = n_blocks * c / n_chunks;
        const long b1 = n_blocks * (c + 1) / n_chunks;
        for (long b = b0; b < b1; ++b)
            reduce_block(sh, packed, b * kBlock, std::min(n_cols, (b + 1) * kBlock), *sums);
        partial[static_cast<std::size_t>(c)] = std::move(sums);
    }
    (void)threads;
    for (const auto& p : partial)
        for (long n = 0; n < sh.nt; ++n) {
            const auto i = static_cast<std::size_t>(n);
            out.q[i] += p->q[i];
            out.rv[i] += p->rv[i];
            out.rt[i] += p->rt[i];
            out.pr[i] += p->pr[i];
            out.pi[i] += p->pi[i];
        }
}

}  // namespace

std::vector<cplx> compute_gamma(const PropagatorSet& props, const ModelParams& params) {
    const ModelParams p = params.validated ? params : validate(params);
    std::vector<cplx> gamma(props.F.size());
    if (props.mode == CouplingMode::Markovian) {
        for (long n = 0; n < props.times.size(); ++n) {
            const double t = props.times.t(n);
            gamma[static_cast<std::size_t>(n)] = t * phi1(props.B * t);
        }
        return gamma;
    }
    return cumulative_filon(props.envelope, props.times.dt, -p.omega0, plan_for(props));
}

std::vector<cplx> compute_Gamma2(const PropagatorSet& props, const ModelParams& params,
                                 const std::vector<cplx>& gamma) {
    const ModelParams p = params.validated ? params : validate(params);
    std::vector<cplx> out(props.F.size());
    if (props.mode == CouplingMode::Markovian) {
        for (long n = 0; n < props.times.size(); ++n) {
            const double t = props.times.t(n);
            out[static_cast<std::size_t>(n)] = t * t * phi2(props.B * t);
        }
        return out;
    }
    // int_0^t gamma = t gamma(t) - int_0^t a F(a) da
    std::vector<cplx> weighted(props.envelope.size());
    for (long n = 0; n < props.times.size(); ++n)
        weighted[static_cast<std::size_t>(n)] = props.times.t(n) * props.envelope[static_cast<std::size_t>(n)];
    const auto moment = cumulative_filon(weighted, props.times.dt, -p.omega0, plan_for(props));
    for (long n = 0; n < props.times.size(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        out[i] = props.times.t(n) * gamma[i] - moment[i];
    }
    return out;
}

std::vector<cplx> compute_N(const PropagatorSet& props, const ModelParams& params, double omega) {
    const ModelParams p = params.validated ? params : validate(params);
    const auto gamma = compute_gamma(props, p);
    // G = -i e^{-i w t} Phi,  N = -i e^{-i w t} int_0^t gamma e^{i w a} da
    const auto Phi = cumulative_filon(props.envelope, props.times.dt, omega - p.omega0, plan_for(props));
    std::vector<cplx> N(Phi.size());
    std::vector<cplx> Gamma2;
    if (omega == 0.0) Gamma2 = compute_Gamma2(props, p, gamma);
    for (long n = 0; n < props.times.size(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        const double t = props.times.t(n);
        cplx Gh = omega == 0.0 ? Gamma2[i]
                               : (gamma[i] * std::polar(1.0, omega * t) - Phi[i]) / cplx(0.0, omega);
        N[i] = cplx(0.0, -1.0) * std::polar(1.0, -omega * t) * Gh;
    }
    return N;
}

ColumnWeights column_weights(const ModelParams& params, const FrequencyGrid& grid) {
    const ModelParams p = params.validated ? params : validate(params);
    ColumnWeights cw;
    cw.omega.resize(static_cast<std::size_t>(grid.n_modes));
    cw.vac.resize(cw.omega.size());
    cw.th.resize(cw.omega.size());
    const bool markov = p.coupling_mode == CouplingMode::Markovian;
    for (long j = 0; j < grid.n_modes; ++j) {
        const auto i = static_cast<std::size_t>(j);
        const double omega = grid.omega(j);
        const double s = coupling_density(p.coupling_mode, omega, p);
        cw.omega[i] = omega;
        cw.vac[i] = grid.weights[i] * s;
        double th = 0.0;
        const double a = std::abs(omega);
        if (p.T_reservoir > 0.0 && s > 0.0 && a > 0.0) {
            double w = grid.weights[i];
            if (markov) {
                // The integral starts at the node |omega| = cutoff; the first nodes carry
                // Gregory end weights (fourth order) instead of the trapezoid's 1/2, 1, 1, ...
                constexpr double gregory[4] = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};
                const double rel = (a - grid.ir_cutoff) / grid.d_omega;
                const long m = std::lround(rel);
                if (rel < -1e-6)
                    w = 0.0;
                else if (m < 4)
                    w = gregory[m] * grid.d_omega;
            }
            if (w > 0.0) th = w * s * 2.0 * bose_occupation(a, p.T_reservoir);
        }
        cw.th[i] = th;
    }
    return cw;
}

std::vector<double> compute_phi(const ModelParams& params, const PropagatorSet& props,
                                const std::vector<cplx>& gamma, const std::vector<cplx>& GN) {
    const ModelParams p = params.validated ? params : validate(params);
    const StepPlan plan = plan_for(props);
    std::vector<double> phi(gamma.size());
    if (props.mode == CouplingMode::Markovian) {
        // int_0^t F gamma^* = [ (1 - e^{-Bt})/B - (1 - e^{-2 kappa t})/(2 kappa) ] / B^*
        const auto ph = cumulative_integral(GN, props.times.dt, plan);
        for (long n = 0; n < props.times.size(); ++n) {
            const auto i = static_cast<std::size_t>(n);
            const double t = props.times.t(n);
            const cplx fg = (t * phi1(props.B * t) - t * phi1(cplx(2.0 * p.kappa * t, 0.0))) /
                            std::conj(props.B);
            phi[i] = fg.imag() + ph[i].imag();
        }
        return phi;
    }
    std::vector<cplx> integrand(gamma.size());
    for (std::size_t i = 0; i < gamma.size(); ++i) integrand[i] = props.F[i] * std::conj(gamma[i]) + GN[i];
    const auto ph = cumulative_integral(integrand, props.times.dt, plan);
    for (std::size_t i = 0; i < gamma.size(); ++i) phi[i] = ph[i].imag();
    return phi;
}

// Feedback thermal excess: s 2n(|w|) |N|^2 ~ |w| g(w) near the node w = 0, where the
// trapezoid rule has an O(h^2) error; add the leading Euler-Maclaurin term h^2/6 g(0).
static void add_kink_correction(const ModelParams& p, const FrequencyGrid& grid, KernelSet& ks) {
    if (p.coupling_mode != CouplingMode::Feedback || p.T_reservoir <= 0.0 || p.kappa == 0.0) return;
    const double tau = *p.tau;
    const double curvature = p.kappa * tau * tau / (2.0 * pi);  // s ~ curvature w^2
    const double kT = PhysicalConstants::kB * p.T_reservoir / PhysicalConstants::hbar;
    const double h = grid.d_omega;
    const double c = h * h / 6.0 * 2.0 * curvature * kT;
    for (std::size_t i = 0; i < ks.R_th.size(); ++i) ks.R_th[i] += c * std::norm(ks.Gamma2[i]);
}

KernelSet compute_kernels(const ModelParams& params, const PropagatorSet& props,
                          const FrequencyGrid& grid, const KernelOptions& options) {
    const ModelParams p = params.validated ? params : validate(params);
    KernelSet ks;
    ks.times = props.times;
    ks.D = p.D;
    ks.n_modes = grid.n_modes;
    const long nt = props.times.size();
    const auto unt = static_cast<std::size_t>(nt);
    ks.gamma = compute_gamma(props, p);
    ks.Gamma2 = compute_Gamma2(props, p, ks.gamma);

    Sums sums(nt);
    if (p.kappa > 0.0) {
        const StepPlan plan = plan_for(props);
        Shared sh{&plan, props.times.dt, nt, &props.envelope, &ks.gamma, &ks.Gamma2, {}, p.omega0};
        sh.rot0.resize(unt);
        for (long n = 0; n < nt; ++n)
            sh.rot0[static_cast<std::size_t>(n)] = std::polar(1.0, p.omega0 * props.times.t(n));
        const ColumnWeights cw = column_weights(p, grid);
        if (options.serial_reference)
            reduce_serial(sh, cw, sums);
        else
            reduce_parallel(sh, cw, options.threads, sums);
    }
    ks.Q = std::move(sums.q);
    ks.R_vac = std::move(sums.rv);
    ks.R_th = std::move(sums.rt);
    ks.GN.resize(unt);
    for (std::size_t i = 0; i < unt; ++i) ks.GN[i] = {sums.pr[i], sums.pi[i]};
    ks.Q_tail.assign(unt, 0.0);
    ks.R_vac_tail.assign(unt, 0.0);
    ks.R_th_tail.assign(unt, 0.0);
    ks.GN_tail.assign(unt, 0.0);
    if (options.band_tails) add_tails(p, props, grid, ks);
    add_kink_correction(p, grid, ks);
    ks.phi = compute_phi(p, props, ks.gamma, ks.GN);
    return ks;
}

}  // namespace lbc
