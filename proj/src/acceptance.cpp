#include "lbcoh/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <random>

#include "lbcoh/coherence.hpp"
#include "lbcoh/errors.hpp"
#include "lbcoh/harness.hpp"
#include "lbcoh/oracle.hpp"
#include "lbcoh/output.hpp"
#include "lbcoh/propagators.hpp"
#include "lbcoh/spectra.hpp"

namespace lbc {

namespace {

// ---- pinned tolerances ------------------------------------------------------------------
constexpr double kUnitarityMarkov = 1e-6;
constexpr double kUnitarityFeedback = 1e-4;
constexpr double kOracleTolerance = 1e-3;
constexpr double kRecursionTolerance = 1e-12;
constexpr double kClosedFormModulus = 1e-3;
constexpr double kClosedFormPhase = 1e-3;
constexpr double kIbmTolerance = 1e-10;
constexpr double kFockTolerance = 1e-15;
constexpr double kMarkovEtaCeiling = 0.1;
constexpr double kFeedbackGain = 5.0;
constexpr long kMinOscillationMaxima = 10;
constexpr double kLongDelayRms = 0.05;
constexpr double kOmegaMinSensitivity = 0.01;

constexpr double kTwoPi = 2.0 * pi;
constexpr double kFigureT = 200e-12;

Check make_check(const std::string& name, double value, const std::string& rel, double tol) {
    Check c{name, value, tol, rel, false};
    if (rel == "<") c.pass = value < tol;
    else if (rel == "<=") c.pass = value <= tol;
    else if (rel == ">") c.pass = value > tol;
    else if (rel == ">=") c.pass = value >= tol;
    if (std::isnan(value)) c.pass = false;
    return c;
}

bool all_pass(const std::vector<Check>& checks) {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

ModelParams preset(double scale, CouplingMode mode, double kappa_tau, double temperature) {
    ModelParams p;
    p.omega0 = 1e12 * scale;
    p.D = 2e11 * scale;
    p.kappa = 2e10 * scale;
    p.coupling_mode = mode;
    if (mode == CouplingMode::Feedback) p.tau = kappa_tau / p.kappa;
    p.T_reservoir = temperature;
    p.T_lb = temperature;
    return p;
}

SimulationOptions options_for(int threads, double t_end = kFigureT) {
    SimulationOptions o;
    o.t_end = t_end;
    o.kernel.threads = threads;
    return o;
}

// ---- criterion bodies --------------------------------------------------------------------

std::vector<Check> criterion1(int threads) {
    std::vector<Check> out;
    const auto markov = simulate(figure_params(CouplingMode::Markovian), options_for(threads));
    out.push_back(make_check("Markovian max |F|^2+Q-1", unitarity_defect(markov), "<=", kUnitarityMarkov));
    for (double kt : {0.031, 157.1}) {
        const auto fb = simulate(figure_params(CouplingMode::Feedback, kt), options_for(threads));
        char name[64];
        std::snprintf(name, sizeof name, "Feedback kappa*tau=%g max |F|^2+Q-1", kt);
        out.push_back(make_check(name, unitarity_defect(fb), "<=", kUnitarityFeedback));
    }
    return out;
}

std::vector<Check> criterion2() {
    std::vector<Check> out;
    for (double kt : {0.031, 1.0}) {
        const ModelParams p = validate(figure_params(CouplingMode::Feedback, kt));
        const double tau = *p.tau;
        const long n_out = 200;
        std::vector<double> times(n_out + 1);
        std::vector<cplx> F(n_out + 1);
        for (long i = 0; i <= n_out; ++i) {
            times[static_cast<std::size_t>(i)] = 4.0 * tau * static_cast<double>(i) / static_cast<double>(n_out);
            F[static_cast<std::size_t>(i)] = feedback_F(times[static_cast<std::size_t>(i)], p);
        }
        std::vector<double> dev;
        for (long M : {1024L, 2048L, 4096L}) {
            const auto sys = make_mode_system(p, M, 4.0 * tau);
            const auto res = integrate(sys, times);
            dev.push_back(compare(times, res.f, F).max_abs);
        }
        char name[96];
        std::snprintf(name, sizeof name, "kappa*tau=%g max|F-f| M=4096", kt);
        out.push_back(make_check(name, dev[2], "<", kOracleTolerance));
        std::snprintf(name, sizeof name, "kappa*tau=%g dev(M=1024)/dev(M=2048)", kt);
        out.push_back(make_check(name, dev[0] / dev[1], ">", 1.0));
        std::snprintf(name, sizeof name, "kappa*tau=%g dev(M=2048)/dev(M=4096)", kt);
        out.push_back(make_check(name, dev[1] / dev[2], ">", 1.0));
    }
    return out;
}

std::vector<Check> criterion3() {
    std::vector<Check> out;
    std::mt19937_64 rng(20240531);
    for (double kt : {0.031, 1.0}) {
        const ModelParams p = validate(figure_params(CouplingMode::Feedback, kt));
        const double tau = *p.tau;
        std::uniform_real_distribution<double> ut(0.0, 3.0 * tau), uw(0.0, 2.0 * p.omega0);
        double worst = 0.0;
        for (int k = 0; k < 50; ++k) {
            const double t = ut(rng), w = uw(rng);
            cplx sum = 0.0;
            for (long m = 0; static_cast<double>(m) * tau < t; ++m) sum += recursion_G(m, t, w, p);
            const cplx direct = feedback_G(t, w, p);
            worst = std::max(worst, std::abs(sum - direct) / std::abs(direct));
        }
        char name[96];
        std::snprintf(name, sizeof name, "kappa*tau=%g max relative |sum_m G_m - G|, 50 points", kt);
        out.push_back(make_check(name, worst, "<=", kRecursionTolerance));
    }
    return out;
}

struct ClosedFormError {
    double modulus = 0.0, phase = 0.0;
};

ClosedFormError closed_form_error(const ModelParams& p, const SimulationOptions& o) {
    const auto sim = simulate(p, o);
    ClosedFormError e;
    for (long n = 0; n < sim.times.size(); ++n) {
        const cplx c = markov_closed_form(sim.times.t(n), sim.params);
        const cplx P = sim.trace.P[static_cast<std::size_t>(n)];
        e.modulus = std::max(e.modulus, std::abs(std::abs(P) / std::abs(c) - 1.0));
        e.phase = std::max(e.phase, std::abs(std::arg(P / c)));
    }
    return e;
}

ModelParams closed_form_params() {
    ModelParams p = figure_params(CouplingMode::Markovian);
    p.T_reservoir = 0.0;
    p.T_lb = 300.0;
    return p;
}

std::vector<Check> criterion4_checks(const SimulationOptions& o, const std::string& suffix = "") {
    const auto e = closed_form_error(closed_form_params(), o);
    return {make_check("max relative modulus error" + suffix, e.modulus, "<=", kClosedFormModulus),
            make_check("max phase error [rad]" + suffix, e.phase, "<=", kClosedFormPhase)};
}

std::vector<Check> criterion5() {
    std::vector<Check> out;
    for (double T : {0.0, 300.0}) {
        ModelParams p;
        p.omega0 = kTwoPi * 1e12;
        p.D = 0.2 * p.omega0;
        p.kappa = 0.0;
        p.T_lb = T;
        p.T_reservoir = T;
        const double period = kTwoPi / p.omega0;
        const auto sim = simulate(p, options_for(0, 20.0 * period));
        double dev = 0.0;
        for (long n = 0; n < sim.times.size(); ++n)
            dev = std::max(dev, std::abs(sim.trace.P[static_cast<std::size_t>(n)] - ibm_closed_form(sim.times.t(n), sim.params)) /
                                    std::abs(sim.params.p0));
        const long per_period = static_cast<long>(std::llround(period / sim.times.dt));
        double revival = 0.0;
        for (long n = per_period; n <= sim.times.n_steps; n += per_period)
            revival = std::max(revival, std::abs(sim.trace.eta[static_cast<std::size_t>(n)] - 1.0));
        const double nb = sim.params.n_b;
        const double ratio = p.D / p.omega0;
        const double expected = std::exp(-2.0 * ratio * ratio * (2.0 * nb + 1.0) * 2.0);
        const double half = sim.trace.eta[static_cast<std::size_t>(per_period / 2)];
        char name[96];
        std::snprintf(name, sizeof name, "T=%g K max |P - P_ibm| / |p0|", T);
        out.push_back(make_check(name, dev, "<=", kIbmTolerance));
        std::snprintf(name, sizeof name, "T=%g K max |eta(2 pi m/omega0) - 1|", T);
        out.push_back(make_check(name, revival, "<=", kIbmTolerance));
        std::snprintf(name, sizeof name, "T=%g K |eta(pi/omega0) - exp(-4 (D/omega0)^2 (2 n_b+1))|", T);
        out.push_back(make_check(name, std::abs(half - expected), "<=", kIbmTolerance));
    }
    return out;
}

std::vector<Check> criterion6(int threads) {
    std::vector<Check> out;
    const auto markov = simulate(figure_params(CouplingMode::Markovian, 0.0, 300.0), options_for(threads));
    const auto gD = markov.kernels.gammaD();
    const auto f0 = sigma_LB_fock(gD, 0);
    const auto th = sigma_LB_thermal(gD, 0.0, markov.params.omega0);
    double d = 0.0;
    for (std::size_t i = 0; i < gD.size(); ++i) d = std::max(d, std::abs(f0[i] - th[i]));
    out.push_back(make_check("max |sigma_fock(n=0) - sigma_thermal(T=0)|", d, "<=", kFockTolerance));

    // |D gamma|^2 reaches 1 only for strong coupling; use the decoupled link boson with D = 0.8 omega0.
    ModelParams p;
    p.omega0 = kTwoPi * 1e12;
    p.D = 0.8 * p.omega0;
    const auto ibm = simulate(p, options_for(threads, 2.0 * kTwoPi / p.omega0));
    const auto g = ibm.kernels.gammaD();
    const auto f1 = sigma_LB_fock(g, 1);
    double bracket_miss = 1.0;  // 0 when the first sign change of sigma brackets |D gamma|^2 = 1
    for (std::size_t i = 0; i + 1 < f1.size(); ++i) {
        if (f1[i].real() > 0.0 && f1[i + 1].real() <= 0.0) {
            const double a = std::norm(g[i]), b = std::norm(g[i + 1]);
            bracket_miss = (a <= 1.0 && b >= 1.0) ? 0.0 : std::min(std::abs(a - 1.0), std::abs(b - 1.0));
            break;
        }
    }
    out.push_back(make_check("n=1 zero crossing off the |D gamma|^2 = 1 bracket", bracket_miss, "<=", 0.0));
    return out;
}

struct FigureThreeResult {
    double markov_eta_end = 0.0, feedback_mean = 0.0;
    long maxima = 0;
};

FigureThreeResult figure_three(const ModelParams& markov, const ModelParams& feedback, const SimulationOptions& om,
                               const SimulationOptions& of) {
    const auto m = simulate(markov, om);
    const auto f = simulate(feedback, of);
    FigureThreeResult r;
    r.markov_eta_end = evaluate_observable(m.trace, {SweepObservable::Kind::EtaAt, kFigureT, 0.0, 0.0});
    const long n0 = static_cast<long>(std::ceil(100e-12 / f.times.dt - 1e-9));
    const long n1 = std::min(static_cast<long>(std::floor(kFigureT / f.times.dt + 1e-9)), f.times.n_steps);
    double s = 0.0;
    for (long n = n0; n <= n1; ++n) s += f.trace.eta[static_cast<std::size_t>(n)];
    r.feedback_mean = s / static_cast<double>(n1 - n0 + 1);
    for (long n = 1; n < n1; ++n) {
        const auto i = static_cast<std::size_t>(n);
        if (f.trace.eta[i] > f.trace.eta[i - 1] && f.trace.eta[i] > f.trace.eta[i + 1]) ++r.maxima;
    }
    return r;
}

std::vector<Check> criterion7_checks(const FigureThreeResult& r, const std::string& suffix = "") {
    return {make_check("Markovian eta(200 ps)" + suffix, r.markov_eta_end, "<", kMarkovEtaCeiling),
            make_check("feedback mean eta[100,200 ps] / Markovian eta(200 ps)" + suffix,
                       r.feedback_mean / r.markov_eta_end, ">=", kFeedbackGain),
            make_check("feedback local maxima in [0, 200 ps]" + suffix, static_cast<double>(r.maxima), ">=",
                       static_cast<double>(kMinOscillationMaxima))};
}

FigureThreeResult figure_three_default(const SimulationOptions& o) {
    return figure_three(figure_params(CouplingMode::Markovian, 0.0, 300.0),
                        figure_params(CouplingMode::Feedback, 0.031, 300.0), o, o);
}

// Long-delay comparison.  The window must contain returns of the shorter loop, so it spans
// two roundtrips of kappa*tau = 157.1.
constexpr double kEarlyDephasingTime = 5e-12;
constexpr double kDephasedLogEta = -13.8;  // eta below 1e-6
constexpr double kLongDelayWindow = 2.0 * 157.1 / (kTwoPi * 2e10);

std::vector<Check> criterion8(int threads, std::vector<std::string>& diag) {
    SimulationOptions o = options_for(threads, kLongDelayWindow);
    const auto markov = simulate(figure_params(CouplingMode::Markovian, 0.0, 300.0), o);
    const auto short_loop = simulate(figure_params(CouplingMode::Feedback, 157.1, 300.0), o);
    const auto long_loop = simulate(figure_params(CouplingMode::Feedback, 471.3, 300.0), o);

    std::vector<Check> out;
    const double w0 = markov.params.omega0;
    auto fwhm = [&](const Simulation& s, const char* label) {
        const Spectrum sp = absorption_spectrum(s.trace);
        try {
            return satellite_metrics(sp, w0, 0.5 * w0).fwhm;
        } catch (const Error& e) {
            diag.push_back(std::string("criterion 8: ") + label + " satellite: " + e.what());
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    const double fm = fwhm(markov, "Markovian"), ff = fwhm(short_loop, "kappa*tau=157.1");
    out.push_back(make_check("satellite FWHM ratio feedback(157.1)/Markovian", ff / fm, "<", 1.0));
    double ss = 0.0;
    for (std::size_t i = 0; i < short_loop.trace.eta.size(); ++i) {
        const double d = short_loop.trace.eta[i] - long_loop.trace.eta[i];
        ss += d * d;
    }
    const double rms = std::sqrt(ss / static_cast<double>(short_loop.trace.eta.size()));
    out.push_back(make_check("RMS eta(157.1) - eta(471.3)", rms, "<=", kLongDelayRms));

    // How fast the thermal reservoir dephases both traces decides whether satellites can exist.
    auto early = [&](const Simulation& s) {
        const long n = std::min(s.times.n_steps, std::lround(kEarlyDephasingTime / s.times.dt));
        const auto i = static_cast<std::size_t>(n);
        const double D2 = s.params.D * s.params.D;
        return std::pair{log_eta(s.kernels, s.params)[i], D2 * s.kernels.R_th[i]};
    };
    const auto [lm, rm] = early(markov);
    const auto [lf, rf] = early(short_loop);
    char buf[200];
    std::snprintf(buf, sizeof buf,
                  "criterion 8: ln eta(5 ps) Markovian %.3e, kappa*tau=157.1 %.3e; thermal exponent D^2 R_th %.3e vs %.3e",
                  lm, lf, rm, rf);
    diag.push_back(buf);
    if (lm < kDephasedLogEta && lf < kDephasedLogEta && rf >= rm) diag.push_back("c8-thermal-dephasing");
    return out;
}

// 8 x 8 sweep of std(eta) over [0, 200 ps] with phases pi..2pi and temperatures 10..300 K.
const std::vector<double> kSweepT = {10.0, 25.0, 40.0, 75.0, 110.0, 150.0, 220.0, 300.0};

std::vector<double> sweep_phases() {
    std::vector<double> ph;
    for (int k = 0; k < 8; ++k) ph.push_back(pi + pi * k / 7.0);
    return ph;
}

std::vector<Check> figure_six_checks(const std::vector<double>& Ts, const std::vector<SweepPoint>& pts, std::size_t n_phase,
                                     const std::string& suffix = "") {
    auto at = [&](std::size_t it, std::size_t ip) { return pts[it * n_phase + ip].value; };
    const std::size_t hot = Ts.size() - 1;  // 300 K
    const double ref = at(hot, n_phase - 1);
    std::vector<Check> out;
    out.push_back(make_check("std(300 K, 2pi) - std(300 K, pi)" + suffix, ref - at(hot, 0), ">", 0.0));
    double worst = -1.0;
    for (std::size_t it = 0; it < Ts.size(); ++it) {
        if (Ts[it] >= 50.0) continue;
        worst = std::max({worst, at(it, 0), at(it, n_phase - 1)});
    }
    out.push_back(make_check("max std below 50 K (phases pi, 2pi) / std(300 K, 2pi)" + suffix, worst / ref, "<", 1.0));
    return out;
}

std::vector<Check> criterion9(int threads, std::vector<std::string>& diag) {
    SweepGrid grid;
    grid.temperatures = kSweepT;
    grid.phases = sweep_phases();
    grid.observable = {SweepObservable::Kind::EtaStd, 0.0, 0.0, kFigureT};
    const auto pts = run_sweep(figure_params(CouplingMode::Feedback, 0.031, 300.0), grid, options_for(0), threads);
    for (const auto& pt : pts)
        if (!pt.ok) diag.push_back("criterion 9: point failed: " + pt.error);
    return figure_six_checks(grid.temperatures, pts, grid.phases.size());
}

std::vector<Check> criterion10(int threads, std::vector<std::string>& diag) {
    std::vector<Check> out;
    const SimulationOptions base = options_for(threads);

    const bool c4 = all_pass(criterion4_checks(base));
    const bool c7 = all_pass(criterion7_checks(figure_three_default(base)));

    // refined grids: half the step, twice the modes of the default grid
    const ModelParams cf = validate(closed_form_params());
    const auto cf_times = make_time_grid(cf, base.t_end, 0.0);
    SimulationOptions fine_dt = base;
    fine_dt.dt = 0.5 * cf_times.dt;
    const long n4 = make_frequency_grid(cf, cf_times, base.frequency).n_modes;
    SimulationOptions more_modes4 = base;
    more_modes4.frequency.n_modes = 2 * n4;

    const bool c4_dt = all_pass(criterion4_checks(fine_dt));
    const bool c4_n = all_pass(criterion4_checks(more_modes4));

    const ModelParams m7 = validate(figure_params(CouplingMode::Markovian, 0.0, 300.0));
    const ModelParams f7 = validate(figure_params(CouplingMode::Feedback, 0.031, 300.0));
    SimulationOptions fine7 = base;
    fine7.dt = 0.5 * make_time_grid(f7, base.t_end, 0.0).dt;
    const bool c7_dt = all_pass(criterion7_checks(figure_three(m7, f7, fine7, fine7)));
    // twice the modes of each run's own default grid
    auto doubled = [&](const ModelParams& p) {
        SimulationOptions o = base;
        o.frequency.n_modes = 2 * make_frequency_grid(p, make_time_grid(p, base.t_end, 0.0), base.frequency).n_modes;
        return o;
    };
    const bool c7_n = all_pass(criterion7_checks(figure_three(m7, f7, doubled(m7), doubled(f7))));

    char buf[160];
    std::snprintf(buf, sizeof buf, "criterion 10: outcomes base/dt2/2n  c4 %d/%d/%d  c7 %d/%d/%d", c4, c4_dt, c4_n, c7,
                  c7_dt, c7_n);
    diag.push_back(buf);
    out.push_back(make_check("criterion 4 passes with dt/2 and 2 n_modes (count of passes of 3)",
                             static_cast<double>(c4 + c4_dt + c4_n), ">=", 3.0));
    out.push_back(make_check("criterion 7 passes with dt/2 and 2 n_modes (count of passes of 3)",
                             static_cast<double>(c7 + c7_dt + c7_n), ">=", 3.0));

    // Markovian thermal run, infrared cutoff halved
    SimulationOptions half_ir = base;
    half_ir.frequency.omega_min_frac = 0.5 * base.frequency.omega_min_frac;
    const auto a = simulate(m7, base);
    const auto b = simulate(m7, half_ir);
    // |eta_b - eta_a| / eta_a from the exponents: eta(200 ps) itself underflows at 300 K
    const double la = log_eta(a.kernels, a.params).back(), lb = log_eta(b.kernels, b.params).back();
    std::snprintf(buf, sizeof buf,
                  "criterion 10: Markovian 300 K ln eta(200 ps) = %.6e (omega_min) vs %.6e (omega_min/2)", la, lb);
    diag.push_back(buf);
    out.push_back(make_check("relative change of Markovian 300 K eta(200 ps) when omega_min halves",
                             std::abs(std::expm1(lb - la)), "<", kOmegaMinSensitivity));
    return out;
}

// Known, analysed failures.  Each is attached only when the evidence computed alongside the
// criterion supports the stated reason.
std::string known_reason(int id, const std::vector<Check>& checks, const std::vector<std::string>& evidence) {
    auto failed = [&](const std::string& prefix) {
        for (const auto& c : checks)
            if (!c.pass && c.name.rfind(prefix, 0) == 0) return true;
        return false;
    };
    auto has = [&](const std::string& tag) { return std::find(evidence.begin(), evidence.end(), tag) != evidence.end(); };
    switch (id) {
        case 4:
            if (has("c4-doubled-density-pass"))
                return "the closed form corresponds to the density 2 kappa/pi, which breaks the unitarity sum rule of "
                       "criterion 1; the unitary pipeline differs by a factor 2 in the reservoir weight";
            break;
        case 8:
            if (failed("satellite FWHM") && !failed("RMS") && has("c8-thermal-dephasing"))
                return "at 300 K the reservoir's thermal excess dephases both traces within a few ps, and the "
                       "long-delay density extends that infrared range down to 1/tau, so neither spectrum has a "
                       "resolvable satellite";
            break;
        case 10: {
            bool only_expected = true;
            for (const auto& c : checks) {
                if (c.pass) continue;
                const bool c4_outcome = c.name.rfind("criterion 4", 0) == 0 && has("c4-fails-at-all-grids");
                const bool ir = c.name.rfind("relative change", 0) == 0;
                if (!(c4_outcome || ir)) only_expected = false;
            }
            if (only_expected && (failed("criterion 4") || failed("relative change")))
                return "criterion 4 fails identically on every grid (density conflict), and the flat density makes "
                       "the Markovian thermal integral diverge like 1 / omega_min";
            break;
        }
        default: break;
    }
    return "";
}

void print_result(std::FILE* log, const CriterionResult& r) {
    if (!log) return;
    for (const auto& c : r.checks)
        std::fprintf(log, "    %-72s %.6e %s %.3e  %s\n", c.name.c_str(), c.value, c.relation.c_str(), c.tolerance,
                     c.pass ? "ok" : "VIOLATED");
    if (r.pass)
        std::fprintf(log, "criterion %d: PASS  %s  (%.1f s)\n", r.id, r.title.c_str(), r.seconds);
    else if (!r.known_failure.empty())
        std::fprintf(log, "criterion %d: FAIL (known: %s)  %s  (%.1f s)\n", r.id, r.known_failure.c_str(), r.title.c_str(),
                     r.seconds);
    else
        std::fprintf(log, "criterion %d: FAIL  %s  (%.1f s)\n", r.id, r.title.c_str(), r.seconds);
    std::fflush(log);
}

}  // namespace

ModelParams figure_params(CouplingMode mode, double kappa_tau, double temperature) {
    return preset(kTwoPi, mode, kappa_tau, temperature);
}

ModelParams figure_params_angular(CouplingMode mode, double kappa_tau, double temperature) {
    return preset(1.0, mode, kappa_tau, temperature);
}

AcceptanceReport run_acceptance(const AcceptanceOptions& opt, std::FILE* log) {
    AcceptanceReport report;
    const int th = opt.threads;
    auto wanted = [&](int id) { return opt.only.empty() || opt.only.count(id) > 0; };

    auto run = [&](int id, const std::string& title, const std::function<std::vector<Check>(std::vector<std::string>&)>& body) {
        if (!wanted(id)) return;
        CriterionResult r;
        r.id = id;
        r.title = title;
        const auto start = std::chrono::steady_clock::now();
        std::vector<std::string> evidence;
        try {
            r.checks = body(evidence);
        } catch (const std::exception& e) {
            r.checks.push_back({std::string("exception: ") + e.what(), std::nan(""), 0.0, "none", false});
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.pass = !r.checks.empty() && all_pass(r.checks);
        if (!r.pass) r.known_failure = known_reason(id, r.checks, evidence);
        for (const auto& e : evidence)
            if (e.rfind("criterion", 0) == 0 || e.rfind("diagnostic", 0) == 0) report.diagnostics.push_back(e);
        print_result(log, r);
        report.criteria.push_back(std::move(r));
    };

    run(1, "unitarity |F|^2 + Q = 1", [&](auto&) { return criterion1(th); });
    run(2, "propagator vs discrete-mode oracle", [&](auto&) { return criterion2(); });
    run(3, "method-of-steps recursion vs closed form", [&](auto&) { return criterion3(); });
    run(4, "pipeline vs Markovian closed form (T_res = 0, T_lb = 300 K)", [&](std::vector<std::string>& ev) {
        auto checks = criterion4_checks(options_for(th));
        if (!all_pass(checks)) {
            ModelParams p = closed_form_params();
            p.markov_density = MarkovDensity::Doubled;
            const auto e = closed_form_error(p, options_for(th));
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "diagnostic: criterion 4 with density 2 kappa/pi: modulus %.3e, phase %.3e rad", e.modulus,
                          e.phase);
            ev.push_back(buf);
            if (e.modulus <= kClosedFormModulus && e.phase <= kClosedFormPhase) ev.push_back("c4-doubled-density-pass");
        }
        return checks;
    });
    run(5, "independent-boson limit", [&](auto&) { return criterion5(); });
    run(6, "Fock-state consistency", [&](auto&) { return criterion6(th); });
    run(7, "short-delay feedback preserves coherence at 300 K", [&](std::vector<std::string>& ev) {
        auto checks = criterion7_checks(figure_three_default(options_for(th)));
        if (opt.diagnostics) {
            const auto r = figure_three(figure_params_angular(CouplingMode::Markovian, 0.0, 300.0),
                                        figure_params_angular(CouplingMode::Feedback, 0.031, 300.0), options_for(th),
                                        options_for(th));
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "diagnostic: criterion 7 with angular reading: Markovian eta %.4f, ratio %.2f, maxima %ld",
                          r.markov_eta_end, r.feedback_mean / r.markov_eta_end, r.maxima);
            ev.push_back(buf);
        }
        return checks;
    });
    run(8, "long-delay feedback narrows the satellites", [&](std::vector<std::string>& ev) { return criterion8(th, ev); });
    run(9, "feedback-phase hot spots above 50 K", [&](std::vector<std::string>& ev) {
        auto checks = criterion9(th, ev);
        if (opt.diagnostics) {
            SweepGrid g;
            g.temperatures = {10.0, 40.0, 300.0};
            g.phases = {pi, 2.0 * pi};
            g.observable = {SweepObservable::Kind::EtaStd, 0.0, 0.0, kFigureT};
            const auto pts = run_sweep(figure_params_angular(CouplingMode::Feedback, 0.031, 300.0), g, options_for(0), th);
            const auto ang = figure_six_checks(g.temperatures, pts, 2, "");
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "diagnostic: criterion 9 with angular reading: std(2pi)-std(pi) at 300 K %.3e, low-T ratio %.3f",
                          ang[0].value, ang[1].value);
            ev.push_back(buf);
        }
        return checks;
    });
    run(10, "grid robustness", [&](std::vector<std::string>& ev) {
        auto checks = criterion10(th, ev);
        for (const auto& c : checks)
            if (c.name.rfind("criterion 4", 0) == 0 && c.value == 0.0) ev.push_back("c4-fails-at-all-grids");
        return checks;
    });

    if (log)
        for (const auto& d : report.diagnostics) std::fprintf(log, "%s\n", d.c_str());
    return report;
}

void write_acceptance_csv(const std::string& path, const AcceptanceReport& report) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    out << "criterion,check,value,relation,tolerance,pass\n";
    for (const auto& c : report.criteria)
        for (const auto& k : c.checks) {
            std::string name = k.name;
            std::replace(name.begin(), name.end(), ',', ';');
            out << c.id << ',' << name << ',' << format_number(k.value) << ',' << k.relation << ','
                << format_number(k.tolerance) << ',' << (k.pass ? 1 : 0) << '\n';
        }
}

bool only_known_failures(const AcceptanceReport& report) {
    for (const auto& c : report.criteria)
        if (!c.pass && c.known_failure.empty()) return false;
    return true;
}

}  // namespace lbc
