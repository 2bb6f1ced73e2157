#include "lbcoh/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "lbcoh/acceptance.hpp"
#include "lbcoh/errors.hpp"
#include "lbcoh/spectra.hpp"

namespace lbc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string output_path(const CliOptions& cli, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(cli.out_dir, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create output directory '" + cli.out_dir + "'");
    return (std::filesystem::path(cli.out_dir) / name).string();
}

RunConfig prepare(const CliOptions& cli) {
    if (cli.config_path.empty()) throw Error(ErrorCode::ConfigError, "--config is required");
    RunConfig cfg = load_config(cli.config_path);
    apply_overrides(cfg, cli);
    return cfg;
}

RunRecord base_record(const std::string& command, const RunConfig& cfg) {
    RunRecord r;
    r.command = command;
    r.config = describe_config(cfg);
    r.code_version = code_version();
    return r;
}

// Convergence flags recorded with every trace: unitarity of the propagators and the exact
// phase identity phi = Im int gamma.
void add_trace_checks(RunRecord& r, const Simulation& sim) {
    const double unitarity = unitarity_defect(sim);
    double phase = 0.0;
    for (long n = 0; n < sim.times.size(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        phase = std::max(phase, sim.params.D * sim.params.D *
                                    std::abs(sim.kernels.phi[i] - sim.kernels.Gamma2[i].imag()));
    }
    const bool unitary_density = sim.params.coupling_mode == CouplingMode::Feedback ||
                                 sim.params.markov_density == MarkovDensity::Unitary;
    r.convergence["unitarity_defect_below_1e-4"] = !unitary_density || unitarity < 1e-4;
    r.convergence["phase_identity_below_1e-4_rad"] = phase < 1e-4;
    r.diagnostics["unitarity_defect"] = format_number(unitarity);
    r.diagnostics["phase_identity_defect_rad"] = format_number(phase);
    r.diagnostics["n_modes"] = std::to_string(sim.frequencies.n_modes);
    r.diagnostics["d_omega_rad_per_s"] = format_number(sim.frequencies.d_omega);
    r.diagnostics["dt_s"] = format_number(sim.times.dt);
    r.diagnostics["n_steps"] = std::to_string(sim.times.n_steps);
}

}  // namespace

void apply_overrides(RunConfig& cfg, const CliOptions& cli) {
    if (cli.dt) cfg.simulation.dt = *cli.dt;
    if (cli.n_modes) cfg.simulation.frequency.n_modes = *cli.n_modes;
    if (cli.omega_min_frac) cfg.simulation.frequency.omega_min_frac = *cli.omega_min_frac;
    if (cli.threads < 0) throw Error(ErrorCode::ConfigError, "--threads must be >= 0");
    if (cfg.simulation.dt < 0.0) throw Error(ErrorCode::ConfigError, "--dt must be >= 0");
    if (cfg.simulation.frequency.n_modes < 0) throw Error(ErrorCode::ConfigError, "--n-modes must be >= 0");
    if (!(cfg.simulation.frequency.omega_min_frac > 0.0))
        throw Error(ErrorCode::ConfigError, "--omega-min-frac must be > 0");
    cfg.simulation.kernel.threads = cli.threads;
}

double evaluate_observable(const CoherenceTrace& tr, const SweepObservable& ob) {
    const double dt = tr.times.dt;
    if (ob.kind == SweepObservable::Kind::EtaAt) {
        // linear interpolation between the neighbouring samples
        const double x = ob.t_star / dt;
        const long n = std::min(static_cast<long>(std::floor(x)), tr.times.n_steps);
        if (n >= tr.times.n_steps) return tr.eta.back();
        const double f = x - static_cast<double>(n);
        return (1.0 - f) * tr.eta[static_cast<std::size_t>(n)] + f * tr.eta[static_cast<std::size_t>(n + 1)];
    }
    const long n0 = static_cast<long>(std::ceil(ob.t_from / dt - 1e-9));
    const long n1 = std::min(static_cast<long>(std::floor(ob.t_to / dt + 1e-9)), tr.times.n_steps);
    if (n1 <= n0) throw Error(ErrorCode::InvalidParameter, "observable window holds fewer than two samples");
    double mean = 0.0;
    for (long n = n0; n <= n1; ++n) mean += tr.eta[static_cast<std::size_t>(n)];
    mean /= static_cast<double>(n1 - n0 + 1);
    double var = 0.0;
    for (long n = n0; n <= n1; ++n) {
        const double d = tr.eta[static_cast<std::size_t>(n)] - mean;
        var += d * d;
    }
    return std::sqrt(var / static_cast<double>(n1 - n0 + 1));
}

std::vector<SweepPoint> run_sweep(const ModelParams& base, const SweepGrid& grid, const SimulationOptions& options,
                                  int threads) {
    if (grid.temperatures.empty()) throw Error(ErrorCode::ConfigError, "sweep_T: required for a sweep");
    const bool feedback = base.coupling_mode == CouplingMode::Feedback;
    if (feedback && grid.phases.empty()) throw Error(ErrorCode::ConfigError, "sweep_phase: required for feedback sweeps");
    for (double ph : grid.phases)
        if (!(ph > 0.0)) throw Error(ErrorCode::ConfigError, "sweep_phase: phases must be > 0");
    const std::size_t n_phase = feedback ? grid.phases.size() : 1;
    const std::size_t total = grid.temperatures.size() * n_phase;

    std::vector<SweepPoint> points(total);
    for (std::size_t a = 0; a < grid.temperatures.size(); ++a)
        for (std::size_t b = 0; b < n_phase; ++b) {
            SweepPoint& pt = points[a * n_phase + b];
            pt.T = grid.temperatures[a];
            pt.omega0_tau = feedback ? grid.phases[b] : kNaN;
            pt.kappa_tau = feedback ? base.kappa * grid.phases[b] / base.omega0 : kNaN;
        }

    SimulationOptions point_options = options;
    point_options.kernel.threads = 1;  // parallelism lives at the level of sweep points
    const long n_points = static_cast<long>(total);
#ifdef _OPENMP
    const int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nthreads)
#endif
    for (long k = 0; k < n_points; ++k) {
        SweepPoint& pt = points[static_cast<std::size_t>(k)];
        try {
            ModelParams p = base;
            p.T_reservoir = pt.T;
            p.T_lb = pt.T;
            if (feedback) p.tau = pt.omega0_tau / base.omega0;
            const Simulation sim = simulate(p, point_options);
            pt.value = evaluate_observable(sim.trace, grid.observable);
            pt.ok = true;
        } catch (const std::exception& e) {
            pt.value = kNaN;
            pt.error = e.what();
        }
    }
    (void)threads;
    return points;
}

int cmd_simulate(const CliOptions& cli) {
    const auto start = Clock::now();
    const RunConfig cfg = prepare(cli);
    const Simulation sim = simulate(cfg.params, cfg.simulation);
    RunRecord rec = base_record("simulate", cfg);
    add_trace_checks(rec, sim);
    const std::string trace_path = output_path(cli, "trace.csv");
    write_trace_csv(trace_path, sim.trace);
    rec.outputs.push_back(trace_path);
    if (cfg.dump_F) {
        const std::string f_path = output_path(cli, "F.csv");
        write_F_csv(f_path, sim.propagators);
        rec.outputs.push_back(f_path);
        rec.wall_time_s = seconds_since(start);
        write_run_record(f_path, rec);
    }
    rec.wall_time_s = seconds_since(start);
    write_run_record(trace_path, rec);
    std::printf("eta(t_end = %s s) = %s\n", format_number(sim.times.t(sim.times.n_steps)).c_str(),
                format_number(sim.trace.eta.back()).c_str());
    std::printf("wrote %s\n", trace_path.c_str());
    return 0;
}

int cmd_spectrum(const CliOptions& cli) {
    const auto start = Clock::now();
    const RunConfig cfg = prepare(cli);
    const Simulation sim = simulate(cfg.params, cfg.simulation);
    const Spectrum sp = absorption_spectrum(sim.trace, cfg.window);
    RunRecord rec = base_record("spectrum", cfg);
    add_trace_checks(rec, sim);
    rec.convergence["parseval_below_1e-10"] =
        std::abs(sp.spectral_energy - sp.signal_energy) <= 1e-10 * sp.signal_energy;

    std::vector<std::pair<std::string, std::string>> meta;
    // satellites sit near omega_eg -/+ omega0 in the convention exp(+i omega t)
    const double carrier = sim.params.omega_eg;
    const double hw = 0.5 * sim.params.omega0;
    for (int side : {-1, 1}) {
        const std::string tag = side < 0 ? "satellite_minus" : "satellite_plus";
        try {
            const auto m = satellite_metrics(sp, carrier + side * sim.params.omega0, hw);
            meta.emplace_back(tag + "_position_rad_per_s", format_number(m.position));
            meta.emplace_back(tag + "_fwhm_rad_per_s", format_number(m.fwhm));
            meta.emplace_back(tag + "_height", format_number(m.height));
            std::printf("%s: position %s rad/s, FWHM %s rad/s\n", tag.c_str(), format_number(m.position).c_str(),
                        format_number(m.fwhm).c_str());
        } catch (const Error& e) {
            meta.emplace_back(tag, e.what());
            rec.diagnostics[tag] = e.what();
        }
    }
    const std::string path = output_path(cli, "spectrum.csv");
    write_spectrum_csv(path, sp, meta);
    rec.outputs.push_back(path);
    rec.wall_time_s = seconds_since(start);
    write_run_record(path, rec);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_sweep(const CliOptions& cli) {
    const auto start = Clock::now();
    const RunConfig cfg = prepare(cli);
    const auto points = run_sweep(cfg.params, cfg.sweep, cfg.simulation, cli.threads);
    std::vector<SweepRow> rows;
    RunRecord rec = base_record("sweep", cfg);
    bool all_ok = true;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& pt = points[i];
        rows.push_back({pt.T, pt.omega0_tau, pt.value});
        if (!std::isnan(pt.kappa_tau))
            rec.diagnostics["point_" + std::to_string(i) + "_kappa_tau"] = format_number(pt.kappa_tau);
        if (!pt.ok) {
            all_ok = false;
            rec.diagnostics["point_" + std::to_string(i) + "_error"] = pt.error;
            std::fprintf(stderr, "point T=%g phase=%g failed: %s\n", pt.T, pt.omega0_tau, pt.error.c_str());
        }
    }
    rec.convergence["all_points_ok"] = all_ok;
    const std::string path = output_path(cli, "sweep.csv");
    write_sweep_csv(path, rows);
    rec.outputs.push_back(path);
    rec.wall_time_s = seconds_since(start);
    write_run_record(path, rec);
    std::printf("wrote %s (%zu points)\n", path.c_str(), rows.size());
    return all_ok ? 0 : 3;
}

int cmd_validate(const CliOptions& cli) {
    const auto start = Clock::now();
    AcceptanceOptions opt;
    opt.threads = cli.threads;
    const auto report = run_acceptance(opt, stdout);
    const std::string path = output_path(cli, "validation.csv");
    write_acceptance_csv(path, report);
    RunRecord rec;
    rec.command = "validate";
    rec.code_version = code_version();
    bool all_pass = true;
    for (const auto& c : report.criteria) {
        rec.convergence["criterion_" + std::to_string(c.id)] = c.pass;
        all_pass = all_pass && c.pass;
    }
    rec.outputs.push_back(path);
    rec.wall_time_s = seconds_since(start);
    write_run_record(path, rec);
    return all_pass ? 0 : 4;
}

}  // namespace lbc
