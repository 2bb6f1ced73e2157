// Command-line front end: simulate | spectrum | sweep | validate.
#include <CLI11.hpp>

#include <cstdio>
#include <exception>

#include "lbcoh/errors.hpp"
#include "lbcoh/harness.hpp"

int main(int argc, char** argv) {
    lbc::CliOptions opt;
    CLI::App app{"Coherence of an emitter coupled to a dissipative link boson"};
    app.require_subcommand(1);

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        auto* c = sub->add_option("--config", opt.config_path, "key = value configuration file");
        if (needs_config) c->required();
        sub->add_option("--out", opt.out_dir, "output directory")->capture_default_str();
        sub->add_option("--threads", opt.threads, "worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
        sub->add_option("--dt", opt.dt, "time step [s]")->check(CLI::PositiveNumber);
        sub->add_option("--n-modes", opt.n_modes, "target number of frequency nodes")->check(CLI::PositiveNumber);
        sub->add_option("--omega-min-frac", opt.omega_min_frac, "infrared cutoff in units of omega0")
            ->check(CLI::PositiveNumber);
    };
    auto* sim = app.add_subcommand("simulate", "write the coherence trace");
    auto* spec = app.add_subcommand("spectrum", "write the absorption spectrum");
    auto* sweep = app.add_subcommand("sweep", "temperature x feedback-phase sweep");
    auto* val = app.add_subcommand("validate", "run the acceptance checks");
    add_common(sim, true);
    add_common(spec, true);
    add_common(sweep, true);
    add_common(val, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*sim) return lbc::cmd_simulate(opt);
        if (*spec) return lbc::cmd_spectrum(opt);
        if (*sweep) return lbc::cmd_sweep(opt);
        if (*val) return lbc::cmd_validate(opt);
    } catch (const lbc::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return lbc::exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 2;
}
