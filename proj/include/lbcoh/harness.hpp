#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lbcoh/coherence.hpp"
#include "lbcoh/config.hpp"
#include "lbcoh/output.hpp"

namespace lbc {

// Command-line overrides shared by all subcommands.
struct CliOptions {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    std::optional<double> dt;
    std::optional<long> n_modes;
    std::optional<double> omega_min_frac;
};

// Applies the command-line overrides on top of a parsed config.
void apply_overrides(RunConfig& config, const CliOptions& cli);

// Observable of a single trace.
double evaluate_observable(const CoherenceTrace& trace, const SweepObservable& observable);

struct SweepPoint {
    double T = 0.0;
    double omega0_tau = 0.0;  // NaN for Markovian sweeps
    double kappa_tau = 0.0;   // NaN for Markovian sweeps
    double value = 0.0;
    bool ok = false;
    std::string error;
};

// Evaluates the grid temperature-major.  Points run concurrently (threads <= 0: OpenMP
// default); each point is an isolated computation, so results do not depend on the thread
// count.  Failures are recorded per point and the sweep continues.
std::vector<SweepPoint> run_sweep(const ModelParams& base, const SweepGrid& grid,
                                  const SimulationOptions& options, int threads = 0);

int cmd_simulate(const CliOptions& cli);
int cmd_spectrum(const CliOptions& cli);
int cmd_sweep(const CliOptions& cli);
int cmd_validate(const CliOptions& cli);

}  // namespace lbc
