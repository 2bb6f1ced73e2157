#pragma once

#include <map>
#include <string>
#include <vector>

#include "lbcoh/coherence.hpp"
#include "lbcoh/model.hpp"
#include "lbcoh/spectra.hpp"

namespace lbc {

// Sweep axes: temperature (applied to reservoir and link boson alike) x feedback phase
// omega0 tau, realised by moving tau at fixed omega0.
struct SweepObservable {
    enum class Kind { EtaAt, EtaStd };
    Kind kind = Kind::EtaAt;
    double t_star = 200e-12;  // EtaAt
    double t_from = 0.0;      // EtaStd window
    double t_to = 200e-12;
    std::string describe() const;
};

struct SweepGrid {
    std::vector<double> temperatures;  // [K], strictly increasing
    std::vector<double> phases;        // [rad], strictly increasing; ignored when Markovian
    SweepObservable observable;
};

// Everything a run needs.  `entries` keeps the parsed key/value pairs in file order for the
// run record.
struct RunConfig {
    ModelParams params;
    SimulationOptions simulation;
    SpectralWindow window;
    SweepGrid sweep;
    bool dump_F = false;
    std::vector<std::pair<std::string, std::string>> entries;
};

// Flat "key = value" text; '#' starts a comment.  Model keys are the ModelParams field names
// (SI units, angular frequencies); the remaining keys control grids and outputs.  Unknown
// keys, malformed numbers and missing required keys raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

// Canonical key/value listing of a config (used in run records).
std::map<std::string, std::string> describe_config(const RunConfig& config);

}  // namespace lbc
