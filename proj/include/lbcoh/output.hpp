#pragma once

#include <map>
#include <string>
#include <vector>

#include "lbcoh/coherence.hpp"
#include "lbcoh/propagators.hpp"
#include "lbcoh/spectra.hpp"

namespace lbc {

// Numbers are written with 17 significant digits in scientific notation so values round-trip.
std::string format_number(double v);

struct SweepRow {
    double T = 0.0;
    double omega0_tau = 0.0;  // NaN for Markovian sweeps
    double observable = 0.0;  // NaN when the point failed
};

void write_trace_csv(const std::string& path, const CoherenceTrace& trace);
void write_spectrum_csv(const std::string& path, const Spectrum& spectrum,
                        const std::vector<std::pair<std::string, std::string>>& metadata = {});
void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows);
void write_F_csv(const std::string& path, const PropagatorSet& props);

// Sidecar describing how an output file was produced.  Written next to the data file as
// "<file>.run.json"; the data files themselves carry no timestamps.
struct RunRecord {
    std::string command;
    std::map<std::string, std::string> config;
    std::string code_version;
    std::map<std::string, bool> convergence;
    std::map<std::string, std::string> diagnostics;
    std::vector<std::string> outputs;
    double wall_time_s = 0.0;
};

std::string code_version();
std::string run_record_path(const std::string& data_path);
void write_run_record(const std::string& data_path, const RunRecord& record);

}  // namespace lbc
