#pragma once

#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "lbcoh/model.hpp"

namespace lbc {

// One quantitative check inside a criterion: `value` compared against a pinned tolerance.
struct Check {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    std::string relation;  // "<", "<=", ">", ">=" : value relation tolerance
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    std::vector<Check> checks;
    bool pass = false;
    // Set when the failure is an understood limitation of the stated criterion; the reason is
    // printed next to the FAIL line.
    std::string known_failure;
    double seconds = 0.0;
};

struct AcceptanceReport {
    std::vector<CriterionResult> criteria;
    std::vector<std::string> diagnostics;
};

struct AcceptanceOptions {
    int threads = 0;
    std::set<int> only;  // empty = all criteria
    bool diagnostics = true;
};

// Parameter sets used by the figure-level criteria, with THz/GHz figures read as ordinary
// frequencies (omega = 2 pi f).
ModelParams figure_params(CouplingMode mode, double kappa_tau = 0.0, double temperature = 0.0);
// Same numbers read as angular frequencies.
ModelParams figure_params_angular(CouplingMode mode, double kappa_tau = 0.0, double temperature = 0.0);

// Runs criteria 1-10, printing one PASS/FAIL line per criterion to `log` (may be null).
AcceptanceReport run_acceptance(const AcceptanceOptions& options, std::FILE* log);

void write_acceptance_csv(const std::string& path, const AcceptanceReport& report);

// True when every failure in the report is marked as known.
bool only_known_failures(const AcceptanceReport& report);

}  // namespace lbc
