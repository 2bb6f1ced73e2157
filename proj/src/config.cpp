#include "lbcoh/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "lbcoh/errors.hpp"

namespace lbc {

std::string SweepObservable::describe() const {
    char buf[128];
    if (kind == Kind::EtaAt)
        std::snprintf(buf, sizeof buf, "eta_at_t:%.16e", t_star);
    else
        std::snprintf(buf, sizeof buf, "eta_std_over:%.16e:%.16e", t_from, t_to);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void fail(const std::string& key, const std::string& why) {
    throw Error(ErrorCode::ConfigError, key + ": " + why);
}

double number(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) fail(key, "trailing characters in '" + value + "'");
        if (!std::isfinite(v)) fail(key, "value must be finite");
        return v;
    } catch (const std::logic_error&) {
        fail(key, "not a number: '" + value + "'");
    }
}

long integer(const std::string& key, const std::string& value) {
    const double v = number(key, value);
    if (v != std::floor(v) || std::abs(v) > 9e15) fail(key, "expected an integer");
    return static_cast<long>(v);
}

bool boolean(const std::string& key, const std::string& value) {
    const std::string v = lower(value);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(key, "expected true/false");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    return out;
}

std::vector<double> increasing_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split(value, ',')) out.push_back(number(key, item));
    if (out.empty()) fail(key, "list must not be empty");
    for (std::size_t i = 1; i < out.size(); ++i)
        if (!(out[i] > out[i - 1])) fail(key, "list must be strictly increasing");
    return out;
}

void apply(RunConfig& c, const std::string& key, const std::string& value, std::set<std::string>& seen) {
    ModelParams& p = c.params;
    if (key == "omega0") p.omega0 = number(key, value);
    else if (key == "D") p.D = number(key, value);
    else if (key == "kappa") p.kappa = number(key, value);
    else if (key == "tau") p.tau = number(key, value);
    else if (key == "omega_eg") p.omega_eg = number(key, value);
    else if (key == "coupling_mode") {
        const std::string v = lower(value);
        if (v == "markovian") p.coupling_mode = CouplingMode::Markovian;
        else if (v == "feedback") p.coupling_mode = CouplingMode::Feedback;
        else fail(key, "expected Markovian or Feedback");
    } else if (key == "T_reservoir") p.T_reservoir = number(key, value);
    else if (key == "T_lb") p.T_lb = number(key, value);
    else if (key == "lb_initial") {
        const std::string v = lower(value);
        if (v == "thermal") p.lb_initial = LbInitial::thermal();
        else if (v == "vacuum") p.lb_initial = LbInitial::vacuum();
        else if (v.rfind("fock:", 0) == 0) {
            const long n = integer(key, v.substr(5));
            if (n < 0) fail(key, "Fock occupation must be >= 0");
            p.lb_initial = LbInitial::fock(n);
        } else fail(key, "expected Thermal, Vacuum or Fock:<n>");
    } else if (key == "p0") {
        const auto parts = split(value, ',');
        if (parts.size() == 1) p.p0 = {number(key, parts[0]), 0.0};
        else if (parts.size() == 2) p.p0 = {number(key, parts[0]), number(key, parts[1])};
        else fail(key, "expected <re> or <re>,<im>");
    } else if (key == "markov_density") {
        const std::string v = lower(value);
        if (v == "unitary") p.markov_density = MarkovDensity::Unitary;
        else if (v == "doubled") p.markov_density = MarkovDensity::Doubled;
        else fail(key, "expected unitary or doubled");
    }
    // run control
    else if (key == "t_end") c.simulation.t_end = number(key, value);
    else if (key == "dt") c.simulation.dt = number(key, value);
    else if (key == "n_modes") c.simulation.frequency.n_modes = integer(key, value);
    else if (key == "omega_min_frac") c.simulation.frequency.omega_min_frac = number(key, value);
    else if (key == "band_factor") c.simulation.frequency.band_factor = number(key, value);
    else if (key == "band_tails") c.simulation.kernel.band_tails = boolean(key, value);
    else if (key == "dump_F") c.dump_F = boolean(key, value);
    else if (key == "window") {
        const std::string v = lower(value);
        if (v == "none") c.window = SpectralWindow::none();
        else if (v.rfind("exponential:", 0) == 0) c.window = SpectralWindow::exponential(number(key, v.substr(12)));
        else fail(key, "expected none or exponential:<rate>");
    } else if (key == "sweep_T") c.sweep.temperatures = increasing_list(key, value);
    else if (key == "sweep_phase") c.sweep.phases = increasing_list(key, value);
    else if (key == "observable") {
        const auto parts = split(lower(value), ':');
        if (parts.size() == 2 && parts[0] == "eta_at_t") {
            c.sweep.observable.kind = SweepObservable::Kind::EtaAt;
            c.sweep.observable.t_star = number(key, parts[1]);
        } else if (parts.size() == 3 && parts[0] == "eta_std_over") {
            c.sweep.observable.kind = SweepObservable::Kind::EtaStd;
            c.sweep.observable.t_from = number(key, parts[1]);
            c.sweep.observable.t_to = number(key, parts[2]);
        } else fail(key, "expected eta_at_t:<t> or eta_std_over:<t0>:<t1>");
    } else fail(key, "unknown key");
    if (!seen.insert(key).second) fail(key, "given more than once");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw Error(ErrorCode::ConfigError, "line " + std::to_string(lineno) + ": empty key or value");
        apply(c, key, value, seen);
        c.entries.emplace_back(key, value);
    }
    if (!seen.count("omega0")) throw Error(ErrorCode::ConfigError, "omega0: required");
    if (!(c.simulation.t_end > 0.0)) throw Error(ErrorCode::ConfigError, "t_end: must be > 0");
    if (c.simulation.dt < 0.0) throw Error(ErrorCode::ConfigError, "dt: must be >= 0");
    if (c.simulation.frequency.n_modes < 0) throw Error(ErrorCode::ConfigError, "n_modes: must be >= 0");
    if (!(c.simulation.frequency.omega_min_frac > 0.0))
        throw Error(ErrorCode::ConfigError, "omega_min_frac: must be > 0");
    if (!(c.simulation.frequency.band_factor >= 1.0))
        throw Error(ErrorCode::ConfigError, "band_factor: must be >= 1");
    // the observable only matters for sweeps; a plain trace config may keep the default
    const auto& ob = c.sweep.observable;
    const bool check_observable = seen.count("observable") || seen.count("sweep_T");
    if (check_observable && ob.kind == SweepObservable::Kind::EtaAt && !(ob.t_star >= 0.0 && ob.t_star <= c.simulation.t_end))
        throw Error(ErrorCode::ConfigError, "observable: t* must lie within [0, t_end]");
    if (check_observable && ob.kind == SweepObservable::Kind::EtaStd &&
        !(ob.t_from >= 0.0 && ob.t_from < ob.t_to && ob.t_to <= c.simulation.t_end))
        throw Error(ErrorCode::ConfigError, "observable: window must lie within [0, t_end]");
    if (c.window.kind == SpectralWindow::Kind::Exponential && c.window.rate < 0.0)
        throw Error(ErrorCode::ConfigError, "window: rate must be >= 0");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::map<std::string, std::string> describe_config(const RunConfig& c) {
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.16e", v);
        return std::string(buf);
    };
    const ModelParams& p = c.params;
    std::map<std::string, std::string> m;
    m["omega0"] = num(p.omega0);
    m["D"] = num(p.D);
    m["kappa"] = num(p.kappa);
    m["tau"] = p.tau ? num(*p.tau) : "none";
    m["omega_eg"] = num(p.omega_eg);
    m["coupling_mode"] = to_string(p.coupling_mode);
    m["T_reservoir"] = num(p.T_reservoir);
    m["T_lb"] = num(p.T_lb);
    m["lb_initial"] = to_string(p.lb_initial);
    m["p0"] = num(p.p0.real()) + "," + num(p.p0.imag());
    m["markov_density"] = to_string(p.markov_density);
    m["t_end"] = num(c.simulation.t_end);
    m["dt"] = num(c.simulation.dt);
    m["n_modes"] = std::to_string(c.simulation.frequency.n_modes);
    m["omega_min_frac"] = num(c.simulation.frequency.omega_min_frac);
    m["band_factor"] = num(c.simulation.frequency.band_factor);
    m["band_tails"] = c.simulation.kernel.band_tails ? "true" : "false";
    m["window"] = c.window.describe();
    m["observable"] = c.sweep.observable.describe();
    return m;
}

}  // namespace lbc
