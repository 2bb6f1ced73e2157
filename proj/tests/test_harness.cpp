#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nlohmann/json.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lbcoh/errors.hpp"
#include "lbcoh/harness.hpp"
#include "test_util.hpp"

using namespace lbc;
using lbc::test::error_code;
using lbc::test::reference_params;

namespace fs = std::filesystem;

namespace {

const char* kBase =
    "omega0 = 1e12\n"
    "D = 2e11\n"
    "kappa = 2e10\n"
    "coupling_mode = Feedback\n"
    "tau = 1.55e-12  # kappa tau = 0.031\n"
    "T_reservoir = 300\n"
    "T_lb = 300\n"
    "t_end = 20e-12\n";

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("lbcoh_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LBCOH_CLI) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
    const RunConfig c = parse_config(std::string(kBase) +
                                     "lb_initial = Fock:3\n"
                                     "p0 = 0.25, -0.1\n"
                                     "window = exponential:1e10\n"
                                     "observable = eta_std_over:0:2e-11\n"
                                     "sweep_T = 10, 50, 300\n"
                                     "sweep_phase = 3.14159, 6.28318\n"
                                     "n_modes = 1000\n");
    CHECK(c.params.omega0 == 1e12);
    CHECK(c.params.coupling_mode == CouplingMode::Feedback);
    CHECK(*c.params.tau == 1.55e-12);
    CHECK(c.params.lb_initial.kind == LbInitial::Kind::Fock);
    CHECK(c.params.lb_initial.fock_n == 3);
    CHECK(c.params.p0 == cplx(0.25, -0.1));
    CHECK(c.window.kind == SpectralWindow::Kind::Exponential);
    CHECK(c.window.rate == 1e10);
    CHECK(c.sweep.observable.kind == SweepObservable::Kind::EtaStd);
    CHECK(c.sweep.temperatures == std::vector<double>{10.0, 50.0, 300.0});
    CHECK(c.sweep.phases.size() == 2);
    CHECK(c.simulation.frequency.n_modes == 1000);
    CHECK(c.simulation.t_end == 20e-12);
    CHECK(c.entries.front().first == "omega0");
    CHECK(describe_config(c).at("coupling_mode") == "feedback");

    auto bad = [](const std::string& extra) {
        return error_code([&] { parse_config(std::string(kBase) + extra); });
    };
    CHECK(bad("colour = blue\n") == ErrorCode::ConfigError);
    CHECK(bad("D = 3e11\n") == ErrorCode::ConfigError);  // duplicate
    CHECK(bad("kappa2 = 1\n") == ErrorCode::ConfigError);
    CHECK(bad("omega_eg = 1e12x\n") == ErrorCode::ConfigError);
    CHECK(bad("lb_initial = squeezed\n") == ErrorCode::ConfigError);
    CHECK(bad("lb_initial = Fock:1.5\n") == ErrorCode::ConfigError);
    CHECK(bad("sweep_T = 300, 50\n") == ErrorCode::ConfigError);
    CHECK(bad("observable = eta_at_t:1e-9\n") == ErrorCode::ConfigError);
    CHECK(bad("just some words\n") == ErrorCode::ConfigError);
    CHECK(bad("n_modes = -4\n") == ErrorCode::ConfigError);
    CHECK(error_code([] { parse_config("D = 1e11\n"); }) == ErrorCode::ConfigError);
    CHECK(error_code([] { load_config("/nonexistent/lbcoh.cfg"); }) == ErrorCode::ConfigError);
}

TEST_CASE("command-line overrides") {
    RunConfig c = parse_config(kBase);
    CliOptions cli;
    cli.dt = 1e-14;
    cli.n_modes = 777;
    cli.omega_min_frac = 2e-3;
    cli.threads = 3;
    apply_overrides(c, cli);
    CHECK(c.simulation.dt == 1e-14);
    CHECK(c.simulation.frequency.n_modes == 777);
    CHECK(c.simulation.frequency.omega_min_frac == 2e-3);
    CHECK(c.simulation.kernel.threads == 3);
    cli.omega_min_frac = 0.0;
    CHECK(error_code([&] { apply_overrides(c, cli); }) == ErrorCode::ConfigError);
}

TEST_CASE("number format round-trips with 17 significant digits") {
    CHECK(format_number(1.0) == "1.0000000000000000e+00");
    CHECK(format_number(-0.25) == "-2.5000000000000000e-01");
    for (double v : {0.1, 1.0 / 3.0, 6.62607015e-34, -123456789.123456789, 2e300}) {
        const std::string s = format_number(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("observables") {
    const auto sim = simulate(reference_params(CouplingMode::Feedback, 0.031, 300.0), [] {
        SimulationOptions o;
        o.t_end = 20e-12;
        return o;
    }());
    const auto& tr = sim.trace;
    SweepObservable at;
    at.t_star = 5.0 * tr.times.dt;
    CHECK(evaluate_observable(tr, at) == doctest::Approx(tr.eta[5]).epsilon(1e-12));
    at.t_star = 5.5 * tr.times.dt;
    CHECK(evaluate_observable(tr, at) == doctest::Approx(0.5 * (tr.eta[5] + tr.eta[6])).epsilon(1e-12));
    SweepObservable sd;
    sd.kind = SweepObservable::Kind::EtaStd;
    sd.t_from = 0.0;
    sd.t_to = 2.0 * tr.times.dt;
    const double m = (tr.eta[0] + tr.eta[1] + tr.eta[2]) / 3.0;
    const double var = (std::pow(tr.eta[0] - m, 2) + std::pow(tr.eta[1] - m, 2) + std::pow(tr.eta[2] - m, 2)) / 3.0;
    CHECK(evaluate_observable(tr, sd) == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
}

TEST_CASE("sweeps: ordering, thread independence and the 1x1 case") {
    const ModelParams base = reference_params(CouplingMode::Feedback, 0.031, 0.0);
    SweepGrid grid;
    grid.temperatures = {10.0, 150.0, 300.0};
    grid.phases = {pi, 1.5 * pi, 2.0 * pi};
    grid.observable.t_star = 10e-12;
    SimulationOptions o;
    o.t_end = 10e-12;
    const auto a = run_sweep(base, grid, o, 1);
    const auto b = run_sweep(base, grid, o, 3);
    REQUIRE(a.size() == 9);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].ok);
        CHECK(a[i].T == grid.temperatures[i / 3]);
        CHECK(a[i].omega0_tau == grid.phases[i % 3]);
        CHECK(a[i].kappa_tau == doctest::Approx(base.kappa * grid.phases[i % 3] / base.omega0));
        CHECK(a[i].value == b[i].value);
    }
    // eta decreases with temperature at fixed phase
    for (std::size_t j = 0; j < 3; ++j) CHECK(a[6 + j].value < a[j].value);

    SweepGrid one;
    one.temperatures = {300.0};
    one.phases = {2.0 * pi};
    one.observable = grid.observable;
    const auto single = run_sweep(base, one, o, 1);
    ModelParams p = base;
    p.T_reservoir = p.T_lb = 300.0;
    p.tau = 2.0 * pi / p.omega0;
    CHECK(single.at(0).value == evaluate_observable(simulate(p, o).trace, one.observable));

    // failing points are recorded and the sweep carries on
    SweepGrid broken = one;
    broken.temperatures = {-5.0, 300.0};
    const auto r = run_sweep(base, broken, o, 1);
    CHECK(!r[0].ok);
    CHECK(std::isnan(r[0].value));
    CHECK(!r[0].error.empty());
    CHECK(r[1].ok);
}

TEST_CASE("feedback keeps coherence where the Markovian reservoir destroys it") {
    SimulationOptions o;
    o.t_end = 200e-12;
    const auto fb = simulate(reference_params(CouplingMode::Feedback, 0.031, 300.0), o);
    const auto mk = simulate(reference_params(CouplingMode::Markovian, 0.0, 300.0), o);
    CHECK(mk.trace.eta.back() < 1e-6);
    CHECK(fb.trace.eta.back() > 1e3 * mk.trace.eta.back());
    CHECK(fb.trace.eta.back() > 0.0);
}

TEST_CASE("fault injection: a perturbed propagator fails the unitarity check") {
    SimulationOptions o;
    o.t_end = 20e-12;
    Simulation sim = simulate(reference_params(CouplingMode::Feedback, 0.031), o);
    CHECK(unitarity_defect(sim) < 1e-4);
    for (auto& f : sim.propagators.F) f += 1e-2;
    CHECK(unitarity_defect(sim) > 1e-4);
}

TEST_CASE("exit codes map error classes") {
    CHECK(exit_code_for(ErrorCode::ConfigError) == 2);
    CHECK(exit_code_for(ErrorCode::InvalidParameter) == 2);
    CHECK(exit_code_for(ErrorCode::NormDriftExceeded) == 3);
    CHECK(exit_code_for(ErrorCode::QuadratureNotConverged) == 3);
    CHECK(exit_code_for(ErrorCode::RecurrenceTooShort) == 3);
}

TEST_CASE("cli: outputs, run records, determinism and exit codes") {
    const fs::path dir = scratch("cli");
    spit(dir / "run.cfg", std::string(kBase) + "sweep_T = 10, 300\nsweep_phase = 3.14159, 6.28318\nobservable = eta_at_t:1e-11\n");
    const std::string cfg = "--config " + (dir / "run.cfg").string();

    REQUIRE(run_cli("simulate " + cfg + " --out " + (dir / "a").string()) == 0);
    REQUIRE(run_cli("simulate " + cfg + " --out " + (dir / "b").string() + " --threads 2") == 0);
    const std::string trace = slurp(dir / "a" / "trace.csv");
    CHECK(trace == slurp(dir / "b" / "trace.csv"));
    CHECK(trace.rfind("t_s,re_P,im_P,eta,", 0) == 0);
    CHECK(trace.find("\n0.0000000000000000e+00,5.0000000000000000e-01,") != std::string::npos);

    REQUIRE(fs::exists(dir / "a" / "trace.csv.run.json"));
    const auto rec = nlohmann::json::parse(slurp(dir / "a" / "trace.csv.run.json"));
    CHECK(rec["command"] == "simulate");
    CHECK(rec["config"]["coupling_mode"] == "feedback");
    CHECK(rec["code_version"].is_string());
    CHECK(rec["convergence"]["unitarity_defect_below_1e-4"] == true);
    CHECK(rec["outputs"].size() == 1);
    CHECK(rec.contains("wall_time_s"));

    REQUIRE(run_cli("spectrum " + cfg + " --out " + (dir / "a").string()) == 0);
    const std::string spec = slurp(dir / "a" / "spectrum.csv");
    CHECK(spec.rfind("# window = none", 0) == 0);
    CHECK(spec.find("\nomega_rad_per_s,absorption,magnitude\n") != std::string::npos);
    CHECK(fs::exists(dir / "a" / "spectrum.csv.run.json"));

    REQUIRE(run_cli("sweep " + cfg + " --out " + (dir / "a").string() + " --threads 1") == 0);
    REQUIRE(run_cli("sweep " + cfg + " --out " + (dir / "b").string() + " --threads 2") == 0);
    const std::string sweep = slurp(dir / "a" / "sweep.csv");
    CHECK(sweep == slurp(dir / "b" / "sweep.csv"));
    CHECK(sweep.rfind("T,omega0_tau,observable\n1.0000000000000000e+01," + format_number(3.14159) + ",", 0) == 0);
    CHECK(fs::exists(dir / "a" / "sweep.csv.run.json"));

    // configuration problems: 2
    CHECK(run_cli("simulate --config " + (dir / "missing.cfg").string()) == 2);
    spit(dir / "bad.cfg", std::string(kBase) + "colour = blue\n");
    CHECK(run_cli("simulate --config " + (dir / "bad.cfg").string()) == 2);
    CHECK(run_cli("simulate " + cfg + " --omega-min-frac -1") == 2);
    CHECK(run_cli("frobnicate") == 2);
    spit(dir / "neg.cfg", "omega0 = 1e12\nT_reservoir = -3\n");
    CHECK(run_cli("simulate --config " + (dir / "neg.cfg").string() + " --out " + (dir / "c").string()) == 2);
    // a failed sweep point is a convergence-class failure: 3
    spit(dir / "sweep_bad.cfg", std::string(kBase) + "sweep_T = -5, 300\nsweep_phase = 6.28318\nobservable = eta_at_t:1e-11\n");
    CHECK(run_cli("sweep --config " + (dir / "sweep_bad.cfg").string() + " --out " + (dir / "c").string()) == 3);

    fs::remove_all(dir.parent_path());
}
