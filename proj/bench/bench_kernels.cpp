// Frequency reduction of the kernels: serial reference against the OpenMP path.
#include <benchmark/benchmark.h>

#include "lbcoh/coherence.hpp"
#include "lbcoh/kernels.hpp"

namespace {

struct Setup {
    lbc::ModelParams params;
    lbc::TimeGrid times;
    lbc::FrequencyGrid freq;
    lbc::PropagatorSet props;
};

Setup make_setup(lbc::CouplingMode mode, double t_end) {
    lbc::ModelParams raw;
    raw.omega0 = 1e12;
    raw.D = 2e11;
    raw.kappa = 2e10;
    raw.coupling_mode = mode;
    if (mode == lbc::CouplingMode::Feedback) raw.tau = 0.031 / raw.kappa;
    raw.T_reservoir = 300.0;
    raw.T_lb = 300.0;
    Setup s;
    s.params = lbc::validate(raw);
    s.times = lbc::make_time_grid(s.params, t_end);
    s.freq = lbc::make_frequency_grid(s.params, s.times);
    s.props = lbc::make_propagators(s.params, s.times);
    return s;
}

void run(benchmark::State& state, lbc::CouplingMode mode, bool serial) {
    const Setup s = make_setup(mode, static_cast<double>(state.range(0)) * 1e-12);
    lbc::KernelOptions opt;
    opt.serial_reference = serial;
    opt.threads = serial ? 1 : 0;
    for (auto _ : state) benchmark::DoNotOptimize(lbc::compute_kernels(s.params, s.props, s.freq, opt));
    state.counters["modes"] = static_cast<double>(s.freq.n_modes);
    state.counters["steps"] = static_cast<double>(s.times.size());
}

void BM_MarkovSerial(benchmark::State& st) { run(st, lbc::CouplingMode::Markovian, true); }
void BM_MarkovParallel(benchmark::State& st) { run(st, lbc::CouplingMode::Markovian, false); }
void BM_FeedbackSerial(benchmark::State& st) { run(st, lbc::CouplingMode::Feedback, true); }
void BM_FeedbackParallel(benchmark::State& st) { run(st, lbc::CouplingMode::Feedback, false); }

}  // namespace

BENCHMARK(BM_MarkovSerial)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MarkovParallel)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeedbackSerial)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FeedbackParallel)->Arg(50)->Arg(200)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
