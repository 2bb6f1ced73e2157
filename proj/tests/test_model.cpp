#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "lbcoh/coherence.hpp"
#include "lbcoh/model.hpp"
#include "test_util.hpp"

using namespace lbc;
using lbc::test::error_code;
using lbc::test::reference_params;

TEST_CASE("reference parameters validate") {
    const ModelParams p = validate(reference_params(CouplingMode::Markovian, 0.0, 300.0));
    CHECK(p.validated);
    CHECK(p.n_b == doctest::Approx(bose_occupation(1e12, 300.0)));
}

TEST_CASE("D = 0 is valid and leaves the coherence untouched") {
    ModelParams p = reference_params(CouplingMode::Markovian, 0.0, 300.0);
    p.D = 0.0;
    CHECK_NOTHROW(validate(p));
    SimulationOptions o;
    o.t_end = 5e-12;
    const auto sim = simulate(p, o);
    for (double e : sim.trace.eta) CHECK(e == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("validation errors") {
    ModelParams p = reference_params(CouplingMode::Feedback, 0.031);
    p.tau.reset();
    CHECK(error_code([&] { validate(p); }) == ErrorCode::MissingTau);

    ModelParams q = reference_params();
    q.omega0 = 0.0;
    CHECK(error_code([&] { validate(q); }) == ErrorCode::NonPositiveFrequency);
    q.omega0 = -1.0;
    CHECK(error_code([&] { validate(q); }) == ErrorCode::NonPositiveFrequency);

    ModelParams r = reference_params();
    r.T_lb = -1.0;
    CHECK(error_code([&] { validate(r); }) == ErrorCode::NegativeTemperature);

    ModelParams s = reference_params();
    s.p0 = {0.6, 0.0};
    CHECK(error_code([&] { validate(s); }) == ErrorCode::InvalidParameter);
    s.p0 = {0.0, 0.5};
    CHECK_NOTHROW(validate(s));

    ModelParams f = reference_params();
    f.lb_initial = LbInitial::fock(-1);
    CHECK(error_code([&] { validate(f); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("validate is idempotent") {
    for (auto mode : {CouplingMode::Markovian, CouplingMode::Feedback}) {
        const ModelParams a = validate(reference_params(mode, 0.031, 77.0));
        const ModelParams b = validate(a);
        CHECK(a.n_b == b.n_b);
        CHECK(a.density_scale == b.density_scale);
        CHECK(a.omega0 == b.omega0);
        CHECK(*a.tau == *b.tau);
    }
}

TEST_CASE("bose occupation") {
    CHECK(bose_occupation(1e12, 0.0) == 0.0);
    // hbar omega / kB T = 0.025461 at 1e12 rad/s and 300 K
    CHECK(std::abs(bose_occupation(1e12, 300.0) - 38.78) <= 0.01);
    for (double T : {3000.0, 1e4, 1e5}) {
        const double rj = PhysicalConstants::kB * T / (PhysicalConstants::hbar * 1e12);
        CHECK(std::abs(bose_occupation(1e12, T) / rj - 1.0) < 0.02);
    }
    CHECK(error_code([] { bose_occupation(0.0, 300.0); }) == ErrorCode::ZeroFrequency);
    CHECK(bose_occupation(0.0, 0.0) == 0.0);
}

TEST_CASE("bose occupation is monotone") {
    double prev = bose_occupation(1e10, 300.0);
    for (double w = 2e10; w < 1e14; w *= 1.7) {
        const double n = bose_occupation(w, 300.0);
        CHECK(n < prev);
        prev = n;
    }
    prev = bose_occupation(1e12, 1.0);
    for (double T = 2.0; T < 1e4; T *= 1.5) {
        const double n = bose_occupation(1e12, T);
        CHECK(n > prev);
        prev = n;
    }
}

TEST_CASE("coupling density") {
    const ModelParams fb = validate(reference_params(CouplingMode::Feedback, 0.031));
    const double tau = *fb.tau, k = fb.kappa;
    CHECK(std::abs(coupling_density(CouplingMode::Feedback, 2.0 * pi / tau, fb)) < 1e-12 * k);
    CHECK(coupling_density(CouplingMode::Feedback, pi / tau, fb) == doctest::Approx(2.0 * k / pi));

    ModelParams lit = reference_params();
    lit.markov_density = MarkovDensity::Doubled;
    lit = validate(lit);
    for (double w : {-3e12, 0.0, 1e12, 7e12}) {
        CHECK(coupling_density(CouplingMode::Markovian, w, lit) == doctest::Approx(2.0 * k / pi));
    }
    // default: the normalisation for which |F|^2 + Q = 1 holds with F = exp(-Bt)
    const ModelParams unit = validate(reference_params());
    CHECK(coupling_density(CouplingMode::Markovian, 1e12, unit) == doctest::Approx(k / pi));
}

TEST_CASE("feedback density is periodic and bounded") {
    const ModelParams fb = validate(reference_params(CouplingMode::Feedback, 1.0));
    const double period = 2.0 * pi / *fb.tau, bound = 2.0 * fb.kappa / pi;
    for (double w = -3e12; w < 3e12; w += 1.37e10) {
        const double s = coupling_density(CouplingMode::Feedback, w, fb);
        CHECK(s >= 0.0);
        CHECK(s <= bound * (1.0 + 1e-15));
        CHECK(coupling_density(CouplingMode::Feedback, w + period, fb) ==
              doctest::Approx(s).epsilon(1e-9).scale(bound));
    }
}

TEST_CASE("density terms reproduce the density") {
    for (auto mode : {CouplingMode::Markovian, CouplingMode::Feedback}) {
        const ModelParams p = validate(reference_params(mode, 0.5));
        const auto terms = density_terms(p);
        for (double w = -2e12; w < 2e12; w += 3.1e10) {
            double s = 0.0;
            for (const auto& t : terms) s += t.amplitude * std::cos(w * t.theta);
            CHECK(s == doctest::Approx(coupling_density(mode, w, p)).scale(p.kappa));
        }
    }
}

TEST_CASE("time grid") {
    const ModelParams m = validate(reference_params());
    const TimeGrid g = make_time_grid(m, 200e-12);
    CHECK(g.dt <= 2.0 * pi / (40.0 * m.omega0) * (1.0 + 1e-15));
    CHECK(g.t_end >= 200e-12 * (1.0 - 1e-12));
    CHECK(g.n_per_tau == 0);
    CHECK(error_code([&] { make_time_grid(m, 200e-12, 1e-12); }) == ErrorCode::InvalidParameter);

    for (double kt : {0.031, 1.0, 157.1}) {
        const ModelParams f = validate(reference_params(CouplingMode::Feedback, kt));
        const TimeGrid h = make_time_grid(f, 200e-12);
        CHECK(h.n_per_tau >= 3);
        CHECK(h.dt <= 2.0 * pi / (40.0 * f.omega0) * (1.0 + 1e-12));
        CHECK(static_cast<double>(h.n_per_tau) * h.dt == doctest::Approx(*f.tau).epsilon(1e-14));
    }
}

TEST_CASE("frequency grid") {
    for (double T : {0.0, 300.0}) {
        const ModelParams p = validate(reference_params(CouplingMode::Markovian, 0.0, T));
        const FrequencyGrid g = make_frequency_grid(p, make_time_grid(p, 50e-12));
        CHECK(g.omega_min < g.omega_max);
        for (double w : g.weights) CHECK(w > 0.0);
        const double total = std::accumulate(g.weights.begin(), g.weights.end(), 0.0);
        CHECK(total == doctest::Approx(g.omega_max - g.omega_min).epsilon(1e-12));
        if (T > 0.0) {
            // the infrared cutoff sits on a node
            const double k = g.ir_cutoff / g.d_omega;
            CHECK(std::abs(k - std::round(k)) < 1e-9);
        }
    }
    const ModelParams p = validate(reference_params());
    FrequencyOptions o;
    o.n_modes = 2;
    CHECK(error_code([&] { make_frequency_grid(p, make_time_grid(p, 1e-12), o); }) == ErrorCode::InvalidParameter);
}
