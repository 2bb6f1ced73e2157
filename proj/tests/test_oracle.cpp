#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "lbcoh/oracle.hpp"
#include "lbcoh/propagators.hpp"
#include "test_util.hpp"

using namespace lbc;
using lbc::test::error_code;
using lbc::test::reference_params;

namespace {

std::vector<double> uniform_times(double t_end, long n) {
    std::vector<double> t(static_cast<std::size_t>(n + 1));
    for (long i = 0; i <= n; ++i) t[static_cast<std::size_t>(i)] = t_end * static_cast<double>(i) / static_cast<double>(n);
    return t;
}

}  // namespace

TEST_CASE("mode system") {
    const ModelParams p = validate(reference_params());
    const auto sys = make_mode_system(p, 1000, 100e-12);
    CHECK(sys.size() == 1000);
    CHECK(sys.d_omega == doctest::Approx(2.0 * pi / (1.25 * 100e-12)));
    CHECK(sys.recurrence_time() == doctest::Approx(125e-12));
    // symmetric about omega0 and never exactly on it
    CHECK(sys.omega.front() - p.omega0 == doctest::Approx(-(sys.omega.back() - p.omega0)));
    for (double w : sys.omega) CHECK(w != p.omega0);
    double sum = 0.0;
    for (double l : sys.lambda) sum += l * l;
    CHECK(sum == doctest::Approx(p.kappa / pi * 1000.0 * sys.d_omega).epsilon(1e-12));

    // feedback: sum lambda^2 approximates int s over the covered band
    const ModelParams f = validate(reference_params(CouplingMode::Feedback, 0.031));
    const auto fs = make_mode_system(f, 4096, 10e-12);
    CHECK(fs.d_omega == doctest::Approx(2.0 * pi / (1.25 * (10e-12 + *f.tau))));
    double fsum = 0.0;
    for (double l : fs.lambda) fsum += l * l;
    const double band = 4096.0 * fs.d_omega;
    const double lo = fs.omega.front() - 0.5 * fs.d_omega, hi = fs.omega.back() + 0.5 * fs.d_omega;
    const double exact = f.kappa / pi * (band - (std::sin(hi * *f.tau) - std::sin(lo * *f.tau)) / *f.tau);
    CHECK(fsum == doctest::Approx(exact).epsilon(1e-3));

    CHECK(error_code([&] { make_mode_system(p, 0, 1e-12); }) == ErrorCode::InvalidParameter);
    CHECK(error_code([&] { make_mode_system(p, 10, 1e-12, 1.0); }) == ErrorCode::RecurrenceTooShort);
}

TEST_CASE("free evolution without coupling") {
    ModelParams raw = reference_params();
    raw.kappa = 0.0;
    const ModelParams p = validate(raw);
    const auto sys = make_mode_system(p, 64, 20e-12);
    const auto t = uniform_times(20e-12, 200);
    const auto r = integrate(sys, t);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(std::abs(r.f[i] - std::polar(1.0, -p.omega0 * t[i])) < 1e-13);
        CHECK(std::abs(r.f[i]) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("input errors") {
    const ModelParams p = validate(reference_params());
    const auto sys = make_mode_system(p, 64, 20e-12);
    auto t = uniform_times(20e-12, 50);
    t[7] += 1e-15;
    CHECK(error_code([&] { integrate(sys, t); }) == ErrorCode::NonUniformGrid);
    CHECK(error_code([&] { integrate(sys, uniform_times(200e-12, 50)); }) == ErrorCode::RecurrenceTooShort);
    // a step far beyond the RK4 stability limit blows up the norm
    CHECK(error_code([&] { integrate(sys, uniform_times(20e-12, 50), 4.0 / (32.0 * sys.d_omega)); }) ==
          ErrorCode::NormDriftExceeded);
    CHECK(error_code([] { compare({0.0, 1.0}, {1.0, 1.0}, {1.0}); }) == ErrorCode::NonUniformGrid);
    const auto big = make_mode_system(p, 1025, 20e-12);
    CHECK(error_code([&] { integrate_exact(big, uniform_times(1e-12, 2)); }) == ErrorCode::InvalidParameter);
}

TEST_CASE("compare") {
    const auto t = uniform_times(1.0, 4);
    const std::vector<cplx> a = {1.0, 0.5, cplx(0.0, 1.0), 0.2, 0.1};
    const Deviation zero = compare(t, a, a);
    CHECK(zero.max_abs == 0.0);
    auto b = a;
    b[2] += 0.3;
    b[3] -= 0.1;
    const Deviation d = compare(t, a, b);
    CHECK(d.max_abs == doctest::Approx(0.3));
    CHECK(d.t_worst == doctest::Approx(0.5));
}

TEST_CASE("RK4 agrees with the exact diagonalisation") {
    const ModelParams p = validate(reference_params(CouplingMode::Feedback, 0.5));
    const auto sys = make_mode_system(p, 512, 60e-12);
    const auto t = uniform_times(60e-12, 300);
    const auto a = integrate(sys, t);
    const auto b = integrate_exact(sys, t);
    CHECK(compare(t, a.f, b.f).max_abs < 1e-8);
    CHECK(a.max_norm_drift < kNormTolerance);
    CHECK(a.dt_ode <= 0.05 / (256.0 * sys.d_omega) * (1.0 + 1e-12));
}

TEST_CASE("Markovian modes reproduce exponential decay and converge in M") {
    const ModelParams p = validate(reference_params());
    const double t_end = 5.0 / p.kappa;
    const auto t = uniform_times(t_end, 500);
    std::vector<cplx> analytic(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) analytic[i] = markov_F(t[i], p);

    double prev = 0.0;
    for (long M : {4096L, 2048L, 1024L, 512L, 64L}) {
        const auto r = integrate(make_mode_system(p, M, t_end), t);
        CHECK(r.max_norm_drift < kNormTolerance);
        const double dev = compare(t, r.f, analytic).max_abs;
        if (M == 4096) {
            CHECK(dev < 1e-3);
            for (std::size_t i = 0; i < t.size(); ++i) CHECK(std::abs(std::abs(r.f[i]) - std::exp(-p.kappa * t[i])) < 1e-3);
        } else {
            CHECK(dev > prev);
        }
        if (M == 64) CHECK(dev > 1e-3);
        prev = dev;
    }
}

TEST_CASE("feedback modes reproduce the roundtrip propagator") {
    const ModelParams p = validate(reference_params(CouplingMode::Feedback, 0.031));
    const double t_end = 4.0 * *p.tau;
    const auto t = uniform_times(t_end, 400);
    const auto r = integrate(make_mode_system(p, 4096, t_end), t);
    std::vector<cplx> analytic(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) analytic[i] = feedback_F(t[i], p);
    CHECK(compare(t, r.f, analytic).max_abs < 1e-3);
}
