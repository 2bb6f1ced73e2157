#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "lbcoh/coherence.hpp"
#include "lbcoh/spectra.hpp"
#include "test_util.hpp"

using namespace lbc;
using lbc::test::error_code;
using lbc::test::reference_params;

namespace {

SimulationOptions window(double t_end) {
    SimulationOptions o;
    o.t_end = t_end;
    return o;
}

double max_in(const std::vector<double>& omegas, const std::vector<double>& v, double lo, double hi) {
    double m = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i)
        if (omegas[i] >= lo && omegas[i] <= hi) m = std::max(m, v[i]);
    return m;
}

long argmax(const std::vector<double>& v) {
    return static_cast<long>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

TEST_CASE("grid and Parseval") {
    const auto sim = simulate(reference_params(CouplingMode::Feedback, 0.031, 300.0), window(50e-12));
    const Spectrum s = absorption_spectrum(sim.trace);
    const double T = sim.times.t(sim.times.size() - 1) + sim.times.dt;
    CHECK(s.n_samples == sim.times.size());
    CHECK(s.padding == kDefaultPadding);
    CHECK(s.resolution == doctest::Approx(2.0 * pi / T).epsilon(1e-12));
    CHECK(s.bin_width == doctest::Approx(s.resolution / static_cast<double>(kDefaultPadding)).epsilon(1e-12));
    CHECK(std::is_sorted(s.omegas.begin(), s.omegas.end()));
    for (std::size_t i = 0; i < s.omegas.size(); ++i) {
        CHECK(std::isfinite(s.absorption[i]));
        CHECK(s.magnitude[i] >= std::abs(s.absorption[i]));
    }
    // sum |S|^2 d omega / 2 pi = int |P|^2 dt, independently summed here
    double spec = 0.0, sig = 0.0;
    for (double m : s.magnitude) spec += m * m * s.bin_width / (2.0 * pi);
    for (const cplx& p : sim.trace.P) sig += std::norm(p) * sim.times.dt;
    CHECK(spec == doctest::Approx(sig).epsilon(1e-10));
    CHECK(s.spectral_energy == doctest::Approx(s.signal_energy).epsilon(1e-10));
    CHECK(s.signal_energy == doctest::Approx(sig).epsilon(1e-12));
}

TEST_CASE("D = 0 gives the transform of the rectangular window") {
    ModelParams raw = reference_params();
    raw.D = 0.0;
    const auto sim = simulate(raw, window(20e-12));
    const Spectrum s = absorption_spectrum(sim.trace);
    const long k = argmax(s.magnitude);
    CHECK(std::abs(s.omegas[static_cast<std::size_t>(k)]) < 0.5 * s.bin_width);
    const double T = static_cast<double>(s.n_samples) * s.dt;
    CHECK(s.magnitude[static_cast<std::size_t>(k)] == doctest::Approx(0.5 * T).epsilon(1e-12));
    // first zero of the rectangle transform at 2 pi / T, i.e. every `padding` bins
    CHECK(s.magnitude[static_cast<std::size_t>(k + s.padding)] < 1e-12 * s.magnitude[static_cast<std::size_t>(k)]);
}

TEST_CASE("independent-boson sidebands follow the displacement expansion") {
    // P = e^{-g} / 2 sum_k g^k / k! e^{i (Delta - k omega0) t}, g = D^2 / omega0^2, Delta = D^2 / omega0
    ModelParams raw = reference_params();
    raw.kappa = 0.0;
    const auto sim = simulate(raw, window(1e-9));
    const Spectrum s = absorption_spectrum(sim.trace, SpectralWindow::exponential(1e10));
    const double w0 = sim.params.omega0, g = sim.params.D * sim.params.D / (w0 * w0), delta = g * w0;
    const double hw = 0.25 * w0;
    // absorptive part: Lorentzian lines whose tails fall off as (rate / distance)^2
    // the discrete sum carries the endpoint term dt P(0) / 2 on top of the continuous transform
    const double base = 0.5 * s.dt * sim.trace.P.front().real();
    auto peak = [&](double c, double width) { return max_in(s.omegas, s.absorption, c - width, c + width) - base; };
    const double h0 = peak(-delta, hw), h1 = peak(w0 - delta, hw), h2 = peak(2.0 * w0 - delta, hw);
    CHECK(h1 / h0 == doctest::Approx(g).epsilon(0.01));
    CHECK(h2 / h0 == doctest::Approx(g * g / 2.0).epsilon(0.05));
    // nothing on the anti-Stokes side at zero temperature beyond the carrier's tail
    CHECK(peak(-w0 - delta, 0.05 * w0) < 1e-2 * h1);

    const SatelliteMetrics sat = satellite_metrics(s, w0 - delta, hw);
    CHECK(std::abs(sat.position - (w0 - delta)) < 0.05 * s.bin_width + 1e-3 * sat.fwhm);
    // Lorentzian from the exponential window: FWHM = 2 rate, widened by the endpoint offset
    // (about 2% of this line's height) and the linear half-height interpolation
    CHECK(sat.fwhm == doctest::Approx(2e10).epsilon(0.04));
    CHECK(sat.bins_across >= 8.0);
    CHECK(s.window.kind == SpectralWindow::Kind::Exponential);
    CHECK(!s.window.describe().empty());
}

TEST_CASE("satellite metrics errors and symmetry") {
    // synthetic signal: carrier plus a symmetric pair at +-w1, |P| even, phase odd
    const double dt = 1e-14, w1 = 2e13, rate = 5e11;
    std::vector<double> t;
    std::vector<cplx> P;
    for (long n = 0; n < 4096; ++n) {
        t.push_back(static_cast<double>(n) * dt);
        const double x = t.back();
        P.push_back(std::exp(-rate * x) * (1.0 + 0.2 * std::cos(w1 * x)));
    }
    const Spectrum s = absorption_spectrum(t, P);
    const SatelliteMetrics up = satellite_metrics(s, w1, 0.3 * w1);
    const SatelliteMetrics down = satellite_metrics(s, -w1, 0.3 * w1);
    CHECK(up.position == doctest::Approx(-down.position).epsilon(1e-9));
    CHECK(up.fwhm == doctest::Approx(down.fwhm).epsilon(1e-9));
    CHECK(up.height == doctest::Approx(down.height).epsilon(1e-9));
    CHECK(up.position == doctest::Approx(w1).epsilon(1e-3));

    // too few bins across the peak
    CHECK(error_code([&] { satellite_metrics(s, w1, 0.3 * w1, 1e6); }) == ErrorCode::PeakNotResolved);
    // half-height crossing outside the search window
    CHECK(error_code([&] { satellite_metrics(s, w1, 0.1 * up.fwhm); }) == ErrorCode::PeakNotResolved);

    // non-uniform sampling
    auto bent = t;
    bent[100] += 0.3 * dt;
    CHECK(error_code([&] { absorption_spectrum(bent, P); }) == ErrorCode::NonUniformGrid);
}

TEST_CASE("Markovian satellites: broadened, and stable under doubling the window") {
    const ModelParams raw = reference_params(CouplingMode::Markovian, 0.0, 0.0);
    const auto a = simulate(raw, window(1e-9));
    const auto b = simulate(raw, window(2e-9));
    const Spectrum sa = absorption_spectrum(a.trace), sb = absorption_spectrum(b.trace);
    CHECK(sb.resolution == doctest::Approx(0.5 * sa.resolution).epsilon(1e-3));
    const double w0 = a.params.omega0, delta = a.params.D * a.params.D / w0;
    const SatelliteMetrics ma = satellite_metrics(sa, w0 - delta, 0.3 * w0);
    const SatelliteMetrics mb = satellite_metrics(sb, w0 - delta, 0.3 * w0);
    CHECK(std::abs(ma.position - mb.position) < sa.resolution);
    // broadened well beyond the window resolution
    CHECK(ma.fwhm > 4.0 * sa.resolution);
}
