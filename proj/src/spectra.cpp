#include "lbcoh/spectra.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

#include "lbcoh/errors.hpp"

namespace lbc {

std::string SpectralWindow::describe() const {
    if (kind == Kind::None) return "none";
    char buf[64];
    std::snprintf(buf, sizeof buf, "exponential(%.16e)", rate);
    return buf;
}

namespace {

struct FftwDeleter {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

Spectrum transform(double dt, const std::vector<cplx>& P, const SpectralWindow& window, long padding) {
    if (P.empty()) throw Error(ErrorCode::InvalidParameter, "empty trace");
    if (padding < 1) throw Error(ErrorCode::InvalidParameter, "padding must be >= 1");
    if (window.kind == SpectralWindow::Kind::Exponential && !(window.rate >= 0.0))
        throw Error(ErrorCode::InvalidParameter, "window rate must be >= 0");
    const long n = static_cast<long>(P.size());
    const long np = n * padding;

    Spectrum sp;
    sp.window = window;
    sp.n_samples = n;
    sp.padding = padding;
    sp.dt = dt;
    sp.resolution = 2.0 * pi / (static_cast<double>(n) * dt);
    sp.bin_width = 2.0 * pi / (static_cast<double>(np) * dt);

    std::unique_ptr<fftw_complex[], FftwDeleter> buf(fftw_alloc_complex(static_cast<std::size_t>(np)));
    // FFTW_ESTIMATE keeps the plan, and therefore the rounding, independent of timing.
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(np), buf.get(), buf.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
    double energy = 0.0;
    for (long i = 0; i < np; ++i) {
        cplx v = 0.0;
        if (i < n) {
            v = P[static_cast<std::size_t>(i)];
            if (window.kind == SpectralWindow::Kind::Exponential)
                v *= std::exp(-window.rate * static_cast<double>(i) * dt);
            energy += std::norm(v);
        }
        buf[i][0] = v.real();
        buf[i][1] = v.imag();
    }
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    sp.signal_energy = dt * energy;

    // bins k >= np/2 correspond to negative frequencies
    const auto unp = static_cast<std::size_t>(np);
    sp.omegas.resize(unp);
    sp.absorption.resize(unp);
    sp.magnitude.resize(unp);
    const long half = np / 2;
    double spec_energy = 0.0;
    for (long j = 0; j < np; ++j) {
        const long k = j - half;
        const long src = (k + np) % np;
        const cplx S = dt * cplx(buf[src][0], buf[src][1]);
        const auto uj = static_cast<std::size_t>(j);
        sp.omegas[uj] = static_cast<double>(k) * sp.bin_width;
        sp.absorption[uj] = S.real();
        sp.magnitude[uj] = std::abs(S);
        spec_energy += std::norm(S);
    }
    sp.spectral_energy = spec_energy * sp.bin_width / (2.0 * pi);
    return sp;
}

}  // namespace

Spectrum absorption_spectrum(const CoherenceTrace& trace, const SpectralWindow& window, long padding) {
    if (static_cast<long>(trace.P.size()) != trace.times.size())
        throw Error(ErrorCode::NonUniformGrid, "trace and time grid differ in length");
    return transform(trace.times.dt, trace.P, window, padding);
}

Spectrum absorption_spectrum(const std::vector<double>& times, const std::vector<cplx>& P,
                             const SpectralWindow& window, long padding) {
    if (times.size() != P.size() || times.size() < 2)
        throw Error(ErrorCode::NonUniformGrid, "need at least two samples with matching times");
    const double dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0)) throw Error(ErrorCode::NonUniformGrid, "times must increase");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - dt) > 1e-9 * dt)
            throw Error(ErrorCode::NonUniformGrid, "sample times are not equispaced");
    if (std::abs(times.front()) > 1e-9 * dt)
        throw Error(ErrorCode::NonUniformGrid, "one-sided transform expects samples starting at t = 0");
    return transform(dt, P, window, padding);
}

SatelliteMetrics satellite_metrics(const Spectrum& sp, double center, double half_width, double min_bins) {
    const auto& w = sp.omegas;
    const auto& a = sp.absorption;
    const auto lo_it = std::lower_bound(w.begin(), w.end(), center - half_width);
    const auto hi_it = std::upper_bound(w.begin(), w.end(), center + half_width);
    if (hi_it - lo_it < 3) throw Error(ErrorCode::PeakNotResolved, "search window holds fewer than 3 bins");
    const long lo = lo_it - w.begin();
    const long hi = (hi_it - w.begin()) - 1;

    long ip = lo;
    for (long i = lo; i <= hi; ++i)
        if (a[static_cast<std::size_t>(i)] > a[static_cast<std::size_t>(ip)]) ip = i;
    if (ip == lo || ip == hi) throw Error(ErrorCode::PeakNotResolved, "maximum sits on the search-window edge");

    SatelliteMetrics m;
    const double y0 = a[static_cast<std::size_t>(ip - 1)], y1 = a[static_cast<std::size_t>(ip)],
                 y2 = a[static_cast<std::size_t>(ip + 1)];
    const double curvature = y0 - 2.0 * y1 + y2;
    const double shift = curvature != 0.0 ? 0.5 * (y0 - y2) / curvature : 0.0;
    m.position = w[static_cast<std::size_t>(ip)] + shift * sp.bin_width;
    m.height = y1 - 0.25 * (y0 - y2) * shift;
    if (!(m.height > 0.0)) throw Error(ErrorCode::PeakNotResolved, "non-positive peak height");

    const double half = 0.5 * m.height;
    auto crossing = [&](long step) {
        for (long i = ip; i + step >= lo && i + step <= hi; i += step) {
            const double ya = a[static_cast<std::size_t>(i)], yb = a[static_cast<std::size_t>(i + step)];
            if (yb < half) {
                const double frac = (ya - half) / (ya - yb);
                return w[static_cast<std::size_t>(i)] + frac * (w[static_cast<std::size_t>(i + step)] - w[static_cast<std::size_t>(i)]);
            }
        }
        throw Error(ErrorCode::PeakNotResolved, "half-height crossing outside the search window");
    };
    const double left = crossing(-1), right = crossing(+1);
    m.fwhm = right - left;
    m.bins_across = m.fwhm / sp.bin_width;
    if (m.bins_across < min_bins) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "FWHM spans %.2f bins, need %.0f", m.bins_across, min_bins);
        throw Error(ErrorCode::PeakNotResolved, buf);
    }
    return m;
}

}  // namespace lbc
