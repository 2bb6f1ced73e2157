#pragma once

#include <string>
#include <vector>

#include "lbcoh/coherence.hpp"
#include "lbcoh/model.hpp"

namespace lbc {

// Optional apodisation applied to P(t) before the transform.
struct SpectralWindow {
    enum class Kind { None, Exponential };
    Kind kind = Kind::None;
    double rate = 0.0;  // [1/s], multiplies P(t) by exp(-rate t)

    static SpectralWindow none() { return {}; }
    static SpectralWindow exponential(double rate) { return {Kind::Exponential, rate}; }
    std::string describe() const;
};

// One-sided transform S(omega) = int_0^T P(t) w(t) e^{+i omega t} dt on a zero-padded grid,
// ordered by increasing omega.
struct Spectrum {
    std::vector<double> omegas;      // [rad/s]
    std::vector<double> absorption;  // Re S
    std::vector<double> magnitude;   // |S|
    SpectralWindow window;
    double resolution = 0.0;  // 2 pi / (window length), the intrinsic resolution
    double bin_width = 0.0;   // spacing of the padded grid
    long n_samples = 0;
    long padding = 0;
    double dt = 0.0;
    double spectral_energy = 0.0;  // sum |S|^2 bin_width / 2 pi
    double signal_energy = 0.0;    // dt sum |P w|^2
};

constexpr long kDefaultPadding = 4;

Spectrum absorption_spectrum(const CoherenceTrace& trace, const SpectralWindow& window = {},
                             long padding = kDefaultPadding);

// Same for an explicitly sampled signal; throws NonUniformGrid unless the times are equispaced.
Spectrum absorption_spectrum(const std::vector<double>& times, const std::vector<cplx>& P,
                             const SpectralWindow& window = {}, long padding = kDefaultPadding);

struct SatelliteMetrics {
    double position = 0.0;  // parabolic-interpolated peak [rad/s]
    double fwhm = 0.0;      // from linearly interpolated half-height crossings [rad/s]
    double height = 0.0;
    double bins_across = 0.0;  // fwhm / bin_width
};

// Peak of the absorption inside [center - half_width, center + half_width].  Throws
// PeakNotResolved if either half-height crossing falls outside the search window or the
// peak spans fewer than min_bins bins of the padded grid.
SatelliteMetrics satellite_metrics(const Spectrum& spectrum, double center, double half_width,
                                   double min_bins = 8.0);

}  // namespace lbc
