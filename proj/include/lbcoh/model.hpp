#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace lbc {

using cplx = std::complex<double>;

constexpr double pi = 3.14159265358979323846;

// CODATA values; intentionally not configurable.
struct PhysicalConstants {
    static constexpr double hbar = 1.054571817e-34;  // J s
    static constexpr double kB = 1.380649e-23;        // J/K
};

enum class CouplingMode { Markovian, Feedback };

// Normalisation of the flat Markovian reservoir density.
//   Unitary: s = kappa/pi, the value for which |F|^2 + int s|G|^2 = 1 with F = exp(-Bt).
//   Doubled: s = 2 kappa/pi, the literal flat-coupling value; reproduces the Markovian
//            closed form for T_res = 0 but violates the commutator sum rule by 1 - exp(-2 kappa t).
enum class MarkovDensity { Unitary, Doubled };

struct LbInitial {
    enum class Kind { Thermal, Vacuum, Fock };
    Kind kind = Kind::Thermal;
    long fock_n = 0;

    static LbInitial thermal() { return {Kind::Thermal, 0}; }
    static LbInitial vacuum() { return {Kind::Vacuum, 0}; }
    static LbInitial fock(long n) { return {Kind::Fock, n}; }
};

// All physical inputs in SI units; every frequency is angular [rad/s].
struct ModelParams {
    double omega0 = 0.0;
    double D = 0.0;
    double kappa = 0.0;
    std::optional<double> tau;
    double omega_eg = 0.0;
    CouplingMode coupling_mode = CouplingMode::Markovian;
    double T_reservoir = 0.0;
    double T_lb = 0.0;
    LbInitial lb_initial = LbInitial::thermal();
    cplx p0 = {0.5, 0.0};
    MarkovDensity markov_density = MarkovDensity::Unitary;

    // Filled in by validate().
    bool validated = false;
    double n_b = 0.0;            // thermal occupation of the link boson at T_lb
    double density_scale = 0.0;  // s(omega) = density_scale * (shape factor)
};

ModelParams validate(const ModelParams& params);

// 1/(exp(hbar omega / kB T) - 1); zero at T = 0.
double bose_occupation(double omega, double T);

// s(omega) = g(omega)^2 / c expressed through kappa.
double coupling_density(CouplingMode mode, double omega, const ModelParams& params);

// The density written as Re sum_c a_c exp(i omega theta_c); used for analytic band tails.
struct DensityTerm {
    double amplitude;
    double theta;
};
std::vector<DensityTerm> density_terms(const ModelParams& params);

struct TimeGrid {
    double t_end = 0.0;
    double dt = 0.0;
    long n_steps = 0;
    long n_per_tau = 0;  // 0 in Markovian mode

    double t(long n) const { return static_cast<double>(n) * dt; }
    long size() const { return n_steps + 1; }
};

// Largest step allowed by the sampling rule dt <= 2 pi / (40 omega0).
double max_time_step(const ModelParams& params);

// dt_request <= 0 selects the largest admissible step.  In feedback mode the step is
// shrunk so that tau is an exact multiple (at least three steps per roundtrip).
TimeGrid make_time_grid(const ModelParams& params, double t_end, double dt_request = 0.0);

struct FrequencyOptions {
    double band_factor = 8.0;      // band is [-(W-1) omega0, (W+1) omega0]
    double omega_min_frac = 1e-3;  // infrared cutoff of the thermal excess, in units of omega0
    long n_modes = 0;              // 0 = derive from resolution rules
    double recurrence_factor = 1.25;
    long ir_points = 4;            // nodes per cutoff width for the Markovian thermal integral
    double kink_resolution = 1.25; // feedback thermal integral: d_omega <= kink_resolution / t_end
};

// Uniform grid omega_j = (j_first + j) * d_omega with composite-trapezoid weights.
struct FrequencyGrid {
    double omega_min = 0.0;
    double omega_max = 0.0;
    long n_modes = 0;
    double d_omega = 0.0;
    long j_first = 0;
    double ir_cutoff = 0.0;  // thermal excess is dropped for |omega| < ir_cutoff (Markovian, T > 0)
    std::vector<double> weights;

    double omega(long j) const { return static_cast<double>(j_first + j) * d_omega; }
};

FrequencyGrid make_frequency_grid(const ModelParams& params, const TimeGrid& time,
                                  const FrequencyOptions& options = {});

const char* to_string(CouplingMode mode);
const char* to_string(MarkovDensity density);
std::string to_string(const LbInitial& initial);

}  // namespace lbc
