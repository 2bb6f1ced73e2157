#pragma once

#include <complex>
#include <vector>

#include "lbcoh/model.hpp"

namespace lbc {

// The link-boson operator evolves linearly,
//   b(t) = F(t) b(0) + int G(t, omega) r(omega, 0) d omega.
// G is returned as a "shape": the value divided by the coupling amplitude g(omega), so that
// the density s(omega) = g^2 / c enters exactly once, when quadratures are formed.

cplx markov_F(double t, const ModelParams& params);
cplx markov_G(double t, double omega, const ModelParams& params);

cplx feedback_F(double t, const ModelParams& params);
// F(t) e^{i omega0 t}: the slowly varying envelope, computed without forming e^{-i omega0 t}.
cplx feedback_F_envelope(double t, const ModelParams& params);
cplx feedback_G(double t, double omega, const ModelParams& params);

// m-th roundtrip contribution (zero for t < m tau), evaluated from the closed form of the
// method-of-steps recursion.
cplx recursion_G(long m, double t, double omega, const ModelParams& params);

// sqrt(s(omega)): multiplies a shape to give the physical amplitude per unit sqrt(c).
double coupling_amplitude(double omega, const ModelParams& params);

struct PropagatorSet {
    TimeGrid times;
    CouplingMode mode = CouplingMode::Markovian;
    cplx B;                      // i omega0 + kappa
    std::vector<cplx> F;         // F(t_n)
    std::vector<cplx> envelope;  // F(t_n) e^{i omega0 t_n}

    cplx A(double omega) const { return cplx(0.0, -omega); }
};

PropagatorSet make_propagators(const ModelParams& params, const TimeGrid& times);

// Dense (time x frequency) matrix of G shapes; only meant for small grids.
std::vector<cplx> materialize_G(const ModelParams& params, const TimeGrid& times,
                                const std::vector<double>& omegas);

}  // namespace lbc
