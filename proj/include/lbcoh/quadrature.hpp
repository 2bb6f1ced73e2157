#pragma once

#include <array>
#include <complex>
#include <vector>

#include "lbcoh/model.hpp"

namespace lbc {

// Piecewise-polynomial cumulative quadrature on a uniform grid that may contain kinks
// (points where the integrand is continuous but not smooth).  Each step [t_n, t_{n+1}]
// is integrated with the cubic through four neighbouring samples that all lie inside
// the same smooth segment; short segments fall back to quadratic or linear stencils.
enum StencilKind : int {
    kCubicStart = 0,   // nodes n..n+3
    kCubicMiddle,      // nodes n-1..n+2
    kCubicEnd,         // nodes n-2..n+1
    kQuadStart,        // nodes n..n+2
    kQuadEnd,          // nodes n-1..n+1
    kLinear,           // nodes n..n+1
    kStencilKinds
};

struct Step {
    int kind;
    long first;  // index of the first stencil node
};

class StepPlan {
public:
    // kink_every = 0 means a single smooth segment.
    StepPlan(long n_steps, long kink_every);

    long n_steps() const { return static_cast<long>(steps_.size()); }
    const Step& operator[](long n) const { return steps_[static_cast<std::size_t>(n)]; }

    static int stencil_size(int kind);
    static int stencil_offset(int kind);  // first node relative to n

private:
    std::vector<Step> steps_;
};

// Weights w_j(theta) = int_0^1 L_j(x) e^{i theta x} dx for each stencil kind, where L_j are
// the Lagrange basis polynomials on the stencil nodes measured in steps from t_n.
struct FilonWeights {
    std::array<std::array<cplx, 4>, kStencilKinds> w{};
};

FilonWeights filon_weights(double theta);

// Cumulative integral I_n = int_0^{t_n} f(t) e^{i nu t} dt for samples f_n = f(n dt).
std::vector<cplx> cumulative_filon(const std::vector<cplx>& f, double dt, double nu,
                                   const StepPlan& plan);

// Non-oscillatory special case (nu = 0).
std::vector<cplx> cumulative_integral(const std::vector<cplx>& f, double dt, const StepPlan& plan);
std::vector<double> cumulative_integral(const std::vector<double>& f, double dt,
                                        const StepPlan& plan);

}  // namespace lbc
