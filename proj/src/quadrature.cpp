#include "lbcoh/quadrature.hpp"

#include <cmath>

#include "lbcoh/errors.hpp"

namespace lbc {

namespace {

constexpr int kSize[kStencilKinds] = {4, 4, 4, 3, 3, 2};
constexpr int kOffset[kStencilKinds] = {0, -1, -2, 0, -1, 0};

// mu_k = int_0^1 x^k e^{i theta x} dx, k = 0..3
std::array<cplx, 4> exp_moments(double theta) {
    std::array<cplx, 4> mu{};
    const cplx it(0.0, theta);
    if (std::abs(theta) < 1.0) {
        for (int k = 0; k < 4; ++k) {
            cplx term = 1.0, sum = 1.0 / (k + 1.0);
            for (int m = 1; m < 40; ++m) {
                term *= it / static_cast<double>(m);
                const cplx add = term / static_cast<double>(k + m + 1);
                sum += add;
                if (std::abs(add) < 1e-18) break;
            }
            mu[static_cast<std::size_t>(k)] = sum;
        }
        return mu;
    }
    const cplx e = std::exp(it);
    mu[0] = (e - 1.0) / it;
    for (int k = 1; k < 4; ++k)
        mu[static_cast<std::size_t>(k)] = (e - static_cast<double>(k) * mu[static_cast<std::size_t>(k - 1)]) / it;
    return mu;
}

// Monomial coefficients of the Lagrange basis on integer nodes.
void lagrange_coefficients(int size, int offset, double c[4][4]) {
    for (int j = 0; j < size; ++j) {
        double poly[4] = {1.0, 0.0, 0.0, 0.0};
        double denom = 1.0;
        const double xj = offset + j;
        int degree = 0;
        for (int m = 0; m < size; ++m) {
            if (m == j) continue;
            const double xm = offset + m;
            // poly *= (x - xm)
            for (int d = degree + 1; d > 0; --d) poly[d] = poly[d - 1] - xm * poly[d];
            poly[0] *= -xm;
            ++degree;
            denom *= xj - xm;
        }
        for (int d = 0; d < 4; ++d) c[j][d] = d <= degree ? poly[d] / denom : 0.0;
    }
}

}  // namespace

StepPlan::StepPlan(long n_steps, long kink_every) {
    if (n_steps < 1) throw Error(ErrorCode::InvalidParameter, "step plan needs at least one step");
    steps_.resize(static_cast<std::size_t>(n_steps));
    const long seg = kink_every > 0 ? kink_every : n_steps;
    for (long a = 0; a < n_steps; a += seg) {
        const long b = std::min(a + seg, n_steps);
        const long len = b - a;
        for (long n = a; n < b; ++n) {
            int kind;
            if (len >= 3)
                kind = n == a ? kCubicStart : (n == b - 1 ? kCubicEnd : kCubicMiddle);
            else if (len == 2)
                kind = n == a ? kQuadStart : kQuadEnd;
            else
                kind = kLinear;
            steps_[static_cast<std::size_t>(n)] = {kind, n + kOffset[kind]};
        }
    }
}

int StepPlan::stencil_size(int kind) { return kSize[kind]; }
int StepPlan::stencil_offset(int kind) { return kOffset[kind]; }

FilonWeights filon_weights(double theta) {
    const auto mu = exp_moments(theta);
    FilonWeights out;
    for (int kind = 0; kind < kStencilKinds; ++kind) {
        double c[4][4];
        lagrange_coefficients(kSize[kind], kOffset[kind], c);
        for (int j = 0; j < kSize[kind]; ++j) {
            cplx w = 0.0;
            for (int d = 0; d < 4; ++d) w += c[j][d] * mu[static_cast<std::size_t>(d)];
            out.w[static_cast<std::size_t>(kind)][static_cast<std::size_t>(j)] = w;
        }
    }
    return out;
}

std::vector<cplx> cumulative_filon(const std::vector<cplx>& f, double dt, double nu,
                                   const StepPlan& plan) {
    const long n_steps = plan.n_steps();
    if (static_cast<long>(f.size()) != n_steps + 1)
        throw Error(ErrorCode::NonUniformGrid, "sample count does not match the step plan");
    const auto weights = filon_weights(nu * dt);
    std::vector<cplx> out(f.size());
    cplx acc = 0.0;
    out[0] = acc;
    for (long n = 0; n < n_steps; ++n) {
        const Step& s = plan[n];
        const auto& w = weights.w[static_cast<std::size_t>(s.kind)];
        cplx local = 0.0;
        for (int j = 0; j < kSize[s.kind]; ++j)
            local += w[static_cast<std::size_t>(j)] * f[static_cast<std::size_t>(s.first + j)];
        acc += dt * std::polar(1.0, nu * dt * static_cast<double>(n)) * local;
        out[static_cast<std::size_t>(n + 1)] = acc;
    }
    return out;
}

std::vector<cplx> cumulative_integral(const std::vector<cplx>& f, double dt, const StepPlan& plan) {
    return cumulative_filon(f, dt, 0.0, plan);
}

std::vector<double> cumulative_integral(const std::vector<double>& f, double dt,
                                        const StepPlan& plan) {
    std::vector<cplx> fc(f.begin(), f.end());
    const auto res = cumulative_filon(fc, dt, 0.0, plan);
    std::vector<double> out(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) out[i] = res[i].real();
    return out;
}

}  // namespace lbc
