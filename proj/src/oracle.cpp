#include "lbcoh/oracle.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lbcoh/errors.hpp"

namespace lbc {

DiscreteModeSystem make_mode_system(const ModelParams& params, long n_modes, double t_end,
                                    double recurrence_factor) {
    const ModelParams p = params.validated ? params : validate(params);
    if (n_modes < 1) throw Error(ErrorCode::InvalidParameter, "oracle needs at least one mode");
    if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidParameter, "t_end must be > 0");
    if (!(recurrence_factor > 1.0))
        throw Error(ErrorCode::RecurrenceTooShort, "recurrence time 2 pi / d_omega must exceed t_end");
    DiscreteModeSystem sys;
    sys.omega0 = p.omega0;
    // The feedback kernel reaches back one roundtrip, so its first periodic image would land at
    // recurrence - tau; keep that image outside the window as well.
    const double memory = p.coupling_mode == CouplingMode::Feedback && p.tau ? *p.tau : 0.0;
    sys.d_omega = 2.0 * pi / (recurrence_factor * (t_end + memory));
    sys.omega.resize(static_cast<std::size_t>(n_modes));
    sys.lambda.resize(static_cast<std::size_t>(n_modes));
    const double centre = 0.5 * static_cast<double>(n_modes);
    for (long j = 0; j < n_modes; ++j) {
        const double w = p.omega0 + (static_cast<double>(j) + 0.5 - centre) * sys.d_omega;
        sys.omega[static_cast<std::size_t>(j)] = w;
        sys.lambda[static_cast<std::size_t>(j)] = std::sqrt(coupling_density(p.coupling_mode, w, p) * sys.d_omega);
    }
    return sys;
}

OracleResult integrate(const DiscreteModeSystem& sys, const std::vector<double>& times, double dt_ode,
                       double tolerance) {
    if (times.empty()) throw Error(ErrorCode::InvalidParameter, "no output times");
    const double spacing = times.size() > 1 ? times[1] - times[0] : times[0];
    for (std::size_t i = 1; i < times.size(); ++i)
        if (std::abs(times[i] - times[i - 1] - spacing) > 1e-9 * spacing)
            throw Error(ErrorCode::NonUniformGrid, "oracle output times must be equispaced");
    if (times.front() != 0.0) throw Error(ErrorCode::NonUniformGrid, "oracle output must start at t = 0");
    if (times.back() > sys.recurrence_time())
        throw Error(ErrorCode::RecurrenceTooShort, "t_end exceeds the mode-spacing recurrence time");

    const long M = sys.size();
    std::vector<double> delta(static_cast<std::size_t>(M));
    double max_delta = 0.0;
    for (long j = 0; j < M; ++j) {
        delta[static_cast<std::size_t>(j)] = sys.omega[static_cast<std::size_t>(j)] - sys.omega0;
        max_delta = std::max(max_delta, std::abs(delta[static_cast<std::size_t>(j)]));
    }
    if (dt_ode <= 0.0) dt_ode = max_delta > 0.0 ? 0.05 / max_delta : spacing;
    const long sub = times.size() > 1 ? std::max(1L, static_cast<long>(std::ceil(spacing / dt_ode - 1e-9))) : 1;
    const double h = times.size() > 1 ? spacing / static_cast<double>(sub) : 0.0;

    OracleResult res;
    res.times = times;
    res.dt_ode = h;
    res.f.resize(times.size());

    // y = (f, h_1..h_M) in the rotating frame; y' = -i (delta_j h_j + lambda_j f), f' = -i sum lambda_j h_j
    const auto n = static_cast<std::size_t>(M);
    std::vector<cplx> y(n + 1, 0.0), k(n + 1), acc(n + 1), tmp(n + 1);
    y[0] = 1.0;
    const cplx mi(0.0, -1.0);
    auto rhs = [&](const std::vector<cplx>& in, std::vector<cplx>& out) {
        cplx s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += sys.lambda[j] * in[j + 1];
        out[0] = mi * s;
        for (std::size_t j = 0; j < n; ++j) out[j + 1] = mi * (delta[j] * in[j + 1] + sys.lambda[j] * in[0]);
    };
    auto norm_drift = [&]() {
        double s = 0.0;
        for (const auto& v : y) s += std::norm(v);
        return std::abs(s - 1.0);
    };

    res.f[0] = 1.0;
    for (std::size_t out = 1; out < times.size(); ++out) {
        for (long step = 0; step < sub; ++step) {
            rhs(y, k);
            for (std::size_t j = 0; j <= n; ++j) {
                acc[j] = k[j];
                tmp[j] = y[j] + 0.5 * h * k[j];
            }
            rhs(tmp, k);
            for (std::size_t j = 0; j <= n; ++j) {
                acc[j] += 2.0 * k[j];
                tmp[j] = y[j] + 0.5 * h * k[j];
            }
            rhs(tmp, k);
            for (std::size_t j = 0; j <= n; ++j) {
                acc[j] += 2.0 * k[j];
                tmp[j] = y[j] + h * k[j];
            }
            rhs(tmp, k);
            for (std::size_t j = 0; j <= n; ++j) y[j] += h / 6.0 * (acc[j] + k[j]);
        }
        const double drift = norm_drift();
        res.max_norm_drift = std::max(res.max_norm_drift, drift);
        if (drift > tolerance) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "norm drift %.3e at t = %.6e s", drift, times[out]);
            throw Error(ErrorCode::NormDriftExceeded, buf);
        }
        res.f[out] = y[0] * std::polar(1.0, -sys.omega0 * times[out]);
    }
    return res;
}

OracleResult integrate_exact(const DiscreteModeSystem& sys, const std::vector<double>& times) {
    const long M = sys.size();
    if (M > 1024) throw Error(ErrorCode::InvalidParameter, "exact oracle limited to 1024 modes");
    const long n = M + 1;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    H(0, 0) = 0.0;
    for (long j = 0; j < M; ++j) {
        const auto u = static_cast<std::size_t>(j);
        H(j + 1, j + 1) = sys.omega[u] - sys.omega0;
        H(0, j + 1) = H(j + 1, 0) = sys.lambda[u];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    const Eigen::VectorXd& E = es.eigenvalues();
    const Eigen::RowVectorXd v0 = es.eigenvectors().row(0);

    OracleResult res;
    res.times = times;
    res.f.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        cplx s = 0.0;
        for (long k = 0; k < n; ++k) s += v0(k) * v0(k) * std::polar(1.0, -E(k) * times[i]);
        res.f[i] = s * std::polar(1.0, -sys.omega0 * times[i]);
    }
    return res;
}

Deviation compare(const std::vector<double>& times, const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.size() != b.size() || a.size() != times.size())
        throw Error(ErrorCode::NonUniformGrid, "compared series live on different grids");
    Deviation d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double e = std::abs(a[i] - b[i]);
        if (e > d.max_abs) {
            d.max_abs = e;
            d.t_worst = times[i];
        }
    }
    return d;
}

}  // namespace lbc
