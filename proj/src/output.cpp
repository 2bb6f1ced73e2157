#include "lbcoh/output.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "lbcoh/errors.hpp"

#ifndef LBCOH_VERSION
#define LBCOH_VERSION "unknown"
#endif

namespace lbc {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

}  // namespace

void write_trace_csv(const std::string& path, const CoherenceTrace& tr) {
    auto out = open_out(path);
    out << "t_s,re_P,im_P,eta,abs_sigma_LB,abs_sigma_R,phase_sigma_S\n";
    for (long n = 0; n < tr.times.size(); ++n) {
        const auto i = static_cast<std::size_t>(n);
        out << format_number(tr.times.t(n)) << ',' << format_number(tr.P[i].real()) << ','
            << format_number(tr.P[i].imag()) << ',' << format_number(tr.eta[i]) << ','
            << format_number(std::abs(tr.sigma_LB[i])) << ',' << format_number(std::abs(tr.sigma_R[i])) << ','
            << format_number(std::arg(tr.sigma_S[i])) << '\n';
    }
    finish(out, path);
}

void write_spectrum_csv(const std::string& path, const Spectrum& sp,
                        const std::vector<std::pair<std::string, std::string>>& metadata) {
    auto out = open_out(path);
    out << "# window = " << sp.window.describe() << '\n'
        << "# resolution_rad_per_s = " << format_number(sp.resolution) << '\n'
        << "# bin_width_rad_per_s = " << format_number(sp.bin_width) << '\n'
        << "# zero_padding = " << sp.padding << '\n'
        << "# n_samples = " << sp.n_samples << '\n'
        << "# convention = S(omega) = dt sum_n P(t_n) w(t_n) exp(+i omega t_n)\n";
    for (const auto& [k, v] : metadata) out << "# " << k << " = " << v << '\n';
    out << "omega_rad_per_s,absorption,magnitude\n";
    for (std::size_t i = 0; i < sp.omegas.size(); ++i)
        out << format_number(sp.omegas[i]) << ',' << format_number(sp.absorption[i]) << ','
            << format_number(sp.magnitude[i]) << '\n';
    finish(out, path);
}

void write_sweep_csv(const std::string& path, const std::vector<SweepRow>& rows) {
    auto out = open_out(path);
    out << "T,omega0_tau,observable\n";
    for (const auto& r : rows)
        out << format_number(r.T) << ',' << format_number(r.omega0_tau) << ',' << format_number(r.observable) << '\n';
    finish(out, path);
}

void write_F_csv(const std::string& path, const PropagatorSet& props) {
    auto out = open_out(path);
    out << "t_s,re_F,im_F,abs_F\n";
    for (long n = 0; n < props.times.size(); ++n) {
        const cplx F = props.F[static_cast<std::size_t>(n)];
        out << format_number(props.times.t(n)) << ',' << format_number(F.real()) << ',' << format_number(F.imag())
            << ',' << format_number(std::abs(F)) << '\n';
    }
    finish(out, path);
}

std::string code_version() { return LBCOH_VERSION; }

std::string run_record_path(const std::string& data_path) { return data_path + ".run.json"; }

void write_run_record(const std::string& data_path, const RunRecord& r) {
    nlohmann::ordered_json j;
    j["command"] = r.command;
    j["code_version"] = r.code_version;
    j["config"] = r.config;
    j["convergence"] = r.convergence;
    j["diagnostics"] = r.diagnostics;
    j["outputs"] = r.outputs;
    j["wall_time_s"] = r.wall_time_s;
    const std::string path = run_record_path(data_path);
    auto out = open_out(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

}  // namespace lbc
