#include "reports.hpp"

#include <fstream>
#include <numbers>
#include <sstream>

#include <slgfm/io.hpp>

namespace slgfm_cli {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::ofstream open_out(const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write " + file.string());
    }
    return out;
}

}  // namespace

std::vector<PoleRow> pole_rows(
    const slgfm::OlModel& m,
    const std::vector<std::complex<double>>& cl_poles) {
    std::vector<PoleRow> rows;
    rows.reserve(m.ol_poles.size() + cl_poles.size());
    const auto add = [&](const std::vector<std::complex<double>>& ps,
                         const char* kind) {
        for (std::size_t i = 0; i < ps.size(); ++i) {
            PoleRow row;
            row.label = "p" + std::to_string(i + 1);
            row.re = ps[i].real();
            row.im = ps[i].imag();
            row.kind = kind;
            row.rhp = ps[i].real() > m.stability_eps;
            rows.push_back(std::move(row));
        }
    };
    add(m.ol_poles, "OL");
    add(cl_poles, "CL");
    return rows;
}

void write_pole_csv(const std::filesystem::path& file,
                    const std::vector<PoleRow>& rows, bool hz) {
    std::ofstream out = open_out(file);
    out << "label,re,im,kind,rhp\n";
    for (const PoleRow& r : rows) {
        const double im = hz ? r.im / kTwoPi : r.im;
        out << r.label << ',' << slgfm::format_double(r.re) << ','
            << slgfm::format_double(im) << ',' << r.kind << ','
            << (r.rhp ? '1' : '0') << '\n';
    }
}

void write_nyquist_csv(const std::filesystem::path& file,
                       const slgfm::NyquistReport& rep, bool hz) {
    std::ofstream out = open_out(file);
    out << "omega,re,im\n";
    for (const auto& [omega, g] : rep.samples) {
        out << slgfm::format_double(hz ? omega / kTwoPi : omega) << ','
            << slgfm::format_double(g.real()) << ','
            << slgfm::format_double(g.imag()) << '\n';
    }
}

void write_trace_csv(const std::filesystem::path& file,
                     const slgfm::SimTrace& tr,
                     const std::vector<std::string>& columns) {
    std::ofstream out = open_out(file);
    out << 't';
    for (const std::string& c : columns) {
        out << ',' << c;
    }
    out << '\n';
    std::vector<const std::vector<double>*> cols;
    cols.reserve(columns.size());
    for (const std::string& c : columns) {
        cols.push_back(&tr.signal(c));
    }
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        out << slgfm::format_double(tr.t[i]);
        for (const auto* c : cols) {
            out << ',' << slgfm::format_double((*c)[i]);
        }
        out << '\n';
    }
}

std::string verdict_block(const std::string& law, const std::string& ad,
                          const slgfm::StabilityVerdict& v) {
    std::ostringstream os;
    os << "law:                                " << law << '\n'
       << "active damping:                     " << ad << '\n'
       << "open-loop RHP poles (P):            " << v.P << '\n'
       << "clockwise encirclements of -1 (N):  " << v.N << '\n'
       << "closed-loop RHP poles (Z = N + P):  " << v.Z << '\n'
       << "minimum phase:                      "
       << (v.minimum_phase ? "yes" : "no") << '\n'
       << "stable:                             " << (v.stable ? "yes" : "no")
       << '\n';
    return os.str();
}

std::string margins_block(const std::string& law, const std::string& ad,
                          const slgfm::MarginReport& m) {
    std::ostringstream os;
    os << "law:            " << law << '\n'
       << "active damping: " << ad << '\n'
       << "gain margin:    "
       << (m.gm_finite ? slgfm::format_double(m.gain_margin_db) + " dB"
                       : std::string("inf"))
       << '\n'
       << "phase margin:   "
       << (m.pm_finite ? slgfm::format_double(m.phase_margin_deg) + " deg"
                       : std::string("inf"))
       << '\n'
       << "reliable:       " << (m.reliable ? "yes" : "no") << '\n';
    if (!m.reliable) {
        os << "note: the open loop has right-half-plane poles; classical "
              "margins do not certify closed-loop stability here.\n";
    }
    return os.str();
}

std::string routh_block(const slgfm::CharCoeffs& cc,
                        const slgfm::RouthReport& rep) {
    std::ostringstream os;
    os << "Routh table of the lossless reactive-loop characteristic factor\n"
       << "  s^5 + a3 s^3 + a2 s^2 + a1 s + a0\n"
       << "  a3 = " << slgfm::format_double(cc.a3) << '\n'
       << "  a2 = " << slgfm::format_double(cc.a2) << '\n'
       << "  a1 = " << slgfm::format_double(cc.a1) << '\n'
       << "  a0 = " << slgfm::format_double(cc.a0) << '\n'
       << '\n'
       << "first column (sign in the limit eps -> 0+):\n";
    for (const auto& e : rep.first_column) {
        os << "  s^" << e.power << ": " << (e.sign >= 0 ? '+' : '-') << "  "
           << e.value.describe() << '\n';
    }
    os << '\n'
       << "sign changes:       " << rep.sign_changes << '\n'
       << "RHP roots:          " << rep.rhp_count << '\n'
       << "epsilon pivot used: " << (rep.used_epsilon ? "yes" : "no") << '\n'
       << "auxiliary row used: " << (rep.used_aux_row ? "yes" : "no") << '\n';
    if (rep.inconclusive) {
        os << "inconclusive: a degeneracy survived the auxiliary "
              "substitution\n";
    }
    return os.str();
}

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out = open_out(file);
    out << text;
}

}  // namespace slgfm_cli
