#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include <slgfm/loops.hpp>
#include <slgfm/simulator.hpp>
#include <slgfm/stability.hpp>

namespace slgfm_cli {

/// One line of a pole table: open- or closed-loop pole with its
/// right-half-plane flag.
struct PoleRow {
    std::string label;
    double re = 0.0;  ///< 1/s
    double im = 0.0;  ///< rad/s
    std::string kind;  ///< "OL" or "CL"
    bool rhp = false;
};

/// Open-loop poles of `m` followed by the closed-loop poles, both in the
/// library's (Re, Im) sort order, labelled p1..pn within each kind and
/// classified against m.stability_eps.
std::vector<PoleRow> pole_rows(
    const slgfm::OlModel& m,
    const std::vector<std::complex<double>>& cl_poles);

/// `label,re,im,kind,rhp` CSV.  With hz = true, the im column is emitted in
/// Hz (im / 2*pi); re stays in 1/s.
void write_pole_csv(const std::filesystem::path& file,
                    const std::vector<PoleRow>& rows, bool hz);

/// `omega,re,im` CSV over the full contour.  With hz = true, omega is
/// emitted in Hz.
void write_nyquist_csv(const std::filesystem::path& file,
                       const slgfm::NyquistReport& rep, bool hz);

/// `t,<signal>...` CSV with the requested column order.
void write_trace_csv(const std::filesystem::path& file,
                     const slgfm::SimTrace& tr,
                     const std::vector<std::string>& columns);

/// Textual verdict block (law / damping names are display strings).
std::string verdict_block(const std::string& law, const std::string& ad,
                          const slgfm::StabilityVerdict& v);

/// Textual margin block with the reliability caveat.
std::string margins_block(const std::string& law, const std::string& ad,
                          const slgfm::MarginReport& m);

/// Textual Routh table: the lossless characteristic-factor coefficients and
/// the first column with epsilon-limit signs.
std::string routh_block(const slgfm::CharCoeffs& cc,
                        const slgfm::RouthReport& rep);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace slgfm_cli
