#include "commands.hpp"

#include <fstream>
#include <future>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include <slgfm/errors.hpp>
#include <slgfm/io.hpp>
#include <slgfm/stability.hpp>

#include "reports.hpp"

namespace slgfm_cli {

namespace {

using slgfm::format_double;

const std::vector<std::string> kAllSignals = {
    "p",    "q",    "V",   "omega", "delta", "i_d", "i_q",
    "i_gd", "i_gq", "v_d", "v_q",   "e_d",   "e_q"};

std::string law_name(slgfm::ControlLaw law) {
    return law == slgfm::ControlLaw::Droop ? "droop" : "droop-i";
}

std::string ad_name(const std::optional<slgfm::AdController>& ad) {
    if (!ad) {
        return "none";
    }
    const char* kind = "";
    switch (ad->kind) {
        case slgfm::AdKind::InverterCurrent:
            kind = "inv-current";
            break;
        case slgfm::AdKind::GridCurrent:
            kind = "grid-current";
            break;
        case slgfm::AdKind::CapVoltage:
            kind = "cap-voltage";
            break;
    }
    return std::string(kind) + " (gain " + format_double(ad->gain) + ", T " +
           format_double(ad->time_const) + " s)";
}

struct ReactiveModel {
    slgfm::LinearPlant lp;
    slgfm::OlModel ol;
};

/// Operating point -> linearization -> optional AD augmentation -> the
/// reactive loop of the configured law.
ReactiveModel build_reactive(const ScenarioConfig& cfg) {
    const slgfm::OperatingPoint op =
        slgfm::solve_operating_point(cfg.plant, cfg.control);
    slgfm::LinearPlant lp = slgfm::linearize(cfg.plant, op);
    if (cfg.ad) {
        lp = slgfm::apply_ad(lp, *cfg.ad);
    }
    slgfm::OlModel ol =
        cfg.control.law == slgfm::ControlLaw::Droop
            ? slgfm::build_droop_ol(lp, cfg.control.D_q, cfg.control.T_q)
            : slgfm::build_droopI_ol(lp, cfg.control.D_q, cfg.control.k_pq,
                                     cfg.control.k_iq);
    return {std::move(lp), std::move(ol)};
}

int count_rhp(const std::vector<std::complex<double>>& ps, double eps) {
    int n = 0;
    for (const auto& p : ps) {
        if (p.real() > eps) {
            ++n;
        }
    }
    return n;
}

double nyquist_omega_max(const ScenarioConfig& cfg) {
    if (cfg.analysis.omega_max > 0.0) {
        return cfg.analysis.omega_max;
    }
    return 10.0 * slgfm::resonance_frequencies(cfg.plant).omega_LCL;
}

slgfm::StabilityVerdict run_nyquist(const ScenarioConfig& cfg,
                                    const slgfm::OlModel& ol,
                                    slgfm::NyquistReport& ny) {
    ny = slgfm::nyquist(ol, cfg.analysis.omega_min, nyquist_omega_max(cfg),
                        cfg.analysis.points);
    return slgfm::verdict(ol, ny);
}

void note_written(const std::filesystem::path& file) {
    std::cout << "wrote " << file.string() << '\n';
}

/// Sweep-parameter paths share the event-target grammar; the circuit values
/// additionally allowed here trigger a full rebuild, so the x_over_r rule is
/// re-applied (R_g re-derived) after every plant edit.
void set_parameter(ScenarioConfig& cfg, const std::string& path, double v) {
    static const std::map<std::string, double slgfm::ControlParams::*> kCtrl = {
        {"control.H", &slgfm::ControlParams::H},
        {"control.D_p", &slgfm::ControlParams::D_p},
        {"control.D_q", &slgfm::ControlParams::D_q},
        {"control.T_q", &slgfm::ControlParams::T_q},
        {"control.k_pq", &slgfm::ControlParams::k_pq},
        {"control.k_iq", &slgfm::ControlParams::k_iq},
        {"control.P_st", &slgfm::ControlParams::P_st},
        {"control.Q_st", &slgfm::ControlParams::Q_st},
        {"control.V_st", &slgfm::ControlParams::V_st},
        {"control.omega_st", &slgfm::ControlParams::omega_st},
    };
    static const std::map<std::string, double slgfm::PlantParams::*> kPlant = {
        {"plant.V_g", &slgfm::PlantParams::V_g},
        {"plant.omega_g", &slgfm::PlantParams::omega_g},
        {"plant.R_f", &slgfm::PlantParams::R_f},
        {"plant.R_g", &slgfm::PlantParams::R_g},
        {"plant.L_f", &slgfm::PlantParams::L_f},
        {"plant.C_f", &slgfm::PlantParams::C_f},
        {"plant.L_g", &slgfm::PlantParams::L_g},
        {"plant.x_over_r", &slgfm::PlantParams::x_over_r},
    };
    if (auto it = kCtrl.find(path); it != kCtrl.end()) {
        cfg.control.*(it->second) = v;
        return;
    }
    if (auto it = kPlant.find(path); it != kPlant.end()) {
        if (path == "plant.R_g") {
            // An explicit R_g replaces the ratio rule.
            cfg.plant.x_over_r = 0.0;
        } else if (cfg.plant.x_over_r > 0.0) {
            // Let finalize() re-derive R_g for the new value.
            cfg.plant.R_g = 0.0;
        }
        cfg.plant.*(it->second) = v;
        cfg.plant.finalize();
        return;
    }
    if (path == "ad.gain" || path == "ad.time_const") {
        if (!cfg.ad) {
            throw ConfigError("sweep.parameter: \"" + path +
                              "\" requires an ad block");
        }
        const double gain = path == "ad.gain" ? v : cfg.ad->gain;
        const double tc = path == "ad.time_const" ? v : cfg.ad->time_const;
        cfg.ad = slgfm::AdController::make(cfg.ad->kind, gain, tc);
        return;
    }
    throw ConfigError("sweep.parameter: unknown parameter path \"" + path +
                      "\"");
}

}  // namespace

void cmd_poles(const ScenarioConfig& cfg, const OutputOptions& out) {
    const ReactiveModel rm = build_reactive(cfg);
    const auto cl = slgfm::closed_loop_poles(rm.ol);
    const auto rows = pole_rows(rm.ol, cl);
    const auto file = out.out_dir / "poles.csv";
    write_pole_csv(file, rows, out.hz);
    std::cout << "reactive loop, law " << law_name(cfg.control.law)
              << ", active damping " << ad_name(cfg.ad) << '\n'
              << "open loop: " << rm.ol.ol_poles.size() << " poles, "
              << rm.ol.p_count << " RHP\n"
              << "closed loop: " << cl.size() << " poles, "
              << count_rhp(cl, rm.ol.stability_eps) << " RHP\n";
    note_written(file);
}

void cmd_routh(const ScenarioConfig& cfg, const OutputOptions& out) {
    if (cfg.control.law != slgfm::ControlLaw::DroopI) {
        throw ConfigError(
            "routh: the tableau tests the droop-i voltage-feedback "
            "characteristic factor; re-run with --law droop-i (the config "
            "must provide control.k_iq)");
    }
    // The closed forms are exact for the lossless circuit, so the tableau is
    // built on the zero-resistance copy of the configured plant.
    slgfm::PlantParams ll = cfg.plant.lossless();
    const slgfm::OperatingPoint op =
        slgfm::solve_operating_point(ll, cfg.control);
    const slgfm::CharCoeffs cc = slgfm::char_coeffs_lossless(
        ll, op, cfg.control.D_q, cfg.control.k_pq, cfg.control.k_iq);
    const slgfm::RouthReport rep = slgfm::routh(cc.to_polynomial());
    const auto file = out.out_dir / "routh.txt";
    write_text(file, routh_block(cc, rep));
    std::cout << "lossless characteristic factor: " << rep.sign_changes
              << " sign changes, " << rep.rhp_count << " RHP roots\n";
    note_written(file);
}

void cmd_nyquist(const ScenarioConfig& cfg, const OutputOptions& out) {
    const ReactiveModel rm = build_reactive(cfg);
    slgfm::NyquistReport ny;
    const slgfm::StabilityVerdict v = run_nyquist(cfg, rm.ol, ny);
    const auto csv = out.out_dir / "nyquist.csv";
    const auto txt = out.out_dir / "verdict.txt";
    write_nyquist_csv(csv, ny, out.hz);
    write_text(txt, verdict_block(law_name(cfg.control.law), ad_name(cfg.ad),
                                  v));
    std::cout << "N = " << v.N << ", P = " << v.P << ", Z = " << v.Z
              << " -> " << (v.stable ? "stable" : "unstable") << " ("
              << ny.samples.size() << " contour samples, closest approach to "
              << "-1: " << format_double(ny.closest_approach) << ")\n";
    note_written(csv);
    note_written(txt);
}

void cmd_margins(const ScenarioConfig& cfg, const OutputOptions& out) {
    const ReactiveModel rm = build_reactive(cfg);
    const slgfm::MarginReport m = slgfm::margins(rm.ol);
    const auto file = out.out_dir / "margins.txt";
    write_text(file, margins_block(law_name(cfg.control.law), ad_name(cfg.ad),
                                   m));
    std::cout << "GM "
              << (m.gm_finite ? format_double(m.gain_margin_db) + " dB"
                              : std::string("inf"))
              << ", PM "
              << (m.pm_finite ? format_double(m.phase_margin_deg) + " deg"
                              : std::string("inf"))
              << (m.reliable ? "" : " (unreliable: open loop has RHP poles)")
              << '\n';
    note_written(file);
}

void cmd_verdict(const ScenarioConfig& cfg, const OutputOptions& out) {
    const ReactiveModel rm = build_reactive(cfg);
    slgfm::NyquistReport ny;
    const slgfm::StabilityVerdict v = run_nyquist(cfg, rm.ol, ny);
    const auto file = out.out_dir / "verdict.txt";
    write_text(file, verdict_block(law_name(cfg.control.law), ad_name(cfg.ad),
                                   v));
    std::cout << "N = " << v.N << ", P = " << v.P << ", Z = " << v.Z << " -> "
              << (v.stable ? "stable" : "unstable") << '\n';
    note_written(file);
}

void cmd_simulate(const ScenarioConfig& cfg, const OutputOptions& out) {
    if (!cfg.analysis.has_scenario) {
        throw ConfigError("analysis.t_end: required by the simulate command");
    }
    slgfm::SimScenario sc;
    sc.pp = cfg.plant;
    sc.cp = cfg.control;
    sc.ad = cfg.ad;
    sc.events = cfg.analysis.events;
    sc.t_end = cfg.analysis.t_end;
    sc.dt = cfg.analysis.dt;
    sc.record_dt = cfg.analysis.record_dt;
    sc.record = cfg.analysis.record;

    const slgfm::SimTrace tr = slgfm::simulate(sc);

    const auto& columns =
        cfg.analysis.record.empty() ? kAllSignals : cfg.analysis.record;
    const auto csv = out.out_dir / "trace.csv";
    write_trace_csv(csv, tr, columns);

    std::ostringstream rep;
    rep << "simulation: t_end " << format_double(sc.t_end) << " s, dt "
        << format_double(sc.dt) << " s, " << sc.events.size() << " events\n";
    if (tr.diverged_at) {
        rep << "diverged at t = " << format_double(*tr.diverged_at)
            << " s (a state exceeded 100 p.u.)\n";
    } else {
        rep << "diverged: no\n";
    }
    if (cfg.analysis.has_fft) {
        rep << "fft signal: " << cfg.analysis.fft_signal << "\nfft window: ["
            << format_double(cfg.analysis.fft_start) << ", "
            << format_double(cfg.analysis.fft_end) << "] s\n";
        try {
            const slgfm::FftReport fft = slgfm::dominant_frequency(
                tr, cfg.analysis.fft_signal,
                {cfg.analysis.fft_start, cfg.analysis.fft_end});
            rep << "dominant frequency: " << format_double(fft.dominant_freq_hz)
                << " Hz\namplitude: " << format_double(fft.amplitude)
                << " p.u.\ngrowth rate: " << format_double(fft.growth_rate)
                << " 1/s\n";
        } catch (const std::invalid_argument& e) {
            // A diverged run legitimately may not cover the window; that is a
            // result, not an input error.
            if (!tr.diverged_at) {
                throw;
            }
            rep << "fft skipped: " << e.what() << '\n';
        }
    }
    const auto txt = out.out_dir / "sim_report.txt";
    write_text(txt, rep.str());
    if (tr.diverged_at) {
        std::cout << "diverged at t = " << format_double(*tr.diverged_at)
                  << " s\n";
    } else {
        std::cout << "completed " << format_double(sc.t_end) << " s\n";
    }
    note_written(csv);
    note_written(txt);
}

void cmd_sweep(const ScenarioConfig& cfg, const OutputOptions& out) {
    if (!cfg.sweep) {
        throw ConfigError("sweep: block required by the sweep command");
    }
    const SweepSpec& sw = *cfg.sweep;

    struct Result {
        std::vector<PoleRow> rows;
        int P = 0;
        int Z = 0;
    };
    // Values fan out as independent analyses; collection below restores
    // sweep order regardless of completion order.
    std::vector<std::future<Result>> tasks;
    tasks.reserve(sw.values.size());
    for (double v : sw.values) {
        tasks.push_back(std::async(std::launch::async, [cfg, &sw, v]() {
            ScenarioConfig sub = cfg;
            set_parameter(sub, sw.parameter, v);
            const ReactiveModel rm = build_reactive(sub);
            const auto cl = slgfm::closed_loop_poles(rm.ol);
            Result r;
            r.rows = pole_rows(rm.ol, cl);
            r.P = rm.ol.p_count;
            r.Z = count_rhp(cl, rm.ol.stability_eps);
            return r;
        }));
    }
    std::vector<Result> results(tasks.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::string where = "sweep[" + std::to_string(i) + "] " +
                                  sw.parameter + " = " +
                                  format_double(sw.values[i]) + ": ";
        try {
            results[i] = tasks[i].get();
        } catch (const slgfm::NumericalError& e) {
            throw slgfm::NumericalError(where + e.what());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(where + e.what());
        }
    }

    const auto poles_file = out.out_dir / "sweep.csv";
    {
        std::ofstream fs(poles_file, std::ios::binary);
        if (!fs) {
            throw std::runtime_error("cannot write " + poles_file.string());
        }
        fs << "index,value,label,re,im,kind,rhp\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            for (const PoleRow& r : results[i].rows) {
                const double im =
                    out.hz ? r.im / (2.0 * std::numbers::pi) : r.im;
                fs << i << ',' << format_double(sw.values[i]) << ',' << r.label
                   << ',' << format_double(r.re) << ',' << format_double(im)
                   << ',' << r.kind << ',' << (r.rhp ? '1' : '0') << '\n';
            }
        }
    }
    const auto verdict_file = out.out_dir / "sweep_verdicts.csv";
    {
        std::ofstream fs(verdict_file, std::ios::binary);
        if (!fs) {
            throw std::runtime_error("cannot write " + verdict_file.string());
        }
        fs << "index,value,P,N,Z,stable\n";
        for (std::size_t i = 0; i < results.size(); ++i) {
            // N recovered from the pole counts via Z = N + P.
            fs << i << ',' << format_double(sw.values[i]) << ','
               << results[i].P << ',' << results[i].Z - results[i].P << ','
               << results[i].Z << ',' << (results[i].Z == 0 ? '1' : '0')
               << '\n';
        }
    }
    std::cout << "swept " << sw.parameter << " over " << sw.values.size()
              << " values\n";
    note_written(poles_file);
    note_written(verdict_file);
}

}  // namespace slgfm_cli
