#include "slgfm/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "slgfm/errors.hpp"

namespace slgfm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDivergenceGuard = 100.0;  // p.u.

/// State layout: 6 circuit states (grid frame), swing pair, one controller
/// state, two optional AD washout states.
constexpr int kIdxDelta = 6;
constexpr int kIdxOmega = 7;
constexpr int kIdxCtrl = 8;
constexpr int kIdxAd = 9;
using State = std::array<double, 11>;

const std::vector<std::string>& signal_names() {
    static const std::vector<std::string> names = {
        "p",    "q",    "V",    "omega", "delta", "i_d", "i_q",
        "i_gd", "i_gq", "v_d",  "v_q",   "e_d",   "e_q"};
    return names;
}

/// Parameters that events may mutate mid-run.
struct RunParams {
    PlantParams pp;
    ControlParams cp;
    bool has_ad = false;
    AdKind ad_kind = AdKind::InverterCurrent;
    double ad_gain = 0.0;
    double ad_T = 1.0;
    double ad_sign = 1.0;
    int ad_ch = 0;  // d-axis state index of the measured pair
};

void apply_event(RunParams& rp, const EventStep& ev) {
    const std::string& t = ev.target;
    double* slot = nullptr;
    if (t == "control.T_q") slot = &rp.cp.T_q;
    else if (t == "control.k_pq") slot = &rp.cp.k_pq;
    else if (t == "control.k_iq") slot = &rp.cp.k_iq;
    else if (t == "control.D_q") slot = &rp.cp.D_q;
    else if (t == "control.D_p") slot = &rp.cp.D_p;
    else if (t == "control.H") slot = &rp.cp.H;
    else if (t == "control.P_st") slot = &rp.cp.P_st;
    else if (t == "control.Q_st") slot = &rp.cp.Q_st;
    else if (t == "control.V_st") slot = &rp.cp.V_st;
    else if (t == "control.omega_st") slot = &rp.cp.omega_st;
    else if (t == "plant.V_g") slot = &rp.pp.V_g;
    else if (t == "plant.omega_g") slot = &rp.pp.omega_g;
    else if (t == "plant.R_f") slot = &rp.pp.R_f;
    else if (t == "plant.R_g") slot = &rp.pp.R_g;
    else if (t == "ad.gain") {
        if (!rp.has_ad) {
            throw InvalidScenario(
                "simulate: event targets ad.gain but no AD controller is "
                "configured");
        }
        slot = &rp.ad_gain;
    } else {
        throw InvalidScenario("simulate: unknown event target '" + t + "'");
    }
    *slot = ev.new_value;
}

/// Instantaneous outputs derived from the state (inverter voltage after AD,
/// PCC power flow, capacitor voltage magnitude).
struct Outputs {
    double e_d, e_q, p, q, V;
};

Outputs outputs_at(const State& x, const RunParams& rp) {
    Outputs o;
    const double v_d = x[2], v_q = x[3], i_gd = x[4], i_gq = x[5];
    o.p = v_d * i_gd + v_q * i_gq;
    o.q = v_q * i_gd - v_d * i_gq;
    o.V = std::hypot(v_d, v_q);

    double E_rf;
    if (rp.cp.law == ControlLaw::Droop) {
        E_rf = rp.cp.V_st + (rp.cp.Q_st - x[kIdxCtrl]) / rp.cp.D_q;
    } else {
        const double u =
            rp.cp.D_q * (rp.cp.V_st - o.V) + rp.cp.Q_st - o.q;
        E_rf = rp.cp.k_pq * u + x[kIdxCtrl];
    }
    o.e_d = E_rf * std::cos(x[kIdxDelta]);
    o.e_q = E_rf * std::sin(x[kIdxDelta]);
    if (rp.has_ad) {
        const double g = rp.ad_gain / rp.ad_T;
        o.e_d -= rp.ad_sign * g * (x[rp.ad_ch] - x[kIdxAd]);
        o.e_q -= rp.ad_sign * g * (x[rp.ad_ch + 1] - x[kIdxAd + 1]);
    }
    return o;
}

State derivative(const State& x, const RunParams& rp) {
    const PlantParams& pp = rp.pp;
    const ControlParams& cp = rp.cp;
    const Outputs o = outputs_at(x, rp);
    const double wn = pp.omega_n;
    const double wg = pp.omega_g;

    State d{};
    d[0] = wn / pp.L_f * (o.e_d - x[2] - pp.R_f * x[0]) + wn * wg * x[1];
    d[1] = wn / pp.L_f * (o.e_q - x[3] - pp.R_f * x[1]) - wn * wg * x[0];
    d[2] = wn / pp.C_f * (x[0] - x[4]) + wn * wg * x[3];
    d[3] = wn / pp.C_f * (x[1] - x[5]) - wn * wg * x[2];
    d[4] = wn / pp.L_g * (x[2] - pp.V_g - pp.R_g * x[4]) + wn * wg * x[5];
    d[5] = wn / pp.L_g * (x[3] - pp.R_g * x[5]) - wn * wg * x[4];
    d[kIdxDelta] = wn * (x[kIdxOmega] - wg);
    d[kIdxOmega] =
        (cp.P_st - o.p - cp.D_p * (x[kIdxOmega] - cp.omega_st)) / (2.0 * cp.H);
    if (cp.law == ControlLaw::Droop) {
        d[kIdxCtrl] = (o.q - x[kIdxCtrl]) / cp.T_q;
    } else {
        const double u = cp.D_q * (cp.V_st - o.V) + cp.Q_st - o.q;
        d[kIdxCtrl] = cp.k_iq * u;
    }
    if (rp.has_ad) {
        d[kIdxAd] = (x[rp.ad_ch] - x[kIdxAd]) / rp.ad_T;
        d[kIdxAd + 1] = (x[rp.ad_ch + 1] - x[kIdxAd + 1]) / rp.ad_T;
    }
    return d;
}

void validate_scenario(const SimScenario& sc) {
    sc.cp.validate();
    if (!(sc.t_end > 0.0)) {
        throw InvalidScenario("simulate: t_end must be positive");
    }
    if (!(sc.dt > 0.0) || !(sc.record_dt >= sc.dt)) {
        throw InvalidScenario("simulate: need dt > 0 and record_dt >= dt");
    }
    const double f_LCL = resonance_frequencies(sc.pp).omega_LCL / (2.0 * kPi);
    if (sc.dt > 1.0 / (20.0 * f_LCL)) {
        throw InvalidScenario(
            "simulate: dt too coarse for the LCL resonance (need dt <= "
            "1/(20 f_LCL))");
    }
    double prev_t = 0.0;
    for (std::size_t i = 0; i < sc.events.size(); ++i) {
        const EventStep& ev = sc.events[i];
        if (ev.t < 0.0 || ev.t >= sc.t_end) {
            throw InvalidScenario("simulate: event time outside [0, t_end)");
        }
        if (i > 0 && ev.t < prev_t) {
            throw InvalidScenario("simulate: events must be sorted by time");
        }
        prev_t = ev.t;
    }
    for (const std::string& name : sc.record) {
        const auto& names = signal_names();
        if (std::find(names.begin(), names.end(), name) == names.end()) {
            throw InvalidScenario("simulate: unknown record signal '" + name +
                                  "'");
        }
    }
}

}  // namespace

const std::vector<double>& SimTrace::signal(const std::string& name) const {
    const auto it = signals.find(name);
    if (it == signals.end()) {
        throw std::invalid_argument("SimTrace: no recorded signal '" + name +
                                    "'");
    }
    return it->second;
}

SimTrace simulate(const SimScenario& sc) {
    validate_scenario(sc);

    RunParams rp;
    rp.pp = sc.pp;
    rp.cp = sc.cp;
    if (sc.ad) {
        rp.has_ad = true;
        rp.ad_kind = sc.ad->kind;
        rp.ad_gain = sc.ad->gain;
        rp.ad_T = sc.ad->time_const;
        switch (sc.ad->kind) {
            case AdKind::InverterCurrent: rp.ad_ch = 0; break;
            case AdKind::CapVoltage: rp.ad_ch = 2; break;
            case AdKind::GridCurrent:
                rp.ad_ch = 4;
                rp.ad_sign = -1.0;
                break;
        }
    }
    // Dry-run the event mutations so bad values fail before integration.
    {
        RunParams probe = rp;
        for (const EventStep& ev : sc.events) {
            apply_event(probe, ev);
            probe.cp.validate();
        }
    }

    const OperatingPoint op = solve_operating_point(sc.pp, sc.cp);
    if (!(op.residual < 1e-8)) {
        throw InitialResidualTooLarge(
            "simulate: operating point residual too large for a flat start");
    }

    State x{};
    x[0] = op.i_d0;
    x[1] = op.i_q0;
    x[2] = op.v_d0;
    x[3] = op.v_q0;
    x[4] = op.i_gd0;
    x[5] = op.i_gq0;
    x[kIdxDelta] = op.delta0;
    x[kIdxOmega] = sc.pp.omega_g;
    x[kIdxCtrl] = (sc.cp.law == ControlLaw::Droop) ? op.q0 : op.E0;
    if (rp.has_ad) {
        x[kIdxAd] = x[rp.ad_ch];        // washouts settled: zero AD output
        x[kIdxAd + 1] = x[rp.ad_ch + 1];
    }
    const int n_active = rp.has_ad ? 11 : 9;

    const long long n_steps = std::llround(sc.t_end / sc.dt);
    const long long rec_every =
        std::max(1LL, std::llround(sc.record_dt / sc.dt));

    SimTrace tr;
    std::vector<std::string> rec =
        sc.record.empty() ? signal_names() : sc.record;
    for (const auto& name : rec) {
        tr.signals[name];
    }
    auto record_point = [&](double t) {
        const Outputs o = outputs_at(x, rp);
        tr.t.push_back(t);
        for (const auto& name : rec) {
            double v = 0.0;
            if (name == "p") v = o.p;
            else if (name == "q") v = o.q;
            else if (name == "V") v = o.V;
            else if (name == "omega") v = x[kIdxOmega];
            else if (name == "delta") v = x[kIdxDelta];
            else if (name == "i_d") v = x[0];
            else if (name == "i_q") v = x[1];
            else if (name == "i_gd") v = x[4];
            else if (name == "i_gq") v = x[5];
            else if (name == "v_d") v = x[2];
            else if (name == "v_q") v = x[3];
            else if (name == "e_d") v = o.e_d;
            else if (name == "e_q") v = o.e_q;
            tr.signals[name].push_back(v);
        }
    };

    std::size_t next_event = 0;
    for (long long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * sc.dt;
        while (next_event < sc.events.size() &&
               sc.events[next_event].t <= t + 0.5 * sc.dt) {
            apply_event(rp, sc.events[next_event]);
            ++next_event;
        }
        if (k % rec_every == 0) {
            record_point(t);
        }

        // Classic RK4 step.
        const State k1 = derivative(x, rp);
        State xt;
        for (int i = 0; i < 11; ++i) xt[i] = x[i] + 0.5 * sc.dt * k1[i];
        const State k2 = derivative(xt, rp);
        for (int i = 0; i < 11; ++i) xt[i] = x[i] + 0.5 * sc.dt * k2[i];
        const State k3 = derivative(xt, rp);
        for (int i = 0; i < 11; ++i) xt[i] = x[i] + sc.dt * k3[i];
        const State k4 = derivative(xt, rp);
        for (int i = 0; i < 11; ++i) {
            x[i] += sc.dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }

        bool diverged = false;
        for (int i = 0; i < n_active; ++i) {
            if (!(std::abs(x[i]) <= kDivergenceGuard)) {
                diverged = true;
                break;
            }
        }
        if (diverged) {
            tr.diverged_at = static_cast<double>(k + 1) * sc.dt;
            break;
        }
    }
    if (!tr.diverged_at && n_steps % rec_every == 0) {
        record_point(static_cast<double>(n_steps) * sc.dt);
    }
    return tr;
}

}  // namespace slgfm
