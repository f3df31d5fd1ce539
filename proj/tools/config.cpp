#include "config.hpp"

#include <fstream>
#include <set>
#include <utility>

#include "json.hpp"

namespace slgfm_cli {

using nlohmann::json;

namespace {

/// Wraps one JSON object: typed getters record which keys were read, and
/// done() rejects everything that was not, so schema violations surface with
/// their full config path.
class ObjectReader {
public:
    ObjectReader(const json& j, std::string path)
        : obj_(j), path_(std::move(path)) {
        if (!j.is_object()) {
            throw ConfigError(path_ + ": expected an object");
        }
    }

    const std::string& path() const { return path_; }

    bool has(const std::string& key) const { return obj_.contains(key); }

    double number(const std::string& key) {
        require(key);
        return as_number(obj_.at(key), sub(key));
    }

    double number_or(const std::string& key, double fallback) {
        if (!has(key)) {
            return fallback;
        }
        return number(key);
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) {
            return fallback;
        }
        mark(key);
        const json& v = obj_.at(key);
        if (!v.is_number_integer()) {
            throw ConfigError(sub(key) + ": expected an integer");
        }
        return v.get<int>();
    }

    std::string text(const std::string& key) {
        require(key);
        mark(key);
        const json& v = obj_.at(key);
        if (!v.is_string()) {
            throw ConfigError(sub(key) + ": expected a string");
        }
        return v.get<std::string>();
    }

    const json& array(const std::string& key) {
        require(key);
        mark(key);
        const json& v = obj_.at(key);
        if (!v.is_array()) {
            throw ConfigError(sub(key) + ": expected an array");
        }
        return v;
    }

    /// Child object, marked as consumed.  Caller builds its own reader.
    const json& object(const std::string& key) {
        require(key);
        mark(key);
        const json& v = obj_.at(key);
        if (!v.is_object()) {
            throw ConfigError(sub(key) + ": expected an object");
        }
        return v;
    }

    std::string sub(const std::string& key) const { return path_ + "." + key; }

    void done() const {
        for (const auto& item : obj_.items()) {
            if (!seen_.count(item.key())) {
                throw ConfigError(sub(item.key()) + ": unknown key");
            }
        }
    }

private:
    void require(const std::string& key) {
        if (!has(key)) {
            throw ConfigError(sub(key) + ": required key is missing");
        }
        mark(key);
    }

    void mark(const std::string& key) { seen_.insert(key); }

    static double as_number(const json& v, const std::string& where) {
        if (!v.is_number()) {
            throw ConfigError(where + ": expected a number");
        }
        return v.get<double>();
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

slgfm::PlantParams read_plant(const json& j) {
    ObjectReader plant(j, "plant");
    const bool np = plant.has("nameplate");
    const bool pu = plant.has("per_unit");
    if (np == pu) {
        throw ConfigError(
            "plant: exactly one of \"nameplate\" / \"per_unit\" must be "
            "present");
    }

    slgfm::PlantParams pp;
    if (np) {
        ObjectReader r(plant.object("nameplate"), "plant.nameplate");
        slgfm::Nameplate n{};
        n.S_n = r.number("S_n");
        n.V_n = r.number("V_n");
        n.f_n = r.number("f_n");
        n.L_f_H = r.number("L_f");
        n.C_f_F = r.number("C_f");
        n.L_g_H = r.number("L_g");
        n.x_over_r = r.number_or("x_over_r", 0.0);
        r.done();
        pp = slgfm::PlantParams::from_nameplate(n);
    } else {
        ObjectReader r(plant.object("per_unit"), "plant.per_unit");
        const double L_f = r.number("L_f");
        const double C_f = r.number("C_f");
        const double L_g = r.number("L_g");
        const double R_f = r.number_or("R_f", 0.0);
        const double xr = r.number_or("x_over_r", 0.0);
        const double f_n = r.number_or("f_n", 50.0);
        const double R_g = r.number_or("R_g", 0.0);
        r.done();
        pp = slgfm::PlantParams::from_per_unit(L_f, C_f, L_g, R_f, xr, f_n);
        if (R_g != 0.0) {
            pp.R_g = R_g;
            pp.finalize();  // rejects an R_g that contradicts x_over_r
        }
    }
    pp.V_g = plant.number_or("V_g", 1.0);
    pp.omega_g = plant.number_or("omega_g", 1.0);
    plant.done();
    pp.finalize();
    return pp;
}

slgfm::ControlParams read_control(const json& j, ScenarioConfig& cfg) {
    ObjectReader r(j, "control");
    slgfm::ControlParams cp;
    const std::string law = r.text("law");
    if (law == "droop") {
        cp.law = slgfm::ControlLaw::Droop;
    } else if (law == "droop-i") {
        cp.law = slgfm::ControlLaw::DroopI;
    } else {
        throw ConfigError("control.law: expected \"droop\" or \"droop-i\"");
    }
    cfg.has_T_q = r.has("T_q");
    cfg.has_k_iq = r.has("k_iq");
    cp.H = r.number_or("H", cp.H);
    cp.D_p = r.number_or("D_p", cp.D_p);
    cp.D_q = r.number_or("D_q", cp.D_q);
    cp.T_q = r.number_or("T_q", cp.T_q);
    cp.k_pq = r.number_or("k_pq", cp.k_pq);
    cp.k_iq = r.number_or("k_iq", cp.k_iq);
    cp.P_st = r.number_or("P_st", cp.P_st);
    cp.Q_st = r.number_or("Q_st", cp.Q_st);
    cp.V_st = r.number_or("V_st", cp.V_st);
    cp.omega_st = r.number_or("omega_st", cp.omega_st);
    r.done();
    return cp;
}

slgfm::AdKind parse_ad_kind(const std::string& text, const std::string& where) {
    if (text == "inv-current") {
        return slgfm::AdKind::InverterCurrent;
    }
    if (text == "grid-current") {
        return slgfm::AdKind::GridCurrent;
    }
    if (text == "cap-voltage") {
        return slgfm::AdKind::CapVoltage;
    }
    throw ConfigError(where +
                      ": expected \"inv-current\", \"grid-current\", or "
                      "\"cap-voltage\"");
}

slgfm::AdController read_ad(const json& j) {
    ObjectReader r(j, "ad");
    const slgfm::AdKind kind = parse_ad_kind(r.text("kind"), "ad.kind");
    const slgfm::AdController dflt = slgfm::AdController::design_example(kind);
    const double gain = r.number_or("gain", dflt.gain);
    const double tc = r.number_or("time_const", dflt.time_const);
    r.done();
    try {
        return slgfm::AdController::make(kind, gain, tc);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("ad: ") + e.what());
    }
}

AnalysisOptions read_analysis(const json& j) {
    ObjectReader r(j, "analysis");
    AnalysisOptions a;
    a.omega_min = r.number_or("omega_min", a.omega_min);
    a.omega_max = r.number_or("omega_max", a.omega_max);
    a.points = r.integer("points", a.points);

    a.has_scenario = r.has("t_end");
    if (a.has_scenario) {
        a.t_end = r.number("t_end");
    }
    a.dt = r.number_or("dt", a.dt);
    a.record_dt = r.number_or("record_dt", a.record_dt);
    if (r.has("record")) {
        const json& rec = r.array("record");
        for (std::size_t i = 0; i < rec.size(); ++i) {
            if (!rec[i].is_string()) {
                throw ConfigError(r.sub("record") + "[" + std::to_string(i) +
                                  "]: expected a string");
            }
            a.record.push_back(rec[i].get<std::string>());
        }
    }
    if (r.has("events")) {
        const json& evs = r.array("events");
        for (std::size_t i = 0; i < evs.size(); ++i) {
            ObjectReader ev(evs[i],
                            r.sub("events") + "[" + std::to_string(i) + "]");
            slgfm::EventStep step;
            step.t = ev.number("t");
            step.target = ev.text("target");
            step.new_value = ev.number("value");
            ev.done();
            a.events.push_back(step);
        }
    }
    if (r.has("fft")) {
        ObjectReader f(r.object("fft"), "analysis.fft");
        a.has_fft = true;
        a.fft_signal = f.text("signal");
        const json& w = f.array("window");
        if (w.size() != 2 || !w[0].is_number() || !w[1].is_number()) {
            throw ConfigError(
                "analysis.fft.window: expected [start, end] seconds");
        }
        a.fft_start = w[0].get<double>();
        a.fft_end = w[1].get<double>();
        f.done();
    }
    r.done();
    return a;
}

SweepSpec read_sweep(const json& j) {
    ObjectReader r(j, "sweep");
    SweepSpec s;
    s.parameter = r.text("parameter");
    const json& vals = r.array("values");
    if (vals.empty()) {
        throw ConfigError("sweep.values: must not be empty");
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (!vals[i].is_number()) {
            throw ConfigError("sweep.values[" + std::to_string(i) +
                              "]: expected a number");
        }
        s.values.push_back(vals[i].get<double>());
    }
    r.done();
    return s;
}

}  // namespace

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file: " + path);
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }

    ObjectReader root(j, "config");
    ScenarioConfig cfg;
    try {
        cfg.plant = read_plant(root.object("plant"));
    } catch (const ConfigError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("plant: ") + e.what());
    }
    cfg.control = read_control(root.object("control"), cfg);
    if (root.has("ad")) {
        cfg.ad = read_ad(root.object("ad"));
    }
    if (root.has("analysis")) {
        cfg.analysis = read_analysis(root.object("analysis"));
    }
    if (root.has("sweep")) {
        cfg.sweep = read_sweep(root.object("sweep"));
    }
    root.done();

    try {
        cfg.control.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("control: ") + e.what());
    }
    return cfg;
}

void apply_law_override(ScenarioConfig& cfg, const std::string& law) {
    if (law.empty()) {
        return;
    }
    if (law == "droop") {
        cfg.control.law = slgfm::ControlLaw::Droop;
    } else if (law == "droop-i") {
        cfg.control.law = slgfm::ControlLaw::DroopI;
    } else {
        throw ConfigError("--law: expected \"droop\" or \"droop-i\"");
    }
}

void apply_ad_override(ScenarioConfig& cfg, const std::string& ad) {
    if (ad.empty()) {
        return;
    }
    if (ad == "none") {
        cfg.ad.reset();
        return;
    }
    const slgfm::AdKind kind = parse_ad_kind(ad, "--ad");
    if (!cfg.ad || cfg.ad->kind != kind) {
        cfg.ad = slgfm::AdController::design_example(kind);
    }
}

void check_law_params(const ScenarioConfig& cfg) {
    if (cfg.control.law == slgfm::ControlLaw::Droop && !cfg.has_T_q) {
        throw ConfigError("control.T_q: required under law \"droop\"");
    }
    if (cfg.control.law == slgfm::ControlLaw::DroopI && !cfg.has_k_iq) {
        throw ConfigError("control.k_iq: required under law \"droop-i\"");
    }
}

}  // namespace slgfm_cli
