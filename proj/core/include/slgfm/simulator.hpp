#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slgfm/loops.hpp"

namespace slgfm {

/// A scheduled parameter step: at time t the scalar named by `target` jumps
/// to new_value.  Recognized targets:
///   control.{T_q,k_pq,k_iq,D_q,D_p,H,P_st,Q_st,V_st,omega_st}
///   plant.{V_g,omega_g,R_f,R_g}
///   ad.gain
/// (circuit L/C values define the state coordinates and cannot be stepped).
struct EventStep {
    double t;
    std::string target;
    double new_value;
};

/// Nonlinear time-domain experiment description.
struct SimScenario {
    PlantParams pp;
    ControlParams cp;
    std::optional<AdController> ad;
    std::vector<EventStep> events;  ///< sorted by time, all < t_end
    double t_end;
    double dt = 5e-6;        ///< integration step, s
    double record_dt = 1e-4; ///< trace sampling interval, s
    /// Signal names to record; empty records every available signal.
    std::vector<std::string> record;
};

/// Recorded simulation output on a uniform time grid.  Available signals:
/// p, q, V, omega, delta, i_d, i_q, i_gd, i_gq, v_d, v_q, e_d, e_q
/// (per-unit; delta in rad).
struct SimTrace {
    std::vector<double> t;
    std::map<std::string, std::vector<double>> signals;
    std::optional<double> diverged_at;  ///< time the 100 p.u. guard tripped

    const std::vector<double>& signal(const std::string& name) const;
};

/// FFT analysis of one trace window.
struct FftReport {
    double dominant_freq_hz;
    double amplitude;     ///< peak spectral amplitude, p.u.
    double window_start;  ///< s
    double window_end;    ///< s
    double growth_rate;   ///< 1/s, log-envelope slope around the peak
};

/// Fixed-step RK4 integration of the full nonlinear model: 6 circuit states,
/// swing states (delta, omega), the active law's controller state (droop
/// q-filter state or droop-I integrator), and 2 washout states when AD is
/// present.  The initial condition is a flat start at
/// solve_operating_point(pp, cp); events mutate parameters between steps with
/// no state re-initialization.  Integration aborts with diverged_at set (not
/// an error) when any |state| exceeds 100 p.u.
///
/// Throws InvalidScenario for structural problems (unsorted events, unknown
/// targets, dt > 1/(20 f_LCL), t_end <= 0) and InitialResidualTooLarge when
/// the operating point residual exceeds 1e-8.
SimTrace simulate(const SimScenario& sc);

/// Hann-windowed FFT of the detrended signal over [window.first,
/// window.second]: dominant_freq from the peak bin refined by quadratic
/// interpolation; growth_rate from a least-squares line through the log of
/// the band-passed analytic envelope (band centered on the dominant
/// frequency, which makes the fit immune to the low-frequency droop
/// transient).
///
/// Throws WindowTooShort when the window holds fewer than 1024 samples, and
/// std::invalid_argument for an unknown signal or a window outside the trace.
FftReport dominant_frequency(const SimTrace& tr, const std::string& signal,
                             std::pair<double, double> window);

}  // namespace slgfm
