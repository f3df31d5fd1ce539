#pragma once

#include <optional>

#include "slgfm/state_space.hpp"

namespace slgfm {

/// Physical nameplate data of the converter + grid line (SI units).
struct Nameplate {
    double S_n;       ///< nominal power, VA
    double V_n;       ///< nominal line-to-line RMS voltage, V
    double f_n;       ///< nominal frequency, Hz
    double L_f_H;     ///< inverter-side filter inductance, H
    double C_f_F;     ///< filter capacitance, F
    double L_g_H;     ///< grid-side inductance (filter + line), H
    double x_over_r;  ///< X/R ratio of the grid branch (0 = purely inductive)
};

/// Per-unit circuit parameters plus grid boundary conditions.
///
/// The grid synchronous frame is aligned with the grid voltage: v_grid,d = V_g
/// and v_grid,q = 0.  When x_over_r > 0, R_g is derived from it at
/// construction (R_g = omega_g * L_g / x_over_r) and kept consistent.
struct PlantParams {
    double S_n = 5e6;    ///< VA (context only)
    double V_n = 690.0;  ///< V (context only)
    double f_n = 50.0;   ///< Hz

    double L_f;  ///< p.u.
    double C_f;  ///< p.u.
    double L_g;  ///< p.u.
    double R_f = 0.0;
    double R_g = 0.0;
    double x_over_r = 0.0;  ///< when > 0, R_g := omega_g*L_g/x_over_r

    double V_g = 1.0;      ///< grid voltage magnitude, p.u.
    double omega_g = 1.0;  ///< grid angular frequency, p.u.
    double omega_n;        ///< nominal angular frequency, rad/s (2*pi*f_n)

    /// Per-unit conversion: Z_base = V_n^2/S_n, L_base = Z_base/omega_n,
    /// C_base = 1/(Z_base*omega_n).  Throws NonPositiveBase for non-positive
    /// nameplate entries.
    static PlantParams from_nameplate(const Nameplate& np);

    /// Direct per-unit construction.  Throws std::invalid_argument for
    /// non-positive L/C or negative resistances.
    static PlantParams from_per_unit(double L_f, double C_f, double L_g,
                                     double R_f = 0.0, double x_over_r = 0.0,
                                     double f_n = 50.0);

    /// Copy with R_f = R_g = 0 (analytic lossless forms).
    PlantParams lossless() const;

    /// Validates ranges and applies the x_over_r consistency rule.
    void finalize();
};

enum class ControlLaw { Droop, DroopI };

/// Control constants and set-points of the single-loop GFM scheme.
struct ControlParams {
    double H = 0.5;    ///< inertia constant, s
    double D_p = 50.0;
    double D_q = 10.0;
    double T_q = 0.051;  ///< droop q filter time constant, s
    double k_pq = 0.0;   ///< droop-I proportional gain
    double k_iq = 4.0;   ///< droop-I integral gain, 1/s
    double P_st = 0.5;
    double Q_st = 0.0;
    double V_st = 1.0;
    double omega_st = 1.0;
    ControlLaw law = ControlLaw::Droop;

    /// Throws std::invalid_argument when H, D_q, or the active law's
    /// bandwidth parameter (T_q / k_iq) is not positive.
    void validate() const;
};

/// Steady-state solution of the nonlinear circuit + control law.
/// Voltage/current components are in the grid synchronous frame.
struct OperatingPoint {
    double delta0;          ///< inverter voltage angle, rad
    double E0;              ///< inverter voltage magnitude, p.u.
    double e_d0, e_q0;      ///< inverter voltage components
    double v_d0, v_q0;      ///< capacitor voltage components
    double i_d0, i_q0;      ///< inverter current components
    double i_gd0, i_gq0;    ///< grid current components
    double p0, q0, V0;      ///< power flow and voltage magnitude
    double residual;        ///< infinity norm of the equilibrium equations
};

/// Characteristic angular frequencies of the LC / LCL circuit, rad/s.
struct ResonanceProfile {
    double omega_LC;   ///< omega_n * sqrt(1/(L_f C_f))
    double omega_LCL;  ///< omega_n * sqrt((L_f+L_g)/(L_f C_f L_g))
    double omega_1;    ///< omega_LCL - omega_Lg
    double omega_2;    ///< omega_LCL + omega_Lg
    double omega_Lg;   ///< omega_n * omega_g
};

/// Six-state small-signal model of the filter + grid line with the three
/// directional transfer functions used by the loop assemblies.
///
/// States: (di_d, di_q, dv_d, dv_q, di_gd, di_gq); inputs (de_d, de_q);
/// outputs (dp, dq, dV).  G_qE and G_VE take de along [cos d0, sin d0]
/// (a magnitude perturbation of the inverter voltage); G_pdelta takes de
/// along E0*[-sin d0, cos d0] (an angle perturbation).  det_A/det_B hold the
/// lossless analytic factors of the characteristic polynomial.
struct LinearPlant {
    StateSpaceModel ss;
    RationalFn G_pdelta;
    RationalFn G_qE;
    RationalFn G_VE;
    Polynomial det_A;
    Polynomial det_B;

    /// Context the model was built from (loop assembly and AD augmentation
    /// need them).
    PlantParams pp;
    OperatingPoint op;
};

/// Newton solve of the steady-state equations (circuit equilibrium with
/// resistances, the active droop law, and p0 = P_st - D_p*(omega_g -
/// omega_st)).  Max 50 iterations with 0.5 step damping on residual increase;
/// initial guess delta0 = 0, E0 = 1.
///
/// Throws InfeasibleSetpoint when the iteration diverges or |delta0| > pi/2,
/// NoConvergence (with the best residual) when it stalls above 1e-10.
OperatingPoint solve_operating_point(const PlantParams& pp,
                                     const ControlParams& cp);

/// Small-signal model at the operating point (resistances included).
/// Requires op.residual < 1e-8 (std::invalid_argument otherwise).
LinearPlant linearize(const PlantParams& pp, const OperatingPoint& op);

/// Closed-form resonance frequencies.
ResonanceProfile resonance_frequencies(const PlantParams& pp);

}  // namespace slgfm
