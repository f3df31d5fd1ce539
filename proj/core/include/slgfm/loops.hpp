#pragma once

#include <complex>
#include <vector>

#include "slgfm/plant.hpp"

namespace slgfm {

/// An assembled open-loop model: the loop transfer function, its pole set,
/// and the cancellation bookkeeping that produced it.
struct OlModel {
    RationalFn tf;
    std::vector<std::complex<double>> ol_poles;  ///< rad/s, conjugate-closed
    int p_count;       ///< # poles with Re > stability_eps
    ControlLaw law;
    std::vector<CancelledPair> cancelled_pairs;
    double stability_eps;  ///< RHP classification threshold (1e-6 * omega_LCL)
};

enum class AdKind { InverterCurrent, GridCurrent, CapVoltage };

/// Active-damping feedback: a washout / filtered-derivative k*s/(T*s+1)
/// acting on the selected measurement, subtracted from the inverter voltage
/// reference.  The grid-current variant acts as a negative high-pass filter;
/// that sign is absorbed into the feedback here, so `gain` is quoted positive
/// for all three kinds.
struct AdController {
    AdKind kind;
    double gain;        ///< p.u.
    double time_const;  ///< s
    RationalFn tf;      ///< k*s/(T*s+1)

    /// Builds the washout transfer function.  Throws std::invalid_argument
    /// when time_const <= 0 or gain < 0.
    static AdController make(AdKind kind, double gain, double time_const);

    /// Bundled design examples (gain, time constant):
    /// inverter current 5.5e-5, 1/(90*pi); grid current 1.3e-4, 1/(180*pi);
    /// capacitor voltage 2.2e-6, 1/(4000*pi).
    static AdController design_example(AdKind kind);
};

/// Coefficients of the lossless degree-5 characteristic factor
/// s^5 + a3 s^3 + a2 s^2 + a1 s + a0 of the droop-I reactive loop (the s^4
/// coefficient is structurally zero).
struct CharCoeffs {
    double a3, a2, a1, a0;

    /// The polynomial s^5 + a3 s^3 + a2 s^2 + a1 s + a0.
    Polynomial to_polynomial() const;
};

/// Reactive-power loop under droop control:
/// tf = G_qE(s) / (D_q * (T_q s + 1)).  The controller contributes the single
/// real pole -1/T_q; the plant resonances are untouched (the droop loop is
/// decoupled from them).
OlModel build_droop_ol(const LinearPlant& plant, double D_q, double T_q);

/// Reactive-power loop under droop-I control with the inner voltage-magnitude
/// feedback closed:
///
///   tf = (k_pq s + k_iq) * Nq(s) / (s * X(s) + (k_pq s + k_iq) * D_q * Nv(s))
///
/// where Nq, Nv are the numerators of G_qE, G_VE and X is the plant
/// characteristic polynomial.  The assembly forms
/// PI/(1 + PI*D_q*G_VE) * G_qE, whose shared plant factor X cancels exactly;
/// the cancelled (zero, pole) pairs are recorded.  Unlike the droop loop, the
/// surviving denominator moves the resonant poles, and can move them into
/// the right half plane.
///
/// Throws CancellationFailure if the X pairing does not come out exact.
OlModel build_droopI_ol(const LinearPlant& plant, double D_q, double k_pq,
                        double k_iq);

/// Active-power loop: tf = G_pdelta(s) * omega_n / (s * (2 H s + D_p)).
OlModel build_ap_ol(const LinearPlant& plant, double H, double D_p);

/// Direct evaluation of the lossless closed forms:
///   a3 = w1^2 + w2^2 + D_q k_pq wLC^2 vd0 / V0
///   a2 = D_q wLC^2 / V0 * (k_iq vd0 - 2 k_pq wLg vq0)
///   a1 = w1^2 w2^2 + D_q wLC^2 / V0 * (w1 w2 k_pq vd0 - 2 k_iq wLg vq0)
///   a0 = vd0 k_iq D_q wLC^2 w1 w2 / V0
/// with (vd0, vq0) the capacitor voltage in the converter frame (the grid
/// frame components of `op` rotated by -delta0); the closed forms are exact
/// only in that frame.  Intended for R_f = R_g = 0.
CharCoeffs char_coeffs_lossless(const PlantParams& pp, const OperatingPoint& op,
                                double D_q, double k_pq, double k_iq);

/// Augments the plant with the AD feedback: two washout states (d and q
/// channels) filtering the selected measurement, their outputs subtracted
/// from de_dq, then re-linearizes the transfer functions.  gain = 0 returns
/// a model with the same input-output pole set.
LinearPlant apply_ad(const LinearPlant& plant, const AdController& ad);

}  // namespace slgfm
