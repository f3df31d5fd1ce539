#include "slgfm/plant.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "slgfm/errors.hpp"

namespace slgfm {

namespace {

constexpr double kPi = std::numbers::pi;

/// Steady-state phasor solution of the LCL circuit for a given inverter
/// voltage phasor e (grid frame, V_g on the d-axis / real axis).
struct CircuitSolution {
    std::complex<double> i, v, i_g;
    double p, q, V;
};

CircuitSolution solve_circuit(const PlantParams& pp, std::complex<double> e) {
    const std::complex<double> j(0.0, 1.0);
    const std::complex<double> Z_f = pp.R_f + j * pp.omega_g * pp.L_f;
    const std::complex<double> Z_g = pp.R_g + j * pp.omega_g * pp.L_g;
    const std::complex<double> Y_c = j * pp.omega_g * pp.C_f;

    // e = v + Z_f i, i = i_g + Y_c v, v = V_g + Z_g i_g  =>  solve for i_g.
    const std::complex<double> i_g =
        (e - (1.0 + Z_f * Y_c) * pp.V_g) / (Z_g + Z_f * (1.0 + Y_c * Z_g));
    const std::complex<double> v = pp.V_g + Z_g * i_g;
    const std::complex<double> i = i_g + Y_c * v;

    CircuitSolution out;
    out.i = i;
    out.v = v;
    out.i_g = i_g;
    const std::complex<double> s_out = v * std::conj(i_g);
    out.p = s_out.real();
    out.q = s_out.imag();
    out.V = std::abs(v);
    return out;
}

}  // namespace

PlantParams PlantParams::from_nameplate(const Nameplate& np) {
    if (np.S_n <= 0.0 || np.V_n <= 0.0 || np.f_n <= 0.0) {
        throw NonPositiveBase("from_nameplate: S_n, V_n, f_n must be positive");
    }
    const double Z_base = np.V_n * np.V_n / np.S_n;
    const double omega_base = 2.0 * kPi * np.f_n;
    const double L_base = Z_base / omega_base;
    const double C_base = 1.0 / (Z_base * omega_base);

    PlantParams pp;
    pp.S_n = np.S_n;
    pp.V_n = np.V_n;
    pp.f_n = np.f_n;
    pp.L_f = np.L_f_H / L_base;
    pp.C_f = np.C_f_F / C_base;
    pp.L_g = np.L_g_H / L_base;
    pp.x_over_r = np.x_over_r;
    pp.finalize();
    return pp;
}

PlantParams PlantParams::from_per_unit(double L_f, double C_f, double L_g,
                                       double R_f, double x_over_r,
                                       double f_n) {
    PlantParams pp;
    pp.f_n = f_n;
    pp.L_f = L_f;
    pp.C_f = C_f;
    pp.L_g = L_g;
    pp.R_f = R_f;
    pp.x_over_r = x_over_r;
    pp.finalize();
    return pp;
}

PlantParams PlantParams::lossless() const {
    PlantParams pp = *this;
    pp.R_f = 0.0;
    pp.R_g = 0.0;
    pp.x_over_r = 0.0;
    pp.finalize();
    return pp;
}

void PlantParams::finalize() {
    if (S_n <= 0.0 || V_n <= 0.0 || f_n <= 0.0) {
        throw NonPositiveBase("PlantParams: S_n, V_n, f_n must be positive");
    }
    if (L_f <= 0.0 || C_f <= 0.0 || L_g <= 0.0) {
        throw std::invalid_argument("PlantParams: L_f, C_f, L_g must be positive");
    }
    if (R_f < 0.0 || R_g < 0.0 || x_over_r < 0.0) {
        throw std::invalid_argument(
            "PlantParams: resistances and x_over_r must be non-negative");
    }
    if (V_g <= 0.0 || omega_g <= 0.0) {
        throw std::invalid_argument("PlantParams: V_g and omega_g must be positive");
    }
    omega_n = 2.0 * kPi * f_n;
    if (x_over_r > 0.0) {
        const double derived = omega_g * L_g / x_over_r;
        if (R_g > 0.0 && std::abs(R_g - derived) > 1e-9 * derived) {
            throw std::invalid_argument(
                "PlantParams: explicit R_g contradicts x_over_r");
        }
        R_g = derived;
    }
}

void ControlParams::validate() const {
    if (H <= 0.0) {
        throw std::invalid_argument("ControlParams: H must be positive");
    }
    if (D_p < 0.0) {
        throw std::invalid_argument("ControlParams: D_p must be non-negative");
    }
    if (D_q <= 0.0) {
        throw std::invalid_argument("ControlParams: D_q must be positive");
    }
    if (law == ControlLaw::Droop && T_q <= 0.0) {
        throw std::invalid_argument(
            "ControlParams: T_q must be positive under the droop law");
    }
    if (k_pq < 0.0) {
        throw std::invalid_argument("ControlParams: k_pq must be non-negative");
    }
    if (law == ControlLaw::DroopI && k_iq <= 0.0) {
        throw std::invalid_argument(
            "ControlParams: k_iq must be positive under the droop-I law");
    }
    if (V_st <= 0.0) {
        throw std::invalid_argument("ControlParams: V_st must be positive");
    }
}

ResonanceProfile resonance_frequencies(const PlantParams& pp) {
    ResonanceProfile r;
    r.omega_LC = pp.omega_n * std::sqrt(1.0 / (pp.L_f * pp.C_f));
    r.omega_LCL =
        pp.omega_n * std::sqrt((pp.L_f + pp.L_g) / (pp.L_f * pp.C_f * pp.L_g));
    r.omega_Lg = pp.omega_n * pp.omega_g;
    r.omega_1 = r.omega_LCL - r.omega_Lg;
    r.omega_2 = r.omega_LCL + r.omega_Lg;
    return r;
}

namespace {

/// Residuals of the two free variables (delta0, E0): active-power balance and
/// the active law's voltage identity.
struct OpResiduals {
    double r_p;
    double r_law;
};

OpResiduals op_residuals(const PlantParams& pp, const ControlParams& cp,
                         double delta0, double E0) {
    const std::complex<double> e = std::polar(E0, delta0);
    const CircuitSolution cs = solve_circuit(pp, e);
    const double p_target = cp.P_st - cp.D_p * (pp.omega_g - cp.omega_st);

    OpResiduals r;
    r.r_p = cs.p - p_target;
    const double droop_rhs = cp.V_st + (cp.Q_st - cs.q) / cp.D_q;
    if (cp.law == ControlLaw::Droop) {
        r.r_law = E0 - droop_rhs;  // E_rf tracks the droop reference directly
    } else {
        r.r_law = cs.V - droop_rhs;  // integral action zeroes the V error
    }
    return r;
}

/// Circuit state derivatives at equilibrium (omega = omega_g) expressed in
/// the grid frame; used to report the full equilibrium residual.
double circuit_derivative_norm(const PlantParams& pp, std::complex<double> e,
                               const CircuitSolution& cs) {
    const double wn = pp.omega_n;
    const double wg = pp.omega_g;
    const double id = cs.i.real(), iq = cs.i.imag();
    const double vd = cs.v.real(), vq = cs.v.imag();
    const double igd = cs.i_g.real(), igq = cs.i_g.imag();
    const double d[6] = {
        wn / pp.L_f * (e.real() - vd - pp.R_f * id) + wn * wg * iq,
        wn / pp.L_f * (e.imag() - vq - pp.R_f * iq) - wn * wg * id,
        wn / pp.C_f * (id - igd) + wn * wg * vq,
        wn / pp.C_f * (iq - igq) - wn * wg * vd,
        wn / pp.L_g * (vd - pp.V_g - pp.R_g * igd) + wn * wg * igq,
        wn / pp.L_g * (vq - pp.R_g * igq) - wn * wg * igd,
    };
    double m = 0.0;
    for (double x : d) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

}  // namespace

OperatingPoint solve_operating_point(const PlantParams& pp,
                                     const ControlParams& cp) {
    cp.validate();

    double delta0 = 0.0;
    double E0 = 1.0;
    OpResiduals r = op_residuals(pp, cp, delta0, E0);
    double rn = std::max(std::abs(r.r_p), std::abs(r.r_law));

    for (int it = 0; it < 50 && rn > 1e-12; ++it) {
        // Central-difference 2x2 Jacobian.
        const double hd = 1e-7 * (1.0 + std::abs(delta0));
        const double hE = 1e-7 * (1.0 + std::abs(E0));
        const OpResiduals rdp = op_residuals(pp, cp, delta0 + hd, E0);
        const OpResiduals rdm = op_residuals(pp, cp, delta0 - hd, E0);
        const OpResiduals rEp = op_residuals(pp, cp, delta0, E0 + hE);
        const OpResiduals rEm = op_residuals(pp, cp, delta0, E0 - hE);
        const double J00 = (rdp.r_p - rdm.r_p) / (2.0 * hd);
        const double J01 = (rEp.r_p - rEm.r_p) / (2.0 * hE);
        const double J10 = (rdp.r_law - rdm.r_law) / (2.0 * hd);
        const double J11 = (rEp.r_law - rEm.r_law) / (2.0 * hE);
        const double det = J00 * J11 - J01 * J10;
        if (!std::isfinite(det) || std::abs(det) < 1e-300) {
            throw InfeasibleSetpoint(
                "solve_operating_point: singular Jacobian (no equilibrium in "
                "reach of the setpoint)");
        }
        double dd = -(J11 * r.r_p - J01 * r.r_law) / det;
        double dE = -(-J10 * r.r_p + J00 * r.r_law) / det;

        // Damped update: halve the step while the residual increases.
        double step = 1.0;
        for (int k = 0; k < 8; ++k) {
            const OpResiduals rt =
                op_residuals(pp, cp, delta0 + step * dd, E0 + step * dE);
            const double rtn = std::max(std::abs(rt.r_p), std::abs(rt.r_law));
            if (rtn < rn) {
                delta0 += step * dd;
                E0 += step * dE;
                r = rt;
                rn = rtn;
                break;
            }
            step *= 0.5;
            if (k == 7) {
                delta0 += step * dd;
                E0 += step * dE;
                r = op_residuals(pp, cp, delta0, E0);
                rn = std::max(std::abs(r.r_p), std::abs(r.r_law));
            }
        }
        if (!std::isfinite(rn) || std::abs(delta0) > 10.0 || E0 > 100.0 ||
            E0 < 1e-6) {
            throw InfeasibleSetpoint(
                "solve_operating_point: iteration diverged (setpoint beyond "
                "the static transfer limit)");
        }
    }

    if (rn > 1e-10) {
        throw NoConvergence(
            "solve_operating_point: residual stalled above 1e-10", rn);
    }
    if (std::abs(delta0) > kPi / 2.0) {
        throw InfeasibleSetpoint(
            "solve_operating_point: |delta0| > pi/2 (past the static transfer "
            "limit)");
    }

    const std::complex<double> e = std::polar(E0, delta0);
    const CircuitSolution cs = solve_circuit(pp, e);

    OperatingPoint op;
    op.delta0 = delta0;
    op.E0 = E0;
    op.e_d0 = e.real();
    op.e_q0 = e.imag();
    op.v_d0 = cs.v.real();
    op.v_q0 = cs.v.imag();
    op.i_d0 = cs.i.real();
    op.i_q0 = cs.i.imag();
    op.i_gd0 = cs.i_g.real();
    op.i_gq0 = cs.i_g.imag();
    op.p0 = cs.p;
    op.q0 = cs.q;
    op.V0 = cs.V;
    op.residual = std::max({circuit_derivative_norm(pp, e, cs),
                            std::abs(r.r_p), std::abs(r.r_law)});
    return op;
}

LinearPlant linearize(const PlantParams& pp, const OperatingPoint& op) {
    if (!(op.residual < 1e-8)) {
        throw std::invalid_argument(
            "linearize: operating point residual must be below 1e-8");
    }
    const double wn = pp.omega_n;
    const double wg = pp.omega_g;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(6, 6);
    // d(di_d)/dt, d(di_q)/dt: inverter-side inductor.
    A(0, 0) = -wn * pp.R_f / pp.L_f;
    A(0, 1) = wn * wg;
    A(0, 2) = -wn / pp.L_f;
    A(1, 0) = -wn * wg;
    A(1, 1) = -wn * pp.R_f / pp.L_f;
    A(1, 3) = -wn / pp.L_f;
    // d(dv_d)/dt, d(dv_q)/dt: filter capacitor.
    A(2, 0) = wn / pp.C_f;
    A(2, 3) = wn * wg;
    A(2, 4) = -wn / pp.C_f;
    A(3, 1) = wn / pp.C_f;
    A(3, 2) = -wn * wg;
    A(3, 5) = -wn / pp.C_f;
    // d(di_gd)/dt, d(di_gq)/dt: grid-side inductor.
    A(4, 2) = wn / pp.L_g;
    A(4, 4) = -wn * pp.R_g / pp.L_g;
    A(4, 5) = wn * wg;
    A(5, 3) = wn / pp.L_g;
    A(5, 4) = -wn * wg;
    A(5, 5) = -wn * pp.R_g / pp.L_g;

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(6, 2);
    B(0, 0) = wn / pp.L_f;
    B(1, 1) = wn / pp.L_f;

    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, 6);
    // dp = i_g0 . dv + v0 . di_g  (grid-side power).
    C(0, 2) = op.i_gd0;
    C(0, 3) = op.i_gq0;
    C(0, 4) = op.v_d0;
    C(0, 5) = op.v_q0;
    // dq = i_g0 x dv + (v0 x .)di_g.
    C(1, 2) = -op.i_gq0;
    C(1, 3) = op.i_gd0;
    C(1, 4) = op.v_q0;
    C(1, 5) = -op.v_d0;
    // dV = (v0 . dv)/V0.
    C(2, 2) = op.v_d0 / op.V0;
    C(2, 3) = op.v_q0 / op.V0;

    StateSpaceModel ss(A, B, C);
    const RationalMatrix G = ss_to_rational(ss);

    // Directional inputs: magnitude perturbation along [cos d0, sin d0] and
    // angle perturbation along E0*[-sin d0, cos d0].
    const double cd = std::cos(op.delta0);
    const double sd = std::sin(op.delta0);
    const Polynomial num_p =
        op.E0 * (-sd * G.num[0][0] + cd * G.num[0][1]);
    const Polynomial num_q = cd * G.num[1][0] + sd * G.num[1][1];
    const Polynomial num_V = cd * G.num[2][0] + sd * G.num[2][1];

    // Lossless analytic factors of the characteristic polynomial:
    // det(A-factor) = s^2/omega_n^2 + omega_g^2,
    // det(B-factor) = (L_g/omega_LC^2)^2 (s^2 + omega_1^2)(s^2 + omega_2^2).
    const ResonanceProfile rf = resonance_frequencies(pp);
    const Polynomial det_A{wg * wg, 0.0, 1.0 / (wn * wn)};
    const double kB = pp.L_g * pp.L_g / (rf.omega_LC * rf.omega_LC * rf.omega_LC *
                                         rf.omega_LC);
    const Polynomial det_B =
        kB * (Polynomial{rf.omega_1 * rf.omega_1, 0.0, 1.0} *
              Polynomial{rf.omega_2 * rf.omega_2, 0.0, 1.0});

    return LinearPlant{std::move(ss),
                       RationalFn(num_p, G.den),
                       RationalFn(num_q, G.den),
                       RationalFn(num_V, G.den),
                       det_A,
                       det_B,
                       pp,
                       op};
}

}  // namespace slgfm
