#include "slgfm/loops.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "slgfm/errors.hpp"

namespace slgfm {

namespace {

constexpr double kPi = std::numbers::pi;

OlModel finish(RationalFn tf, ControlLaw law,
               std::vector<CancelledPair> pairs, const PlantParams& pp) {
    const double eps = 1e-6 * resonance_frequencies(pp).omega_LCL;
    std::vector<std::complex<double>> poles = roots(tf.den());
    int p_count = 0;
    for (const auto& p : poles) {
        if (p.real() > eps) {
            ++p_count;
        }
    }
    return OlModel{std::move(tf), std::move(poles), p_count, law,
                   std::move(pairs), eps};
}

}  // namespace

OlModel build_droop_ol(const LinearPlant& plant, double D_q, double T_q) {
    if (D_q <= 0.0 || T_q <= 0.0) {
        throw std::invalid_argument("build_droop_ol: D_q and T_q must be positive");
    }
    // G_qE / (D_q (T_q s + 1)): the plant factor stays in the denominator
    // untouched; only the droop filter pole is added.
    const Polynomial den = plant.G_qE.den() * Polynomial{D_q, D_q * T_q};
    return finish(RationalFn(plant.G_qE.num(), den), ControlLaw::Droop, {},
                  plant.pp);
}

OlModel build_droopI_ol(const LinearPlant& plant, double D_q, double k_pq,
                        double k_iq) {
    if (D_q <= 0.0 || k_pq < 0.0 || k_iq <= 0.0) {
        throw std::invalid_argument(
            "build_droopI_ol: need D_q > 0, k_pq >= 0, k_iq > 0");
    }
    // The inner-loop closure PI/(1 + PI D_q G_VE) * G_qE shares the plant
    // characteristic polynomial X between G_VE and G_qE; it cancels exactly
    // when both carry the same X, leaving
    //   num = (k_pq s + k_iq) Nq,  den = s X + (k_pq s + k_iq) D_q Nv.
    // The assembly is done directly in that reduced form (polynomial
    // arithmetic only), so the cancellation cannot lose precision; the pairs
    // are recorded from the roots of X for the bookkeeping contract.
    if (plant.G_qE.den().coeffs() != plant.G_VE.den().coeffs()) {
        throw CancellationFailure(
            "build_droopI_ol: G_qE and G_VE denominators differ; the plant "
            "factor cannot cancel");
    }
    const Polynomial& X = plant.G_qE.den();
    const Polynomial pi_num{k_iq, k_pq};
    const Polynomial num = pi_num * plant.G_qE.num();
    const Polynomial den =
        Polynomial::s() * X + pi_num * (D_q * plant.G_VE.num());

    std::vector<CancelledPair> pairs;
    for (const auto& r : roots(X)) {
        pairs.push_back({r, r});
    }
    return finish(RationalFn(num, den), ControlLaw::DroopI, std::move(pairs),
                  plant.pp);
}

OlModel build_ap_ol(const LinearPlant& plant, double H, double D_p) {
    if (H <= 0.0 || D_p < 0.0) {
        throw std::invalid_argument("build_ap_ol: need H > 0, D_p >= 0");
    }
    // G_pdelta * omega_n / (s (2 H s + D_p)).
    const Polynomial num = plant.pp.omega_n * plant.G_pdelta.num();
    const Polynomial den =
        plant.G_pdelta.den() * Polynomial{0.0, D_p, 2.0 * H};
    return finish(RationalFn(num, den), ControlLaw::Droop, {}, plant.pp);
}

Polynomial CharCoeffs::to_polynomial() const {
    return Polynomial{a0, a1, a2, a3, 0.0, 1.0};
}

CharCoeffs char_coeffs_lossless(const PlantParams& pp, const OperatingPoint& op,
                                double D_q, double k_pq, double k_iq) {
    const ResonanceProfile rf = resonance_frequencies(pp);
    const double w1 = rf.omega_1, w2 = rf.omega_2;
    const double wLC2 = rf.omega_LC * rf.omega_LC;
    const double wLg = rf.omega_Lg;

    // Capacitor voltage in the converter frame (rotate the grid-frame
    // components by -delta0); the closed forms hold exactly only there.
    const double cd = std::cos(op.delta0);
    const double sd = std::sin(op.delta0);
    const double vd0 = op.v_d0 * cd + op.v_q0 * sd;
    const double vq0 = op.v_q0 * cd - op.v_d0 * sd;
    const double K = D_q * wLC2 / op.V0;

    CharCoeffs c;
    c.a3 = w1 * w1 + w2 * w2 + K * k_pq * vd0;
    c.a2 = K * (k_iq * vd0 - 2.0 * k_pq * wLg * vq0);
    c.a1 = w1 * w1 * w2 * w2 + K * (w1 * w2 * k_pq * vd0 - 2.0 * k_iq * wLg * vq0);
    c.a0 = K * k_iq * vd0 * w1 * w2;
    return c;
}

AdController AdController::make(AdKind kind, double gain, double time_const) {
    if (time_const <= 0.0) {
        throw std::invalid_argument("AdController: time_const must be positive");
    }
    if (gain < 0.0) {
        throw std::invalid_argument("AdController: gain must be non-negative");
    }
    return AdController{kind, gain, time_const,
                        RationalFn(Polynomial{0.0, gain},
                                   Polynomial{1.0, time_const})};
}

AdController AdController::design_example(AdKind kind) {
    switch (kind) {
        case AdKind::InverterCurrent:
            return make(kind, 5.5e-5, 1.0 / (90.0 * kPi));
        case AdKind::GridCurrent:
            return make(kind, 1.3e-4, 1.0 / (180.0 * kPi));
        case AdKind::CapVoltage:
            return make(kind, 2.2e-6, 1.0 / (4000.0 * kPi));
    }
    throw std::invalid_argument("AdController: unknown kind");
}

LinearPlant apply_ad(const LinearPlant& plant, const AdController& ad) {
    if (plant.ss.n_states() != 6) {
        throw std::invalid_argument(
            "apply_ad: plant is already augmented (6 circuit states expected)");
    }
    const PlantParams& pp = plant.pp;
    const OperatingPoint& op = plant.op;

    int ch = 0;  // first state index of the measured d/q pair
    double sign = 1.0;
    switch (ad.kind) {
        case AdKind::InverterCurrent: ch = 0; break;
        case AdKind::CapVoltage: ch = 2; break;
        case AdKind::GridCurrent:
            ch = 4;
            sign = -1.0;  // negative high-pass: feedback adds the washout output
            break;
    }

    // Washout state realization y = (k/T)(m - x_f), x_f' = (m - x_f)/T with
    // e_applied = e_ref - sign*y entering through the inverter inductor rows.
    const double g = sign * ad.gain / ad.time_const;
    const double bL = pp.omega_n / pp.L_f;

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(8, 8);
    A.topLeftCorner(6, 6) = plant.ss.A;
    A(0, ch) -= bL * g;
    A(0, 6) += bL * g;
    A(1, ch + 1) -= bL * g;
    A(1, 7) += bL * g;
    A(6, ch) = 1.0 / ad.time_const;
    A(6, 6) = -1.0 / ad.time_const;
    A(7, ch + 1) = 1.0 / ad.time_const;
    A(7, 7) = -1.0 / ad.time_const;

    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(8, 2);
    B.topRows(6) = plant.ss.B;
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(3, 8);
    C.leftCols(6) = plant.ss.C;

    StateSpaceModel ss(A, B, C);
    const RationalMatrix G = ss_to_rational(ss);

    const double cd = std::cos(op.delta0);
    const double sd = std::sin(op.delta0);
    const Polynomial num_p = op.E0 * (-sd * G.num[0][0] + cd * G.num[0][1]);
    const Polynomial num_q = cd * G.num[1][0] + sd * G.num[1][1];
    const Polynomial num_V = cd * G.num[2][0] + sd * G.num[2][1];

    return LinearPlant{std::move(ss),
                       RationalFn(num_p, G.den),
                       RationalFn(num_q, G.den),
                       RationalFn(num_V, G.den),
                       plant.det_A,
                       plant.det_B,
                       pp,
                       op};
}

}  // namespace slgfm
