#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <slgfm/errors.hpp>
#include <slgfm/loops.hpp>
#include <slgfm/plant.hpp>

#include "test_helpers.hpp"

using namespace slgfm;
using namespace slgfm::testing;
using Catch::Approx;

namespace {

LinearPlant make_plant(double L_g, double x_over_r, ControlLaw law,
                       double P_st = 0.5) {
    const PlantParams pp = reference_plant(L_g, x_over_r);
    ControlParams cp = reference_control(law);
    cp.P_st = P_st;
    return linearize(pp, solve_operating_point(pp, cp));
}

/// Maximum over `expect` of the distance to the closest element of `got`.
double set_distance(const std::vector<std::complex<double>>& got,
                    const std::vector<std::complex<double>>& expect) {
    double worst = 0.0;
    for (const auto& e : expect) {
        worst = std::max(worst, std::abs(nearest(got, e) - e));
    }
    return worst;
}

}  // namespace

TEST_CASE("droop loop contributes exactly the q-filter pole") {
    const LinearPlant plant = make_plant(kLg02, 8.0, ControlLaw::Droop);

    for (double T_q : {0.051, 0.014}) {
        const OlModel ol = build_droop_ol(plant, 10.0, T_q);
        CHECK(ol.law == ControlLaw::Droop);
        REQUIRE(ol.ol_poles.size() == 7);
        CHECK(ol.p_count == 0);

        const auto rap = nearest(ol.ol_poles, {-1.0 / T_q, 0.0});
        CHECK(rap.real() == Approx(-1.0 / T_q).epsilon(1e-9));
        CHECK(rap.imag() == 0.0);
    }
    // The published rounded values.
    const OlModel slow = build_droop_ol(plant, 10.0, 0.051);
    CHECK(nearest(slow.ol_poles, {-19.6, 0.0}).real() ==
          Approx(-19.6).epsilon(1e-3));
    const OlModel fast = build_droop_ol(plant, 10.0, 0.014);
    CHECK(nearest(fast.ol_poles, {-71.4, 0.0}).real() ==
          Approx(-71.4).epsilon(1e-3));
}

TEST_CASE("droop loop never moves the plant resonances") {
    // Decoupling invariant: every (D_q, T_q) combination leaves the six plant
    // poles exactly where linearize put them.
    const LinearPlant plant = make_plant(kLg02, 8.0, ControlLaw::Droop);
    const auto plant_poles = roots(plant.G_qE.den());

    for (double D_q : {2.0, 5.0, 10.0, 20.0, 40.0}) {
        for (double T_q : {0.005, 0.014, 0.051, 0.2, 1.0}) {
            const OlModel ol = build_droop_ol(plant, D_q, T_q);
            // Each plant pole appears in ol_poles essentially unperturbed.
            CHECK(set_distance(ol.ol_poles, plant_poles) <= 1e-10 * 5786.6);
        }
    }
}

TEST_CASE("droop gain scales the response without moving poles") {
    const LinearPlant plant = make_plant(kLg02, 8.0, ControlLaw::Droop);
    const OlModel a = build_droop_ol(plant, 10.0, 0.051);
    const OlModel b = build_droop_ol(plant, 20.0, 0.051);

    std::mt19937 rng(5);
    std::uniform_real_distribution<double> draw(1.0, 2e4);
    for (int i = 0; i < 20; ++i) {
        const std::complex<double> s(0.0, draw(rng));
        CHECK(std::abs(a.tf(s)) == Approx(2.0 * std::abs(b.tf(s))).epsilon(1e-9));
    }
    CHECK(same_root_set(a.ol_poles, b.ol_poles, 1e-10));
}

TEST_CASE("droop-I open loop reproduces the stable published poles") {
    // Reference line, k_iq = 2.99: all open-loop poles remain in the LHP with
    // the resonant pairs barely damped.
    const LinearPlant plant = make_plant(kLg02, 8.0, ControlLaw::DroopI);
    const OlModel ol = build_droopI_ol(plant, 10.0, 0.0, 2.99);

    CHECK(ol.law == ControlLaw::DroopI);
    REQUIRE(ol.ol_poles.size() == 7);
    CHECK(ol.p_count == 0);
    CHECK(ol.cancelled_pairs.size() == 6);
    for (const auto& pr : ol.cancelled_pairs) {
        CHECK(std::abs(pr.zero - pr.pole) <=
              1e-6 * std::max(1.0, std::abs(pr.pole)));
    }

    const auto lf = nearest(ol.ol_poles, {-19.6, 0.0});
    CHECK(lf.real() == Approx(-19.6).epsilon(0.01));
    const auto hi = nearest(ol.ol_poles, {-2.2, 5786.3});
    CHECK(hi.imag() == Approx(5786.3).epsilon(0.01));
    CHECK(hi.real() < 0.0);
    const auto lo = nearest(ol.ol_poles, {-1.7, 5158.6});
    CHECK(lo.imag() == Approx(5158.6).epsilon(0.01));
    CHECK(lo.real() < 0.0);
}

TEST_CASE("fast droop-I integral gain destabilizes the open loop") {
    const LinearPlant plant = make_plant(kLg02, 8.0, ControlLaw::DroopI);
    const OlModel ol = build_droopI_ol(plant, 10.0, 0.0, 10.97);

    CHECK(ol.p_count == 4);
    const auto hi = nearest(ol.ol_poles, {10.1, 5785.3});
    CHECK(hi.real() > 0.0);
    CHECK(hi.imag() == Approx(5785.3).epsilon(0.01));
    CHECK(hi.real() == Approx(10.1).epsilon(0.5));
    const auto lo = nearest(ol.ol_poles, {12.1, 5159.9});
    CHECK(lo.real() > 0.0);
    CHECK(lo.imag() == Approx(5159.9).epsilon(0.01));
    CHECK(lo.real() == Approx(12.1).epsilon(0.5));
}

TEST_CASE("droop-I poles collapse onto the plant poles as k_iq vanishes") {
    const LinearPlant plant = make_plant(kLg02, 8.0, ControlLaw::DroopI);
    auto plant_poles = roots(plant.G_qE.den());
    plant_poles.push_back({0.0, 0.0});  // the integrator remnant

    // Any positive k_iq moves the poles...
    const OlModel moved = build_droopI_ol(plant, 10.0, 0.0, 2.99);
    CHECK(set_distance(moved.ol_poles, plant_poles) > 1.0);

    // ...and the displacement shrinks monotonically with k_iq.
    double prev = 1e9;
    for (double k_iq : {1e-3, 1e-4, 1e-5}) {
        const OlModel ol = build_droopI_ol(plant, 10.0, 0.0, k_iq);
        REQUIRE(ol.ol_poles.size() == 7);
        const double d = set_distance(ol.ol_poles, plant_poles);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-3 * 5786.0);
}

TEST_CASE("droop-I rejects invalid gains") {
    const LinearPlant plant = make_plant(kLg02, 8.0, ControlLaw::DroopI);
    CHECK_THROWS_AS(build_droopI_ol(plant, 10.0, 0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_droopI_ol(plant, 0.0, 0.0, 2.99),
                    std::invalid_argument);
    CHECK_THROWS_AS(build_droop_ol(plant, 10.0, 0.0), std::invalid_argument);
}

TEST_CASE("active-power loop adds the swing poles only") {
    const LinearPlant plant = make_plant(kLg02, 8.0, ControlLaw::Droop);
    const auto plant_poles = roots(plant.G_pdelta.den());

    const OlModel ol = build_ap_ol(plant, 0.5, 50.0);
    REQUIRE(ol.ol_poles.size() == 8);
    CHECK(std::abs(nearest(ol.ol_poles, {0.0, 0.0})) < 1e-6);
    CHECK(nearest(ol.ol_poles, {-50.0, 0.0}).real() ==
          Approx(-50.0).epsilon(1e-9));
    CHECK(set_distance(ol.ol_poles, plant_poles) < 1e-8 * 5786.6);

    // Doubling the inertia halves the damping pole; the plant poles stay.
    const OlModel slow = build_ap_ol(plant, 1.0, 50.0);
    CHECK(nearest(slow.ol_poles, {-25.0, 0.0}).real() ==
          Approx(-25.0).epsilon(1e-9));
    CHECK(set_distance(slow.ol_poles, plant_poles) < 1e-8 * 5786.6);
}

TEST_CASE("lossless characteristic coefficients match their closed forms") {
    const PlantParams pp = reference_plant(kLg02, 0.0);
    const ControlParams cp = reference_control(ControlLaw::DroopI);
    const OperatingPoint op = solve_operating_point(pp, cp);
    const ResonanceProfile rf = resonance_frequencies(pp);

    // k_pq = 0 pins a3 to the resonance sum.
    const CharCoeffs c = char_coeffs_lossless(pp, op, 10.0, 0.0, 2.99);
    CHECK(c.a3 == Approx(rf.omega_1 * rf.omega_1 + rf.omega_2 * rf.omega_2));

    // a0 in its published factored form (converter-frame v_d0).
    const double vd0c = op.v_d0 * std::cos(op.delta0) +
                        op.v_q0 * std::sin(op.delta0);
    REQUIRE(vd0c > 0.0);
    CHECK(c.a0 == Approx(vd0c * 2.99 * 10.0 * rf.omega_LC * rf.omega_LC *
                         rf.omega_1 * rf.omega_2 / op.V0));
    CHECK(c.a0 > 0.0);
}

TEST_CASE("closed forms agree with the numeric quintic factor") {
    // Dividing the lossless droop-I denominator by the grid-frequency factor
    // (s^2 + omega_Lg^2) must leave exactly the analytic quintic.
    const PlantParams pp = reference_plant(kLg02, 0.0);
    const ControlParams cp = reference_control(ControlLaw::DroopI);
    const OperatingPoint op = solve_operating_point(pp, cp);
    const LinearPlant plant = linearize(pp, op);
    const ResonanceProfile rf = resonance_frequencies(pp);

    for (double k_iq : {0.5, 2.99, 10.97}) {
        const OlModel ol = build_droopI_ol(plant, 10.0, 0.0, k_iq);
        const Polynomial expect =
            char_coeffs_lossless(pp, op, 10.0, 0.0, k_iq).to_polynomial();

        const Polynomial grid_pair{rf.omega_Lg * rf.omega_Lg, 0.0, 1.0};
        auto [quot, rem] = ol.tf.den().divmod(grid_pair);
        REQUIRE(quot.degree() == 5);
        CHECK(rem.max_coeff() <= 1e-9 * ol.tf.den().max_coeff());

        const double lead = quot.coeff(5);
        const double scale = expect.max_coeff();
        for (int i = 0; i <= 5; ++i) {
            CHECK(std::abs(quot.coeff(i) / lead - expect.coeff(i)) <=
                  1e-9 * scale);
        }
    }
}

TEST_CASE("random lossless draws always carry open-loop RHP pairs") {
    // Structural instability of the droop-I reactive loop: every feasible
    // lossless parameter draw yields at least two RHP roots of the quintic.
    std::mt19937 rng(424242);
    std::uniform_real_distribution<double> dLf(0.05, 0.2);
    std::uniform_real_distribution<double> dCf(0.02, 0.1);
    std::uniform_real_distribution<double> dLg(0.1, 0.6);
    std::uniform_real_distribution<double> dDq(5.0, 20.0);
    std::uniform_real_distribution<double> dKiq(0.5, 12.0);
    std::uniform_real_distribution<double> dPst(0.0, 0.6);

    int done = 0;
    while (done < 100) {
        const PlantParams pp =
            PlantParams::from_per_unit(dLf(rng), dCf(rng), dLg(rng));
        ControlParams cp = reference_control(ControlLaw::DroopI);
        cp.D_q = dDq(rng);
        cp.k_iq = dKiq(rng);
        cp.P_st = dPst(rng);
        OperatingPoint op;
        try {
            op = solve_operating_point(pp, cp);
        } catch (const NumericalError&) {
            continue;  // infeasible draw; redraw
        }
        const Polynomial quintic =
            char_coeffs_lossless(pp, op, cp.D_q, 0.0, cp.k_iq).to_polynomial();
        const auto r = roots(quintic);
        int rhp = 0;
        for (const auto& root : r) {
            if (root.real() > 1e-9 * resonance_frequencies(pp).omega_LCL) {
                ++rhp;
            }
        }
        CHECK(rhp >= 2);
        ++done;
    }
}

TEST_CASE("low-frequency droop-I pole follows the static-gain estimate") {
    const PlantParams pp = reference_plant(kLg02, 0.0);
    const ControlParams base = reference_control(ControlLaw::DroopI);
    const OperatingPoint op = solve_operating_point(pp, base);
    const LinearPlant plant = linearize(pp, op);
    const ResonanceProfile rf = resonance_frequencies(pp);

    const double vd0c = op.v_d0 * std::cos(op.delta0) +
                        op.v_q0 * std::sin(op.delta0);
    for (double k_iq : {0.5, 1.0, 2.0, 2.99}) {
        const OlModel ol = build_droopI_ol(plant, base.D_q, 0.0, k_iq);
        // The single real pole of the loop.
        std::complex<double> real_pole{1e300, 0.0};
        for (const auto& p : ol.ol_poles) {
            if (std::abs(p.imag()) < 1.0 &&
                std::abs(p) < std::abs(real_pole)) {
                real_pole = p;
            }
        }
        const double estimate =
            -k_iq * base.D_q * rf.omega_LC * rf.omega_LC * vd0c /
            ((rf.omega_LCL * rf.omega_LCL - rf.omega_Lg * rf.omega_Lg) * op.V0);
        CHECK(real_pole.real() == Approx(estimate).epsilon(0.05));
    }
}

TEST_CASE("damping controller construction and design values") {
    const AdController inv = AdController::design_example(AdKind::InverterCurrent);
    CHECK(inv.gain == Approx(5.5e-5));
    CHECK(inv.time_const == Approx(1.0 / (90.0 * std::numbers::pi)));
    const AdController grid = AdController::design_example(AdKind::GridCurrent);
    CHECK(grid.gain == Approx(1.3e-4));
    CHECK(grid.time_const == Approx(1.0 / (180.0 * std::numbers::pi)));
    const AdController cap = AdController::design_example(AdKind::CapVoltage);
    CHECK(cap.gain == Approx(2.2e-6));
    CHECK(cap.time_const == Approx(1.0 / (4000.0 * std::numbers::pi)));

    // The washout k*s/(T*s+1): zero at the origin, pole at -1/T.
    const std::complex<double> mid = cap.tf({0.0, 1.0 / cap.time_const});
    CHECK(std::abs(mid) == Approx(cap.gain / cap.time_const / std::sqrt(2.0)));
    CHECK_THROWS_AS(AdController::make(AdKind::CapVoltage, 1e-6, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(AdController::make(AdKind::CapVoltage, -1e-6, 1e-3),
                    std::invalid_argument);
}

TEST_CASE("voltage-based damping stabilizes the worst droop case") {
    // Weak line, fast droop filter, capacitor-voltage AD at its design gain:
    // the resonant pairs settle deep in the LHP.
    const LinearPlant plant = make_plant(kLg05, 8.0, ControlLaw::Droop);
    const LinearPlant damped =
        apply_ad(plant, AdController::design_example(AdKind::CapVoltage));
    const OlModel ol = build_droop_ol(damped, 10.0, 0.014);

    CHECK(ol.p_count == 0);
    for (const auto& p : ol.ol_poles) { CHECK(p.real() < 0.0); }

    const auto hi = nearest(ol.ol_poles, {-23.0, 5182.0});
    CHECK(hi.imag() == Approx(5182.0).epsilon(0.01));
    CHECK(hi.real() == Approx(-23.0).epsilon(0.5));
    const auto lo = nearest(ol.ol_poles, {-21.0, 4552.0});
    CHECK(lo.imag() == Approx(4552.0).epsilon(0.01));
    CHECK(lo.real() == Approx(-21.0).epsilon(0.5));
}

TEST_CASE("inverter-current damping leaves one unstable droop-I pair") {
    const LinearPlant plant = make_plant(kLg05, 8.0, ControlLaw::DroopI);
    const LinearPlant damped =
        apply_ad(plant, AdController::design_example(AdKind::InverterCurrent));
    const OlModel ol = build_droopI_ol(damped, 10.0, 0.0, 10.97);

    CHECK(ol.p_count == 2);
    const auto bad = nearest(ol.ol_poles, {1.7, 4546.6});
    CHECK(bad.real() > 0.0);
    CHECK(bad.imag() == Approx(4546.6).epsilon(0.01));
}

TEST_CASE("zero-gain damping is a pole-set no-op") {
    const LinearPlant plant = make_plant(kLg02, 8.0, ControlLaw::DroopI);
    const LinearPlant damped =
        apply_ad(plant, AdController::make(AdKind::GridCurrent, 0.0, 1e-3));

    // Every original pole survives unmoved; only the two inert washout poles
    // are appended.
    const auto before = roots(plant.G_qE.den());
    const auto after = roots(damped.G_qE.den());
    REQUIRE(after.size() == before.size() + 2);
    CHECK(set_distance(after, before) <= 1e-10 * 5786.6);
    int washouts = 0;
    for (const auto& p : after) {
        if (std::abs(p - std::complex<double>(-1e3, 0.0)) < 1e-6 * 1e3) {
            ++washouts;
        }
    }
    CHECK(washouts == 2);

    // The frequency response is untouched.
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> draw(1.0, 2e4);
    for (int i = 0; i < 20; ++i) {
        const std::complex<double> s(0.0, draw(rng));
        const auto g0 = plant.G_qE(s);
        CHECK(std::abs(damped.G_qE(s) - g0) <=
              1e-8 * std::max(1.0, std::abs(g0)));
    }
}
