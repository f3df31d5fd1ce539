#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <slgfm/errors.hpp>
#include <slgfm/loops.hpp>
#include <slgfm/plant.hpp>
#include <slgfm/poly.hpp>
#include <slgfm/rational.hpp>
#include <slgfm/state_space.hpp>

#include "test_helpers.hpp"

using namespace slgfm;
using slgfm::testing::reference_plant;
using slgfm::testing::same_root_set;
using Catch::Approx;

namespace {

/// Independent oracle for roots(): eigenvalues of the companion matrix built
/// directly with Eigen, no scaling tricks shared with the library routine.
std::vector<std::complex<double>> companion_eigs(const Polynomial& p) {
    const int n = p.degree();
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    const double lead = p.coeff(n);
    for (int i = 0; i < n; ++i) {
        C(i, n - 1) = -p.coeff(i) / lead;
        if (i > 0) { C(i, i - 1) = 1.0; }
    }
    Eigen::EigenSolver<Eigen::MatrixXd> es(C);
    std::vector<std::complex<double>> out;
    for (int i = 0; i < n; ++i) { out.push_back(es.eigenvalues()[i]); }
    return out;
}

}  // namespace

TEST_CASE("polynomial construction normalizes trailing zeros") {
    const Polynomial p{1.0, 2.0, 0.0, 0.0};
    CHECK(p.degree() == 1);
    CHECK(p.coeff(0) == 1.0);
    CHECK(p.coeff(1) == 2.0);
    CHECK(p.coeff(5) == 0.0);

    CHECK(Polynomial::constant(0.0).degree() == 0);
    CHECK(Polynomial::constant(0.0).is_zero());
    CHECK_THROWS_AS(Polynomial(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("poly_arith difference of squares") {
    const Polynomial a{1.0, 1.0};   // s + 1
    const Polynomial b{-1.0, 1.0};  // s - 1
    const Polynomial prod = poly_arith(a, b, PolyOp::Mul);
    REQUIRE(prod.degree() == 2);
    CHECK(prod.coeff(0) == Approx(-1.0));
    CHECK(prod.coeff(1) == Approx(0.0).margin(1e-15));
    CHECK(prod.coeff(2) == Approx(1.0));

    CHECK(poly_arith(a, b, PolyOp::Add).degree() == 1);
    CHECK(poly_arith(a, a, PolyOp::Sub).is_zero());
}

TEST_CASE("poly_arith resonant quartic expansion") {
    std::mt19937 rng(20260823);
    std::uniform_real_distribution<double> freq(100.0, 9000.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double w1 = freq(rng);
        const double w2 = freq(rng);
        const Polynomial prod =
            Polynomial{w1 * w1, 0.0, 1.0} * Polynomial{w2 * w2, 0.0, 1.0};
        REQUIRE(prod.degree() == 4);
        CHECK(prod.coeff(4) == Approx(1.0));
        CHECK(prod.coeff(3) == Approx(0.0).margin(1e-9));
        CHECK(prod.coeff(2) == Approx(w1 * w1 + w2 * w2));
        CHECK(prod.coeff(1) == Approx(0.0).margin(1e-9));
        CHECK(prod.coeff(0) == Approx(w1 * w1 * w2 * w2));
    }
}

TEST_CASE("det_B matches the analytic resonant product") {
    // Lossless plant on the reference line: det_B must equal
    // L_g^2/omega_LC^4 * (s^2 + omega_1^2)(s^2 + omega_2^2) coefficientwise,
    // checked by evaluating both forms at random points.
    const PlantParams pp = reference_plant(slgfm::testing::kLg02, 0.0);
    ControlParams cp = slgfm::testing::reference_control(ControlLaw::Droop);
    const OperatingPoint op = solve_operating_point(pp, cp);
    const LinearPlant plant = linearize(pp, op);

    const ResonanceProfile rf = resonance_frequencies(pp);
    const double kB = pp.L_g * pp.L_g /
                      (rf.omega_LC * rf.omega_LC * rf.omega_LC * rf.omega_LC);
    const Polynomial expect =
        kB * (Polynomial{rf.omega_1 * rf.omega_1, 0.0, 1.0} *
              Polynomial{rf.omega_2 * rf.omega_2, 0.0, 1.0});

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> re(-8000.0, 8000.0);
    for (int i = 0; i < 100; ++i) {
        const std::complex<double> s(re(rng), re(rng));
        const std::complex<double> a = plant.det_B(s);
        const std::complex<double> b = expect(s);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)));
    }
}

TEST_CASE("roots of the unit oscillator") {
    const auto r = roots(Polynomial{1.0, 0.0, 1.0});
    REQUIRE(r.size() == 2);
    CHECK(same_root_set(r, {{0.0, 1.0}, {0.0, -1.0}}, 1e-12));
}

TEST_CASE("roots of the droop q-filter factor") {
    // s + 1/T_q for T_q = 0.051 s: the single real controller pole.
    const double inv_Tq = 1.0 / 0.051;
    const auto r = roots(Polynomial{inv_Tq, 1.0});
    REQUIRE(r.size() == 1);
    CHECK(r[0].real() == Approx(-19.6078).epsilon(1e-4));
    CHECK(r[0].imag() == 0.0);
}

TEST_CASE("unstable reactive quintic has two RHP conjugate pairs") {
    // Fast integral gain on the reference line: the lossless degree-5
    // characteristic factor must carry two unstable conjugate pairs.
    // Cross-checked against an independently built companion matrix.
    const PlantParams pp = reference_plant(slgfm::testing::kLg02, 0.0);
    ControlParams cp = slgfm::testing::fast_control(ControlLaw::DroopI);
    const OperatingPoint op = solve_operating_point(pp, cp);
    const Polynomial quintic =
        char_coeffs_lossless(pp, op, cp.D_q, cp.k_pq, cp.k_iq).to_polynomial();

    const auto r = roots(quintic);
    REQUIRE(r.size() == 5);
    int pos = 0, neg = 0;
    for (const auto& root : r) {
        if (root.real() > 0.0) { ++pos; }
        if (root.real() < 0.0) { ++neg; }
    }
    CHECK(pos == 4);  // two conjugate pairs
    CHECK(neg == 1);

    CHECK(same_root_set(r, companion_eigs(quintic), 1e-6));
}

TEST_CASE("roots output is conjugate-closed for random polynomials") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> coef(-5.0, 5.0);
    std::uniform_int_distribution<int> deg(2, 8);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> c(static_cast<size_t>(deg(rng)) + 1);
        for (double& x : c) { x = coef(rng); }
        if (std::abs(c.back()) < 0.1) { c.back() = 1.0; }
        const auto r = roots(Polynomial(c));
        // Every root with nonzero imaginary part must have its conjugate in
        // the set.
        for (const auto& root : r) {
            if (std::abs(root.imag()) < 1e-12) { continue; }
            const auto match = slgfm::testing::nearest(r, std::conj(root));
            CHECK(std::abs(match - std::conj(root)) <=
                  1e-9 * std::max(1.0, std::abs(root)));
        }
    }
}

TEST_CASE("roots of a product is the union of factor roots") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_int_distribution<int> deg(1, 4);
    for (int trial = 0; trial < 40; ++trial) {
        auto draw = [&] {
            std::vector<double> c(static_cast<size_t>(deg(rng)) + 1);
            for (double& x : c) { x = coef(rng); }
            if (std::abs(c.back()) < 0.1) { c.back() = 1.0; }
            return Polynomial(c);
        };
        const Polynomial a = draw();
        const Polynomial b = draw();
        auto expect = roots(a);
        const auto rb = roots(b);
        expect.insert(expect.end(), rb.begin(), rb.end());
        CHECK(same_root_set(roots(a * b), expect, 1e-5));
    }
}

TEST_CASE("from_roots round trip and conjugacy enforcement") {
    const std::vector<std::complex<double>> set = {
        {-19.6, 0.0}, {-6.8, 5786.6}, {-6.8, -5786.6}};
    const Polynomial p = Polynomial::from_roots(set, 2.0);
    CHECK(p.degree() == 3);
    CHECK(p.coeff(3) == Approx(2.0));
    CHECK(same_root_set(roots(p), set, 1e-9));

    const std::vector<std::complex<double>> unmatched = {{0.0, 1.0}};
    CHECK_THROWS_AS(Polynomial::from_roots(unmatched), std::invalid_argument);
}

TEST_CASE("root polishing meets the residual tolerance") {
    // Frequencies in the rad/s range the analysis lives at: coefficients span
    // ~15 decades, the pre-scaling must still deliver tol-level residuals.
    const Polynomial p =
        Polynomial{5786.0 * 5786.0, 11.0, 1.0} *
        Polynomial{5158.0 * 5158.0, 3.2, 1.0} * Polynomial{19.6, 1.0};
    const auto r = roots(p);
    REQUIRE(r.size() == 5);
    for (const auto& root : r) {
        CHECK(std::abs(p(root)) <= 1e-6 * p.max_coeff());
    }
    CHECK_THROWS_AS(roots(Polynomial::constant(3.0)), std::invalid_argument);
}

TEST_CASE("ss_to_rational of the 1-state integrator") {
    Eigen::MatrixXd A(1, 1), B(1, 1), C(1, 1);
    A << 0.0;
    B << 1.0;
    C << 1.0;
    const RationalMatrix G = ss_to_rational(StateSpaceModel(A, B, C));
    REQUIRE(G.den.degree() == 1);
    CHECK(G.den.coeff(0) == Approx(0.0).margin(1e-14));
    CHECK(G.den.coeff(1) == Approx(1.0));
    CHECK(G.num[0][0].degree() == 0);
    CHECK(G.num[0][0].coeff(0) == Approx(1.0));
}

TEST_CASE("ss_to_rational of the undamped oscillator") {
    const double w0 = 320.0;
    Eigen::MatrixXd A(2, 2), B(2, 1), C(1, 2);
    A << 0.0, 1.0, -w0 * w0, 0.0;
    B << 0.0, 1.0;
    C << 1.0, 0.0;
    const RationalMatrix G = ss_to_rational(StateSpaceModel(A, B, C));
    REQUIRE(G.den.degree() == 2);
    const double lead = G.den.coeff(2);
    CHECK(G.den.coeff(0) / lead == Approx(w0 * w0));
    CHECK(G.den.coeff(1) / lead == Approx(0.0).margin(1e-9));
}

TEST_CASE("ss_to_rational agrees with the direct complex solve") {
    std::mt19937 rng(2024);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> dim(2, 8);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = trial < 10 ? 6 : dim(rng);
        Eigen::MatrixXd A(n, n), B(n, 1), C(1, n);
        for (int i = 0; i < n; ++i) {
            B(i, 0) = gauss(rng);
            C(0, i) = gauss(rng);
            for (int j = 0; j < n; ++j) { A(i, j) = gauss(rng); }
        }
        A -= (n + 2.0) * Eigen::MatrixXd::Identity(n, n);  // keep it stable
        const StateSpaceModel m(A, B, C);
        const RationalFn G = ss_to_rational(m).entry(0, 0);

        for (int k = 0; k < 50; ++k) {
            const double w = std::pow(10.0, -2.0 + 6.0 * k / 49.0);
            const std::complex<double> s(0.0, w);
            const Eigen::MatrixXcd res =
                (s * Eigen::MatrixXcd::Identity(n, n) - A.cast<std::complex<double>>())
                    .partialPivLu()
                    .solve(B.cast<std::complex<double>>());
            const std::complex<double> direct =
                (C.cast<std::complex<double>>() * res)(0, 0);
            CHECK(std::abs(G(s) - direct) <=
                  1e-8 * std::max(1.0, std::abs(direct)));
        }
    }
}

TEST_CASE("ss_to_rational rejects mismatched dimensions") {
    Eigen::MatrixXd A(2, 3), B(2, 1), C(1, 2);
    A.setZero();
    B.setZero();
    C.setZero();
    CHECK_THROWS_AS(StateSpaceModel(A, B, C), DimensionMismatch);
}

TEST_CASE("rational evaluation basics") {
    const RationalFn g(Polynomial{1.0}, Polynomial{1.0, 1.0});  // 1/(s+1)
    CHECK(g({0.0, 0.0}).real() == Approx(1.0));
    CHECK(g({0.0, 0.0}).imag() == Approx(0.0).margin(1e-15));
    const std::complex<double> at_j = g({0.0, 1.0});
    CHECK(at_j.real() == Approx(0.5));
    CHECK(at_j.imag() == Approx(-0.5));
}

TEST_CASE("evaluation on a pole raises PoleHit") {
    const RationalFn g(Polynomial{1.0}, Polynomial{0.0, 1.0});  // 1/s
    CHECK_THROWS_AS(g({0.0, 0.0}), PoleHit);
    CHECK_THROWS_AS(RationalFn(Polynomial{1.0}, Polynomial::constant(0.0)),
                    std::invalid_argument);
}

TEST_CASE("droop reactive loop is strictly proper") {
    const PlantParams pp = reference_plant();
    ControlParams cp = slgfm::testing::reference_control(ControlLaw::Droop);
    const OperatingPoint op = solve_operating_point(pp, cp);
    const LinearPlant plant = linearize(pp, op);
    const OlModel ol = build_droop_ol(plant, cp.D_q, cp.T_q);

    CHECK(ol.tf.relative_degree() > 0);
    // |G| -> 0 along the imaginary axis.
    double prev = std::abs(ol.tf({0.0, 1e5}));
    for (double w : {1e6, 1e7, 1e8}) {
        const double mag = std::abs(ol.tf({0.0, w}));
        CHECK(mag < prev);
        prev = mag;
    }
    CHECK(prev < 1e-8);
}

TEST_CASE("explicit cancellation pairs and reduces") {
    // (s+2)(s+5) / ((s+2)(s+9)): exactly one pair must cancel.
    const Polynomial num = Polynomial{2.0, 1.0} * Polynomial{5.0, 1.0};
    const Polynomial den = Polynomial{2.0, 1.0} * Polynomial{9.0, 1.0};
    const CancelResult res = cancel(RationalFn(num, den), 1e-6, 1);
    REQUIRE(res.pairs.size() == 1);
    CHECK(res.pairs[0].pole.real() == Approx(-2.0));
    CHECK(res.reduced.num().degree() == 1);
    CHECK(res.reduced.den().degree() == 1);
    CHECK(std::abs(res.reduced({0.0, 0.0}) - std::complex<double>(5.0 / 9.0)) <
          1e-9);

    // Expecting two pairs where only one exists must fail loudly.
    CHECK_THROWS_AS(cancel(RationalFn(num, den), 1e-6, 2), CancellationFailure);
}
