#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "slgfm/loops.hpp"

namespace slgfm {

/// A rational function of the Routh perturbation parameter epsilon,
/// num(eps)/den(eps) with ascending coefficients.  Routh tableau entries are
/// carried in this form so their signs can be taken symbolically in the limit
/// eps -> 0+ (exactly-zero pivots are replaced by the symbol eps itself).
struct EpsRational {
    std::vector<double> num;  ///< ascending in eps
    std::vector<double> den;  ///< ascending in eps

    static EpsRational constant(double c);
    static EpsRational epsilon();

    bool is_constant() const;
    /// Valid only when is_constant().
    double constant_value() const;

    /// Lowest nonzero order of num minus that of den: < 0 means the entry
    /// diverges as eps -> 0+ (the tableau's +-infinity limits).
    int limit_order() const;

    /// Sign of the entry for arbitrarily small eps > 0: the sign of the
    /// lowest-order coefficient ratio.  0 for the identically-zero entry.
    int sign_limit() const;

    /// Finite limit value as eps -> 0+ (valid when limit_order() >= 0;
    /// 0 when > 0).
    double limit_value() const;

    /// Human-readable form ("-inf", a number, or "num(eps)/den(eps)").
    std::string describe() const;

    EpsRational operator*(const EpsRational& o) const;
    EpsRational operator-(const EpsRational& o) const;
    EpsRational operator/(const EpsRational& o) const;
};

/// One first-column tableau entry with its resolved sign.
struct RouthEntry {
    EpsRational value;
    int sign;      ///< sign as eps -> 0+ (+1 / -1; 0 never survives a row)
    int power;     ///< the s-power this row tests
};

struct RouthReport {
    std::vector<RouthEntry> first_column;
    int sign_changes;
    int rhp_count;       ///< equals sign_changes
    bool used_epsilon;   ///< an exactly-zero pivot was replaced by eps
    bool used_aux_row;   ///< a zero row was replaced by the auxiliary
                         ///< polynomial's derivative
    bool inconclusive;   ///< degeneracy survived the auxiliary substitution
};

/// Routh tableau of p with the symbolic-epsilon special case: a zero first
/// entry of a row becomes the symbol eps and all downstream entries stay
/// rational functions of eps, classified by their sign limit as eps -> 0+.
/// A fully-zero row is replaced by the derivative of the auxiliary polynomial
/// (imaginary-axis root pairs are NOT counted as right-half-plane).
/// Throws std::invalid_argument for degree < 1.
RouthReport routh(const Polynomial& p);

/// Nyquist sweep samples and the resulting winding number.
///
/// Sign convention: winding_number counts CLOCKWISE encirclements of -1+0j as
/// positive, so Z = N + P holds directly with P the open-loop RHP pole count
/// and Z the closed-loop RHP root count.
struct NyquistReport {
    /// (omega, G(j*omega)) over the full contour, omega ascending from
    /// -omega_max to +omega_max (negative half mirrored by conjugacy).
    std::vector<std::pair<double, std::complex<double>>> samples;
    int winding_number;
    double closest_approach;  ///< min |G(j*omega) + 1|
};

/// Samples G over a logarithmic omega grid in [omega_min, omega_max]
/// (plus omega = 0), adaptively refined until consecutive samples satisfy
/// |dG| < 0.05 * (1 + |G|), mirrors by conjugacy, and accumulates the
/// argument of G + 1 around the closed contour.  The closure through
/// |s| -> infinity contributes nothing for strictly proper G.
///
/// Throws PoleOnContour when an open-loop pole lies within 1e-6 relative of
/// the imaginary axis (lossless models; add grid resistance instead;
/// contour indentation is not implemented).
NyquistReport nyquist(const OlModel& m, double omega_min, double omega_max,
                      int pts);

/// Combined closed-loop classification, Z = N + P.
struct StabilityVerdict {
    int P;  ///< open-loop RHP poles
    int N;  ///< clockwise encirclements of -1
    int Z;  ///< N + P = closed-loop RHP poles
    bool minimum_phase;  ///< P == 0
    bool stable;         ///< Z == 0
};

StabilityVerdict verdict(const OlModel& m, const NyquistReport& n);

/// Classical margins with a reliability flag: margins of a nonminimum-phase
/// open loop (P > 0) say nothing about closed-loop stability, so reliable is
/// false whenever P > 0.
struct MarginReport {
    double gain_margin_db;    ///< +infinity when no -180 deg crossing
    double phase_margin_deg;  ///< +infinity when no unity-gain crossing
    bool gm_finite;
    bool pm_finite;
    bool reliable;  ///< P == 0
};

MarginReport margins(const OlModel& m);

/// Roots of num + den of m.tf: the closed-loop poles under unity negative
/// feedback.
std::vector<std::complex<double>> closed_loop_poles(const OlModel& m);

/// Closed-loop state matrix of the reactive loop: the plant model augmented
/// with the law's controller state (droop q-filter or droop-I integrator),
/// holding the angle loop frozen.  Its eigenvalues provide an independent
/// cross-check of closed_loop_poles on the rational route.
Eigen::MatrixXd closed_loop_state_matrix(const LinearPlant& plant,
                                         const ControlParams& cp);

}  // namespace slgfm
