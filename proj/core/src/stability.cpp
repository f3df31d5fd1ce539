#include "slgfm/stability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "slgfm/errors.hpp"

namespace slgfm {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> conv(const std::vector<double>& a,
                         const std::vector<double>& b) {
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            out[i + j] += a[i] * b[j];
        }
    }
    return out;
}

std::vector<double> vsub(const std::vector<double>& a,
                         const std::vector<double>& b) {
    std::vector<double> out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (i < a.size() ? a[i] : 0.0) - (i < b.size() ? b[i] : 0.0);
    }
    return out;
}

bool all_zero(const std::vector<double>& v) {
    for (double x : v) {
        if (x != 0.0) {
            return false;
        }
    }
    return true;
}

int low_order(const std::vector<double>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) {
            return static_cast<int>(i);
        }
    }
    return -1;  // identically zero
}

std::string eps_poly_str(const std::vector<double>& v) {
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] == 0.0 && !(v.size() == 1 && i == 0)) {
            continue;
        }
        if (!first) {
            os << (v[i] < 0 ? " - " : " + ");
            os << std::abs(v[i]);
        } else {
            os << v[i];
            first = false;
        }
        if (i == 1) {
            os << "*eps";
        } else if (i > 1) {
            os << "*eps^" << i;
        }
    }
    return os.str();
}

}  // namespace

EpsRational EpsRational::constant(double c) { return EpsRational{{c}, {1.0}}; }

EpsRational EpsRational::epsilon() { return EpsRational{{0.0, 1.0}, {1.0}}; }

namespace {

EpsRational normalized(std::vector<double> num, std::vector<double> den) {
    // Coefficients this far below the largest one in the same polynomial are
    // round-off residue of an algebraically exact cancellation.  The lowest
    // eps order decides the eps->0+ sign, so residue that survives here would
    // replace a finite (or -inf) limit with a garbage-signed one.  Genuine
    // coefficient spreads inside one table entry stay many orders above this.
    constexpr double kSnapRel = 1e-9;
    const auto snap = [](std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) {
            m = std::max(m, std::abs(x));
        }
        for (double& x : v) {
            if (std::abs(x) <= kSnapRel * m) {
                x = 0.0;
            }
        }
    };
    snap(num);
    snap(den);
    // Trim high-order exact zeros.
    while (num.size() > 1 && num.back() == 0.0) {
        num.pop_back();
    }
    while (den.size() > 1 && den.back() == 0.0) {
        den.pop_back();
    }
    if (all_zero(den)) {
        throw std::invalid_argument("EpsRational: zero denominator");
    }
    if (all_zero(num)) {
        return EpsRational{{0.0}, {1.0}};
    }
    // Strip common powers of eps.
    while (num.size() > 1 && den.size() > 1 && num[0] == 0.0 && den[0] == 0.0) {
        num.erase(num.begin());
        den.erase(den.begin());
    }
    // Canonical sign: lowest nonzero denominator coefficient positive.
    if (den[low_order(den)] < 0.0) {
        for (double& x : num) {
            x = -x;
        }
        for (double& x : den) {
            x = -x;
        }
    }
    // Plain numbers collapse to value/1.
    if (num.size() == 1 && den.size() == 1 && den[0] != 1.0) {
        num[0] /= den[0];
        den[0] = 1.0;
    }
    return EpsRational{std::move(num), std::move(den)};
}

}  // namespace

bool EpsRational::is_constant() const {
    return num.size() == 1 && den.size() == 1;
}

double EpsRational::constant_value() const { return num[0] / den[0]; }

int EpsRational::limit_order() const {
    const int no = low_order(num);
    if (no < 0) {
        return std::numeric_limits<int>::max() / 2;
    }
    return no - low_order(den);
}

int EpsRational::sign_limit() const {
    const int no = low_order(num);
    if (no < 0) {
        return 0;
    }
    const double r = num[no] * den[low_order(den)];
    return r > 0.0 ? 1 : -1;
}

double EpsRational::limit_value() const {
    const int lo = limit_order();
    if (lo > 0) {
        return 0.0;
    }
    if (lo == 0) {
        return num[low_order(num)] / den[low_order(den)];
    }
    return sign_limit() > 0 ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
}

std::string EpsRational::describe() const {
    if (is_constant()) {
        std::ostringstream os;
        os.precision(6);
        os << constant_value();
        return os.str();
    }
    std::ostringstream os;
    os << "(" << eps_poly_str(num) << ")/(" << eps_poly_str(den)
       << ") -> lim ";
    const int lo = limit_order();
    if (lo < 0) {
        os << (sign_limit() > 0 ? "+inf" : "-inf");
    } else {
        os.precision(6);
        os << limit_value();
    }
    return os.str();
}

EpsRational EpsRational::operator*(const EpsRational& o) const {
    return normalized(conv(num, o.num), conv(den, o.den));
}

EpsRational EpsRational::operator-(const EpsRational& o) const {
    return normalized(vsub(conv(num, o.den), conv(o.num, den)),
                      conv(den, o.den));
}

EpsRational EpsRational::operator/(const EpsRational& o) const {
    if (all_zero(o.num)) {
        throw std::invalid_argument("EpsRational: division by zero entry");
    }
    return normalized(conv(num, o.den), conv(den, o.num));
}

RouthReport routh(const Polynomial& p) {
    const int n = p.degree();
    if (n < 1) {
        throw std::invalid_argument("routh: degree must be at least 1");
    }
    const int width = (n + 2) / 2;
    const EpsRational zero = EpsRational::constant(0.0);

    RouthReport rep{{}, 0, 0, false, false, false};
    std::vector<std::vector<EpsRational>> rows;
    rows.reserve(n + 1);

    auto coeff_row = [&](int top_power) {
        std::vector<EpsRational> row(width, zero);
        for (int j = 0; j < width; ++j) {
            const int k = top_power - 2 * j;
            if (k >= 0) {
                row[j] = EpsRational::constant(p.coeff(k));
            }
        }
        return row;
    };
    rows.push_back(coeff_row(n));

    auto row_is_zero = [](const std::vector<EpsRational>& row) {
        for (const auto& e : row) {
            if (e.sign_limit() != 0) {
                return false;
            }
        }
        return true;
    };

    for (int i = 1; i <= n; ++i) {
        std::vector<EpsRational> row(width, zero);
        if (i == 1) {
            row = coeff_row(n - 1);
        } else {
            const auto& prev1 = rows[i - 1];
            const auto& prev2 = rows[i - 2];
            for (int j = 0; j + 1 < width; ++j) {
                // b_j = (prev1[0]*prev2[j+1] - prev2[0]*prev1[j+1]) / prev1[0]
                row[j] = (prev1[0] * prev2[j + 1] - prev2[0] * prev1[j + 1]) /
                         prev1[0];
            }
        }

        if (row_is_zero(row)) {
            // Zero row: substitute the derivative of the auxiliary polynomial
            // formed from the row above (power n-(i-1), stepping by 2).
            rep.used_aux_row = true;
            const int aux_power = n - (i - 1);
            if (aux_power < 1) {
                rep.inconclusive = true;
                break;
            }
            for (int j = 0; j < width; ++j) {
                const int k = aux_power - 2 * j;
                row[j] = (k >= 1)
                             ? EpsRational::constant(static_cast<double>(k)) *
                                   rows[i - 1][j]
                             : zero;
            }
            if (row_is_zero(row)) {
                rep.inconclusive = true;
                break;
            }
        }
        if (row[0].sign_limit() == 0) {
            // Exactly-zero pivot with nonzero entries to its right.
            row[0] = EpsRational::epsilon();
            rep.used_epsilon = true;
        }
        rows.push_back(std::move(row));
    }

    int prev_sign = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        RouthEntry e{rows[i][0], rows[i][0].sign_limit(),
                     n - static_cast<int>(i)};
        if (e.sign == 0) {
            rep.inconclusive = true;
        } else {
            if (prev_sign != 0 && e.sign != prev_sign) {
                ++rep.sign_changes;
            }
            prev_sign = e.sign;
        }
        rep.first_column.push_back(std::move(e));
    }
    rep.rhp_count = rep.sign_changes;
    return rep;
}

namespace {

/// Positive-frequency sweep shared by nyquist() and margins().  Starts from a
/// logarithmic grid and splits any segment whose endpoints differ by more
/// than the refinement bound, walking toward resonance peaks.
std::vector<std::pair<double, std::complex<double>>> sample_positive(
    const RationalFn& tf, double omega_min, double omega_max, int pts,
    bool include_zero) {
    if (!(omega_min > 0.0) || !(omega_max > omega_min) || pts < 2) {
        throw std::invalid_argument(
            "frequency sweep: need 0 < omega_min < omega_max and pts >= 2");
    }
    constexpr std::size_t kMaxSamples = 200000;
    constexpr int kMaxDepth = 40;

    std::vector<std::pair<double, std::complex<double>>> out;
    auto eval = [&](double w) { return tf(std::complex<double>(0.0, w)); };
    auto close_enough = [](const std::complex<double>& a,
                           const std::complex<double>& b) {
        return std::abs(b - a) <=
               0.05 * (1.0 + std::min(std::abs(a), std::abs(b)));
    };

    const std::function<void(double, std::complex<double>, double,
                             std::complex<double>, int)>
        refine = [&](double wa, std::complex<double> Ga, double wb,
                     std::complex<double> Gb, int depth) {
            if (depth >= kMaxDepth || out.size() >= kMaxSamples ||
                close_enough(Ga, Gb)) {
                out.emplace_back(wb, Gb);
                return;
            }
            const double wm = (wa > 0.0) ? std::sqrt(wa * wb) : 0.5 * (wa + wb);
            const std::complex<double> Gm = eval(wm);
            refine(wa, Ga, wm, Gm, depth + 1);
            refine(wm, Gm, wb, Gb, depth + 1);
        };

    double w0 = include_zero ? 0.0 : omega_min;
    std::complex<double> G0 = tf(std::complex<double>(0.0, w0));
    out.emplace_back(w0, G0);
    const double ratio = omega_max / omega_min;
    double wa = w0;
    std::complex<double> Ga = G0;
    const int start = include_zero ? 0 : 1;
    for (int i = start; i < pts; ++i) {
        const double wb =
            omega_min * std::pow(ratio, static_cast<double>(i) / (pts - 1));
        const std::complex<double> Gb = eval(wb);
        refine(wa, Ga, wb, Gb, 0);
        wa = wb;
        Ga = Gb;
    }
    return out;
}

double wrap_angle(double a) {
    while (a > kPi) {
        a -= 2.0 * kPi;
    }
    while (a <= -kPi) {
        a += 2.0 * kPi;
    }
    return a;
}

}  // namespace

NyquistReport nyquist(const OlModel& m, double omega_min, double omega_max,
                      int pts) {
    for (const auto& p : m.ol_poles) {
        if (std::abs(p.real()) <= 1e-6 * std::max(1.0, std::abs(p))) {
            throw PoleOnContour(
                "nyquist: open-loop pole on the imaginary axis; add series "
                "resistance (R_g > 0); contour indentation is not implemented",
                p);
        }
    }

    const auto pos =
        sample_positive(m.tf, omega_min, omega_max, pts, /*include_zero=*/true);

    NyquistReport rep;
    rep.samples.reserve(2 * pos.size() - 1);
    for (std::size_t i = pos.size(); i-- > 1;) {
        rep.samples.emplace_back(-pos[i].first, std::conj(pos[i].second));
    }
    rep.samples.insert(rep.samples.end(), pos.begin(), pos.end());

    // Accumulated argument of G + 1 along the ascending-omega contour; the
    // closure through |s| -> infinity adds only the wrap between endpoints
    // (G there is at its smallest for strictly proper loops).
    double total = 0.0;
    double min_dist = std::numeric_limits<double>::infinity();
    double prev_arg = std::arg(rep.samples.front().second + 1.0);
    for (const auto& [w, G] : rep.samples) {
        const double a = std::arg(G + 1.0);
        total += wrap_angle(a - prev_arg);
        prev_arg = a;
        min_dist = std::min(min_dist, std::abs(G + 1.0));
    }
    total += wrap_angle(std::arg(rep.samples.front().second + 1.0) - prev_arg);

    // Counterclockwise net angle, negated: clockwise encirclements positive.
    rep.winding_number = -static_cast<int>(std::llround(total / (2.0 * kPi)));
    rep.closest_approach = min_dist;
    return rep;
}

StabilityVerdict verdict(const OlModel& m, const NyquistReport& n) {
    StabilityVerdict v;
    v.P = m.p_count;
    v.N = n.winding_number;
    v.Z = v.N + v.P;
    v.minimum_phase = (v.P == 0);
    v.stable = (v.Z == 0);
    return v;
}

MarginReport margins(const OlModel& m) {
    // Frequency range from the pole spread: wide enough to cover controller
    // poles and the resonances.
    double p_min = std::numeric_limits<double>::infinity();
    double p_max = 1.0;
    for (const auto& p : m.ol_poles) {
        const double mag = std::abs(p);
        if (mag > 1e-9) {
            p_min = std::min(p_min, mag);
        }
        p_max = std::max(p_max, mag);
    }
    if (!std::isfinite(p_min)) {
        p_min = 1.0;
    }
    const double lo = 1e-3 * std::min(1.0, p_min);
    const double hi = 1e2 * p_max;
    const auto sweep =
        sample_positive(m.tf, lo, hi, 1200, /*include_zero=*/false);

    // Unwrapped phase and log magnitude along the sweep.
    const std::size_t ns = sweep.size();
    std::vector<double> phase(ns), logmag(ns);
    double prev = std::arg(sweep[0].second);
    phase[0] = prev;
    for (std::size_t i = 0; i < ns; ++i) {
        const double a = std::arg(sweep[i].second);
        if (i > 0) {
            phase[i] = phase[i - 1] + wrap_angle(a - prev);
        }
        prev = a;
        const double mag = std::abs(sweep[i].second);
        logmag[i] = (mag > 0.0) ? std::log(mag)
                                : -std::numeric_limits<double>::infinity();
    }

    MarginReport rep;
    rep.gain_margin_db = std::numeric_limits<double>::infinity();
    rep.phase_margin_deg = std::numeric_limits<double>::infinity();
    rep.gm_finite = false;
    rep.pm_finite = false;
    rep.reliable = (m.p_count == 0);

    // Gain margin: phase crossings of -180 deg modulo 360.
    for (std::size_t i = 0; i + 1 < ns; ++i) {
        const double a = phase[i], b = phase[i + 1];
        const double fmin = std::min(a, b), fmax = std::max(a, b);
        const int k_lo = static_cast<int>(std::ceil((fmin + kPi) / (2.0 * kPi)));
        const int k_hi = static_cast<int>(std::floor((fmax + kPi) / (2.0 * kPi)));
        for (int k = k_lo; k <= k_hi; ++k) {
            const double level = -kPi + 2.0 * kPi * k;
            if (level <= fmin || level > fmax || a == b) {
                continue;
            }
            const double t = (level - a) / (b - a);
            const double lm = logmag[i] + t * (logmag[i + 1] - logmag[i]);
            const double gm_db = -20.0 * lm / std::log(10.0);
            if (!rep.gm_finite || gm_db < rep.gain_margin_db) {
                rep.gain_margin_db = gm_db;
            }
            rep.gm_finite = true;
        }
    }

    // Phase margin: |G| = 1 crossings.
    for (std::size_t i = 0; i + 1 < ns; ++i) {
        const double a = logmag[i], b = logmag[i + 1];
        if (!((a <= 0.0 && b > 0.0) || (a > 0.0 && b <= 0.0)) || a == b) {
            continue;
        }
        const double t = -a / (b - a);
        double phi = phase[i] + t * (phase[i + 1] - phase[i]);
        // Principal value in (-2*pi, 0] for the classical PM definition.
        phi = std::fmod(phi, 2.0 * kPi);
        if (phi > 0.0) {
            phi -= 2.0 * kPi;
        }
        const double pm_deg = 180.0 + phi * 180.0 / kPi;
        if (!rep.pm_finite || pm_deg < rep.phase_margin_deg) {
            rep.phase_margin_deg = pm_deg;
        }
        rep.pm_finite = true;
    }
    return rep;
}

std::vector<std::complex<double>> closed_loop_poles(const OlModel& m) {
    return roots(m.tf.num() + m.tf.den());
}

Eigen::MatrixXd closed_loop_state_matrix(const LinearPlant& plant,
                                         const ControlParams& cp) {
    cp.validate();
    const int n = plant.ss.n_states();
    const double cd = std::cos(plant.op.delta0);
    const double sd = std::sin(plant.op.delta0);
    const Eigen::VectorXd Bv =
        plant.ss.B.col(0) * cd + plant.ss.B.col(1) * sd;
    const Eigen::RowVectorXd Cq = plant.ss.C.row(1);
    const Eigen::RowVectorXd Cv = plant.ss.C.row(2);

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
    if (cp.law == ControlLaw::Droop) {
        // Controller state: the q measurement filter; dE = -dq_f / D_q.
        A.topLeftCorner(n, n) = plant.ss.A;
        A.topRightCorner(n, 1) = -Bv / cp.D_q;
        A.bottomLeftCorner(1, n) = Cq / cp.T_q;
        A(n, n) = -1.0 / cp.T_q;
    } else {
        // Controller state: the integrator on u = D_q(V_st - V) + Q_st - q.
        const Eigen::RowVectorXd Cu = -(cp.D_q * Cv + Cq);
        A.topLeftCorner(n, n) = plant.ss.A + Bv * (cp.k_pq * Cu);
        A.topRightCorner(n, 1) = Bv;
        A.bottomLeftCorner(1, n) = cp.k_iq * Cu;
    }
    return A;
}

}  // namespace slgfm
