#include "slgfm/poly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "slgfm/errors.hpp"

namespace slgfm {

namespace {

bool conj_close(std::complex<double> a, std::complex<double> b, double rel) {
    const double scale = std::max({1.0, std::abs(a), std::abs(b)});
    return std::abs(std::conj(a) - b) <= rel * scale;
}

}  // namespace

Polynomial::Polynomial() : c_{0.0} {}

Polynomial::Polynomial(std::vector<double> ascending) : c_(std::move(ascending)) {
    if (c_.empty()) {
        throw std::invalid_argument("Polynomial: empty coefficient list");
    }
    for (double x : c_) {
        if (!std::isfinite(x)) {
            throw std::invalid_argument("Polynomial: non-finite coefficient");
        }
    }
    trim();
}

Polynomial::Polynomial(std::initializer_list<double> ascending)
    : Polynomial(std::vector<double>(ascending)) {}

Polynomial Polynomial::constant(double c) { return Polynomial{std::vector<double>{c}}; }

Polynomial Polynomial::s() { return Polynomial{0.0, 1.0}; }

Polynomial Polynomial::from_roots(std::span<const std::complex<double>> roots,
                                  double lead) {
    Polynomial p = constant(lead);
    std::vector<std::complex<double>> pending(roots.begin(), roots.end());
    while (!pending.empty()) {
        const std::complex<double> r = pending.back();
        pending.pop_back();
        const double im_tol = 1e-9 * (1.0 + std::abs(r));
        if (std::abs(r.imag()) <= im_tol) {
            p = p * Polynomial{-r.real(), 1.0};
            continue;
        }
        // Complex root: find and consume its conjugate partner.
        auto best = pending.end();
        double best_d = std::numeric_limits<double>::infinity();
        for (auto it = pending.begin(); it != pending.end(); ++it) {
            const double d = std::abs(std::conj(r) - *it);
            if (d < best_d) {
                best_d = d;
                best = it;
            }
        }
        if (best == pending.end() || !conj_close(r, *best, 1e-6)) {
            throw std::invalid_argument(
                "Polynomial::from_roots: complex root without conjugate partner");
        }
        const std::complex<double> z = 0.5 * (r + std::conj(*best));
        pending.erase(best);
        p = p * Polynomial{std::norm(z), -2.0 * z.real(), 1.0};
    }
    return p;
}

void Polynomial::trim() {
    while (c_.size() > 1 && c_.back() == 0.0) {
        c_.pop_back();
    }
}

bool Polynomial::is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }

double Polynomial::coeff(int k) const {
    if (k < 0) {
        throw std::invalid_argument("Polynomial::coeff: negative power");
    }
    return k < static_cast<int>(c_.size()) ? c_[k] : 0.0;
}

double Polynomial::max_coeff() const {
    double m = 0.0;
    for (double x : c_) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

double Polynomial::operator()(double s) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (degree() == 0) {
        return Polynomial();
    }
    std::vector<double> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) {
        d[k - 1] = static_cast<double>(k) * c_[k];
    }
    return Polynomial{std::move(d)};
}

Polynomial Polynomial::scaled_arg(double a) const {
    std::vector<double> out(c_);
    double ak = 1.0;
    for (std::size_t k = 1; k < out.size(); ++k) {
        ak *= a;
        out[k] *= ak;
    }
    return Polynomial{std::move(out)};
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& d) const {
    if (d.is_zero()) {
        throw std::invalid_argument("Polynomial::divmod: division by zero polynomial");
    }
    const int dn = d.degree();
    if (degree() < dn) {
        return {Polynomial(), *this};
    }
    std::vector<double> rem(c_);
    std::vector<double> quo(degree() - dn + 1, 0.0);
    const double lead = d.c_.back();
    for (int k = degree() - dn; k >= 0; --k) {
        const double f = rem[k + dn] / lead;
        quo[k] = f;
        for (int j = 0; j <= dn; ++j) {
            rem[k + j] -= f * d.c_[j];
        }
    }
    rem.resize(dn > 0 ? dn : 1);
    if (rem.empty()) {
        rem.push_back(0.0);
    }
    return {Polynomial{std::move(quo)}, Polynomial{std::move(rem)}};
}

Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> out(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = a.coeff(static_cast<int>(k)) + b.coeff(static_cast<int>(k));
    }
    return Polynomial{std::move(out)};
}

Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    std::vector<double> out(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = a.coeff(static_cast<int>(k)) - b.coeff(static_cast<int>(k));
    }
    return Polynomial{std::move(out)};
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) {
        return Polynomial();
    }
    std::vector<double> out(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
        for (std::size_t j = 0; j < b.c_.size(); ++j) {
            out[i + j] += a.c_[i] * b.c_[j];
        }
    }
    return Polynomial{std::move(out)};
}

Polynomial operator*(double k, const Polynomial& p) {
    std::vector<double> out(p.c_);
    for (double& x : out) {
        x *= k;
    }
    return Polynomial{std::move(out)};
}

Polynomial Polynomial::operator-() const { return -1.0 * *this; }

Polynomial poly_arith(const Polynomial& a, const Polynomial& b, PolyOp kind) {
    switch (kind) {
        case PolyOp::Add: return a + b;
        case PolyOp::Sub: return a - b;
        case PolyOp::Mul: return a * b;
    }
    throw std::invalid_argument("poly_arith: unknown operation");
}

namespace {

/// Coefficient-balancing frequency scale (Fujiwara-style root-magnitude
/// bound) so the companion matrix sees O(1) entries.
double root_scale(const std::vector<double>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    const double lead = std::abs(c.back());
    double w = 0.0;
    for (int k = 0; k < n; ++k) {
        if (c[k] != 0.0) {
            w = std::max(w, std::pow(std::abs(c[k]) / lead, 1.0 / (n - k)));
        }
    }
    return std::clamp(w, 1e-30, 1e30);
}

}  // namespace

std::vector<std::complex<double>> roots(const Polynomial& p, double tol) {
    if (p.degree() < 1) {
        throw std::invalid_argument("roots: degree must be at least 1");
    }

    // Exact roots at the origin first (zero low-order coefficients).
    std::vector<double> c = p.coeffs();
    std::vector<std::complex<double>> out;
    std::size_t shift = 0;
    while (shift + 1 < c.size() && c[shift] == 0.0) {
        out.emplace_back(0.0, 0.0);
        ++shift;
    }
    c.erase(c.begin(), c.begin() + static_cast<long>(shift));

    const int n = static_cast<int>(c.size()) - 1;
    if (n >= 1) {
        // Pre-scale s = w_ref * s~ and normalize to a monic scaled polynomial.
        const double w_ref = root_scale(c);
        std::vector<double> q(c);
        double wk = 1.0;
        for (int k = 0; k <= n; ++k) {
            q[k] *= wk;
            wk *= w_ref;
        }
        const double lead = q[n];
        for (double& x : q) {
            x /= lead;
        }
        double qmax = 0.0;
        for (double x : q) {
            qmax = std::max(qmax, std::abs(x));
        }

        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
        for (int i = 1; i < n; ++i) {
            comp(i, i - 1) = 1.0;
        }
        for (int i = 0; i < n; ++i) {
            comp(i, n - 1) = -q[i];
        }
        Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
        if (es.info() != Eigen::Success) {
            throw NonConvergence("roots: companion eigenvalue iteration failed", {},
                                 {});
        }

        const Polynomial qs{std::vector<double>(q)};
        const Polynomial dqs = qs.derivative();
        std::vector<std::complex<double>> scaled(n);
        std::vector<double> resid(n);
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            std::complex<double> r = es.eigenvalues()(i);
            double best = std::abs(qs(r));
            // Newton polishing; keep the best iterate seen.
            std::complex<double> best_r = r;
            for (int it = 0; it < 50 && best > 0.0; ++it) {
                const std::complex<double> dp = dqs(r);
                if (std::abs(dp) == 0.0) {
                    break;
                }
                r -= qs(r) / dp;
                const double res = std::abs(qs(r));
                if (res < best) {
                    best = res;
                    best_r = r;
                } else {
                    break;
                }
            }
            scaled[i] = best_r;
            resid[i] = best;
            // Residual target is relative to the coefficient norm; roots of
            // the scaled polynomial are O(1) so no further scaling is needed.
            if (best > tol * qmax) {
                ok = false;
            }
        }
        if (!ok) {
            std::vector<std::complex<double>> partial(out);
            for (auto& r : scaled) {
                partial.push_back(w_ref * r);
            }
            throw NonConvergence("roots: Newton polishing stalled above tolerance",
                                 std::move(partial), std::move(resid));
        }

        // Enforce exact conjugate pairing.
        const double im_rel = 1e-8;
        std::vector<bool> used(n, false);
        for (int i = 0; i < n; ++i) {
            if (used[i]) {
                continue;
            }
            std::complex<double>& r = scaled[i];
            if (std::abs(r.imag()) <= im_rel * (1.0 + std::abs(r))) {
                r = {r.real(), 0.0};
                used[i] = true;
                continue;
            }
            int partner = -1;
            double best_d = std::numeric_limits<double>::infinity();
            for (int j = i + 1; j < n; ++j) {
                if (used[j]) {
                    continue;
                }
                const double d = std::abs(std::conj(r) - scaled[j]);
                if (d < best_d) {
                    best_d = d;
                    partner = j;
                }
            }
            if (partner >= 0 && conj_close(r, scaled[partner], 1e-6)) {
                const std::complex<double> z = 0.5 * (r + std::conj(scaled[partner]));
                scaled[i] = z;
                scaled[partner] = std::conj(z);
                used[i] = used[partner] = true;
            } else {
                used[i] = true;  // leave as-is (pathological cluster)
            }
        }

        for (const auto& r : scaled) {
            out.push_back(w_ref * r);
        }
    }

    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) {
            return a.real() < b.real();
        }
        return a.imag() < b.imag();
    });
    return out;
}

}  // namespace slgfm
