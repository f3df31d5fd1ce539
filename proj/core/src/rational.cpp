#include "slgfm/rational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "slgfm/errors.hpp"

namespace slgfm {

RationalFn::RationalFn(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
    if (den_.is_zero()) {
        throw std::invalid_argument("RationalFn: zero denominator");
    }
}

RationalFn RationalFn::constant(double c) {
    return RationalFn(Polynomial::constant(c), Polynomial::constant(1.0));
}

std::complex<double> RationalFn::operator()(std::complex<double> s) const {
    const std::complex<double> d = den_(s);
    // Scale reference: the largest single term |c_k||s|^k.  Far from a pole
    // the sum is within a modest factor of it; many orders of magnitude of
    // cancellation means s sits numerically on a root.
    const double mag = std::abs(s);
    double dom = 0.0;
    double sk = 1.0;
    for (double c : den_.coeffs()) {
        dom = std::max(dom, std::abs(c) * sk);
        sk *= mag;
    }
    if (std::abs(d) <= 1e-12 * dom) {
        throw PoleHit("RationalFn: evaluation at (or numerically on) a pole", s);
    }
    return num_(s) / d;
}

int RationalFn::relative_degree() const { return den_.degree() - num_.degree(); }

std::vector<std::complex<double>> RationalFn::poles(double tol) const {
    return roots(den_, tol);
}

std::vector<std::complex<double>> RationalFn::zeros(double tol) const {
    if (num_.degree() < 1) {
        return {};
    }
    return roots(num_, tol);
}

RationalFn operator+(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFn operator-(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
}

RationalFn operator*(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFn operator*(double k, const RationalFn& r) {
    return RationalFn(k * r.num_, r.den_);
}

RationalFn operator+(const RationalFn& r, double c) {
    return RationalFn(r.num_ + c * r.den_, r.den_);
}

namespace {

double rel_dist(std::complex<double> z, std::complex<double> p) {
    return std::abs(z - p) / std::max({1.0, std::abs(z), std::abs(p)});
}

}  // namespace

CancelResult cancel(const RationalFn& r, double tol_match, int expected_pairs) {
    CancelResult result{r, {}};
    if (r.num().is_zero()) {
        if (expected_pairs > 0) {
            throw CancellationFailure(
                "cancel: zero numerator cannot supply expected pole/zero pairs");
        }
        return result;
    }

    std::vector<std::complex<double>> zs = r.zeros();
    std::vector<std::complex<double>> ps = r.poles();

    // Greedy globally-nearest matching; stop once the best remaining pair is
    // farther apart than tol_match in relative distance.
    std::vector<bool> z_used(zs.size(), false), p_used(ps.size(), false);
    while (true) {
        int bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < zs.size(); ++i) {
            if (z_used[i]) {
                continue;
            }
            for (std::size_t j = 0; j < ps.size(); ++j) {
                if (p_used[j]) {
                    continue;
                }
                const double d = rel_dist(zs[i], ps[j]);
                if (d < best) {
                    best = d;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        }
        if (bi < 0 || best > tol_match) {
            break;
        }
        z_used[bi] = true;
        p_used[bj] = true;
        result.pairs.push_back({zs[bi], ps[bj]});
    }

    if (expected_pairs >= 0 &&
        static_cast<int>(result.pairs.size()) != expected_pairs) {
        throw CancellationFailure("cancel: matched " +
                                  std::to_string(result.pairs.size()) +
                                  " pole/zero pairs, expected " +
                                  std::to_string(expected_pairs));
    }
    if (result.pairs.empty()) {
        return result;
    }

    // Rebuild the reduced function from the surviving roots, preserving the
    // leading-coefficient ratio of the original.
    std::vector<std::complex<double>> z_left, p_left;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (!z_used[i]) {
            z_left.push_back(zs[i]);
        }
    }
    for (std::size_t j = 0; j < ps.size(); ++j) {
        if (!p_used[j]) {
            p_left.push_back(ps[j]);
        }
    }
    const double lead_num = r.num().coeff(r.num().degree());
    const double lead_den = r.den().coeff(r.den().degree());
    result.reduced = RationalFn(Polynomial::from_roots(z_left, lead_num),
                                Polynomial::from_roots(p_left, lead_den));
    return result;
}

}  // namespace slgfm
