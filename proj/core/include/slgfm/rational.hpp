#pragma once

#include <complex>
#include <vector>

#include "slgfm/poly.hpp"

namespace slgfm {

/// A (zero, pole) pair removed by an explicit cancellation.
struct CancelledPair {
    std::complex<double> zero;
    std::complex<double> pole;
};

/// Ratio of two real polynomials.  Common factors are NEVER removed
/// implicitly: which poles cancel against which zeros is part of the analysis
/// here, so cancellation is a separate, recorded operation (see cancel()).
class RationalFn {
public:
    /// Throws std::invalid_argument when den is identically zero.
    RationalFn(Polynomial num, Polynomial den);

    static RationalFn constant(double c);

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }

    /// num(s)/den(s).  Throws PoleHit when |den(s)| falls below 1e-12 times
    /// the largest denominator term magnitude max_k |c_k| |s|^k, i.e. s sits
    /// numerically on a pole.
    std::complex<double> operator()(std::complex<double> s) const;

    /// Degree of den minus degree of num (> 0 for strictly proper functions).
    int relative_degree() const;

    std::vector<std::complex<double>> poles(double tol = 1e-9) const;
    std::vector<std::complex<double>> zeros(double tol = 1e-9) const;

    friend RationalFn operator+(const RationalFn& a, const RationalFn& b);
    friend RationalFn operator-(const RationalFn& a, const RationalFn& b);
    friend RationalFn operator*(const RationalFn& a, const RationalFn& b);
    friend RationalFn operator*(double k, const RationalFn& r);
    friend RationalFn operator+(const RationalFn& a, double c);

private:
    Polynomial num_;
    Polynomial den_;
};

/// Result of an explicit pole/zero cancellation.
struct CancelResult {
    RationalFn reduced;
    std::vector<CancelledPair> pairs;
};

/// Removes num/den root pairs lying within relative distance tol_match of
/// each other and records every removed pair.  The reduced function is
/// rebuilt from the surviving roots (leading coefficients preserved), so the
/// operation is exact up to root-finding accuracy.
///
/// When expected_pairs >= 0, throws CancellationFailure unless exactly that
/// many pairs matched.
CancelResult cancel(const RationalFn& r, double tol_match = 1e-6,
                    int expected_pairs = -1);

}  // namespace slgfm
