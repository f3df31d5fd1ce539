#pragma once

#include <complex>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace slgfm {

/// Real-coefficient polynomial with coefficients stored in ascending degree:
/// coeffs()[k] multiplies s^k.  Trailing (highest-degree) zeros are trimmed on
/// construction, so degree() is exact; the zero polynomial is kept as the
/// single coefficient 0.  Values are immutable after construction and safe to
/// share between threads.
class Polynomial {
public:
    /// Degree-0 zero polynomial.
    Polynomial();

    /// From ascending coefficients.  Throws std::invalid_argument when empty.
    explicit Polynomial(std::vector<double> ascending);
    Polynomial(std::initializer_list<double> ascending);

    /// Constant polynomial.
    static Polynomial constant(double c);

    /// The monomial s.
    static Polynomial s();

    /// Builds lead * prod (s - r_k) with real coefficients.  Roots with
    /// nonzero imaginary part must come in conjugate pairs (checked to a
    /// relative tolerance); each pair is expanded as a real quadratic.
    static Polynomial from_roots(std::span<const std::complex<double>> roots,
                                 double lead = 1.0);

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const;

    /// Coefficient of s^k; zero for k beyond the degree.
    double coeff(int k) const;
    const std::vector<double>& coeffs() const { return c_; }

    /// Largest |coefficient| (used for relative tolerances).
    double max_coeff() const;

    /// Horner evaluation.
    std::complex<double> operator()(std::complex<double> s) const;
    double operator()(double s) const;

    Polynomial derivative() const;

    /// p(a*s): substitutes a scaled argument (frequency pre-scaling).
    Polynomial scaled_arg(double a) const;

    /// Quotient and remainder of *this / d.  Throws std::invalid_argument when
    /// d is zero.
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const;

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
    friend Polynomial operator*(double k, const Polynomial& p);
    Polynomial operator-() const;

private:
    std::vector<double> c_;

    void trim();
};

/// Flavors of poly_arith kept as a single entry point for callers that select
/// the operation at run time (the CLI sweep machinery does).
enum class PolyOp { Add, Sub, Mul };
Polynomial poly_arith(const Polynomial& a, const Polynomial& b, PolyOp kind);

/// All roots of p, |p(r)| polished by Newton iteration.
///
/// Companion-matrix eigenvalues seed the roots; each is then Newton-polished
/// until the residual stops improving.  Coefficients are pre-scaled with
/// s = w_ref * s~ (w_ref from the coefficient magnitudes) so the companion
/// matrix stays well conditioned for rad/s-sized roots.  Complex roots are
/// returned in exact conjugate pairs; multiple roots appear by multiplicity.
/// Results are sorted by (Re, Im).
///
/// tol is relative to the largest coefficient magnitude.  Throws
/// NonConvergence (with the partial set and residuals) when polishing cannot
/// reach tol * max_coeff within the iteration cap, and std::invalid_argument
/// for degree < 1.
std::vector<std::complex<double>> roots(const Polynomial& p, double tol = 1e-9);

}  // namespace slgfm
