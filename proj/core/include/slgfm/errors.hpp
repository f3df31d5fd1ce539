#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace slgfm {

/// Base class for runtime numerical failures (iteration caps, contour
/// violations, ...).  CLI maps these to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Root finding exceeded its iteration cap.  Carries the roots found so far
/// and their polynomial residuals so callers can inspect the partial result.
class NonConvergence : public NumericalError {
public:
    NonConvergence(const std::string& what,
                   std::vector<std::complex<double>> partial,
                   std::vector<double> residuals)
        : NumericalError(what),
          partial_roots(std::move(partial)),
          residuals(std::move(residuals)) {}

    std::vector<std::complex<double>> partial_roots;
    std::vector<double> residuals;
};

/// Rational-function evaluation requested at (or numerically on top of) a pole.
class PoleHit : public NumericalError {
public:
    PoleHit(const std::string& what, std::complex<double> at)
        : NumericalError(what), location(at) {}

    std::complex<double> location;
};

/// An open-loop pole lies on (or within tolerance of) the Nyquist contour.
/// Contour indentation is not implemented; add series resistance instead.
class PoleOnContour : public NumericalError {
public:
    PoleOnContour(const std::string& what, std::complex<double> pole)
        : NumericalError(what), pole(pole) {}

    std::complex<double> pole;
};

/// Explicit pole/zero cancellation could not pair the requested roots
/// within tol_match.
class CancellationFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Newton iteration for the operating point diverged, or the solution is
/// outside the feasible region (|delta0| > pi/2).
class InfeasibleSetpoint : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Operating-point Newton solve stopped above the residual target.  Carries
/// the best residual reached.
class NoConvergence : public NumericalError {
public:
    NoConvergence(const std::string& what, double residual)
        : NumericalError(what), residual(residual) {}

    double residual;
};

/// Simulation was asked to start from an operating point whose equilibrium
/// residual is too large for a flat start.
class InitialResidualTooLarge : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Matrix dimensions disagree.  CLI maps std::invalid_argument (and derived)
/// to exit code 2.
class DimensionMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A per-unit base quantity would be zero or negative.
class NonPositiveBase : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Scenario description violates a structural rule (unsorted events, unknown
/// event target, step size too coarse, ...).
class InvalidScenario : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// FFT window holds too few samples for a meaningful spectrum.
class WindowTooShort : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace slgfm
