#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "slgfm/rational.hpp"

namespace slgfm {

/// Plain dense LTI state-space model dx/dt = Ax + Bu, y = Cx + Du.
struct StateSpaceModel {
    Eigen::MatrixXd A, B, C, D;

    /// Throws DimensionMismatch unless A is square and B, C, D agree with it.
    StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C,
                    Eigen::MatrixXd D);

    /// Convenience constructor with D = 0.
    StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C);

    int n_states() const { return static_cast<int>(A.rows()); }
    int n_inputs() const { return static_cast<int>(B.cols()); }
    int n_outputs() const { return static_cast<int>(C.rows()); }

    std::vector<std::complex<double>> eigenvalues() const;
};

/// Exact rational transfer matrix over the common denominator det(sI - A):
/// G_ij(s) = num[i][j](s) / den(s) + D_ij.
struct RationalMatrix {
    std::vector<std::vector<Polynomial>> num;
    Polynomial den;

    /// num[i][j]/den folded with the feedthrough term into one RationalFn.
    RationalFn entry(int out, int in, double feedthrough = 0.0) const;
};

/// C (sI - A)^-1 B as exact polynomials via the Faddeev-LeVerrier resolvent
/// recursion (characteristic polynomial and adjugate coefficient matrices in
/// one pass, no frequency sampling).  The recursion runs on A / w_ref with
/// w_ref = max(1, spectral radius estimate) so coefficient dynamic range stays
/// bounded at rad/s scales; results are unscaled exactly.
///
/// The D term is NOT folded into the numerators; use RationalMatrix::entry.
RationalMatrix ss_to_rational(const StateSpaceModel& m);

}  // namespace slgfm
