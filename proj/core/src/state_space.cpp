#include "slgfm/state_space.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "slgfm/errors.hpp"

namespace slgfm {

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B,
                                 Eigen::MatrixXd C, Eigen::MatrixXd D)
    : A(std::move(A)), B(std::move(B)), C(std::move(C)), D(std::move(D)) {
    if (this->A.rows() != this->A.cols()) {
        throw DimensionMismatch("StateSpaceModel: A must be square");
    }
    if (this->B.rows() != this->A.rows()) {
        throw DimensionMismatch("StateSpaceModel: B row count must match A");
    }
    if (this->C.cols() != this->A.cols()) {
        throw DimensionMismatch("StateSpaceModel: C column count must match A");
    }
    if (this->D.rows() != this->C.rows() || this->D.cols() != this->B.cols()) {
        throw DimensionMismatch("StateSpaceModel: D must be n_outputs x n_inputs");
    }
}

StateSpaceModel::StateSpaceModel(Eigen::MatrixXd A, Eigen::MatrixXd B,
                                 Eigen::MatrixXd C)
    : StateSpaceModel(A, B, C,
                      Eigen::MatrixXd::Zero(C.rows(), B.cols())) {}

std::vector<std::complex<double>> StateSpaceModel::eigenvalues() const {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        throw NonConvergence("StateSpaceModel::eigenvalues: QR iteration failed",
                             {}, {});
    }
    std::vector<std::complex<double>> out(A.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        out[i] = es.eigenvalues()(i);
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) {
            return a.real() < b.real();
        }
        return a.imag() < b.imag();
    });
    return out;
}

RationalFn RationalMatrix::entry(int out, int in, double feedthrough) const {
    if (out < 0 || out >= static_cast<int>(num.size()) || in < 0 ||
        in >= static_cast<int>(num[out].size())) {
        throw DimensionMismatch("RationalMatrix::entry: index out of range");
    }
    if (feedthrough == 0.0) {
        return RationalFn(num[out][in], den);
    }
    return RationalFn(num[out][in] + feedthrough * den, den);
}

RationalMatrix ss_to_rational(const StateSpaceModel& m) {
    const int n = static_cast<int>(m.n_states());
    const int ni = static_cast<int>(m.n_inputs());
    const int no = static_cast<int>(m.n_outputs());

    // Scale A so the Faddeev-LeVerrier recursion works with O(1) eigenvalues;
    // the raw system spans ~1e4 rad/s and would overflow the s^n coefficients.
    double rho = 0.0;
    for (const auto& ev : m.eigenvalues()) {
        rho = std::max(rho, std::abs(ev));
    }
    const double w_ref = std::max(1.0, rho);
    const Eigen::MatrixXd As = m.A / w_ref;

    // Faddeev-LeVerrier: char poly coefficients c_k and adjugate terms M_k with
    // adj(sI - As) = sum_k M_k s^(n-1-k).
    std::vector<double> c(n + 1);
    c[0] = 1.0;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    std::vector<Eigen::MatrixXd> CMB;  // C * M_k * B for k = 0..n-1
    CMB.reserve(n);
    CMB.push_back(m.C * M * m.B);
    for (int k = 1; k <= n; ++k) {
        const Eigen::MatrixXd AM = As * M;
        c[k] = -AM.trace() / k;
        M = AM + c[k] * Eigen::MatrixXd::Identity(n, n);
        if (k < n) {
            CMB.push_back(m.C * M * m.B);
        }
    }

    // Undo the scaling: multiply the coefficient of s^(n-k) by w_ref^k.
    RationalMatrix out;
    std::vector<double> den(n + 1);
    double wk = 1.0;
    for (int k = 0; k <= n; ++k) {
        den[n - k] = c[k] * wk;  // ascending storage: power n-k at index n-k
        wk *= w_ref;
    }
    out.den = Polynomial{std::move(den)};

    out.num.resize(no);
    for (int i = 0; i < no; ++i) {
        out.num[i].reserve(ni);
        for (int j = 0; j < ni; ++j) {
            std::vector<double> numc(n, 0.0);
            wk = 1.0;
            for (int k = 0; k < n; ++k) {
                if (n - 1 - k >= 0) {
                    numc[n - 1 - k] = CMB[k](i, j) * wk;
                }
                wk *= w_ref;
            }
            out.num[i].emplace_back(std::move(numc));
        }
    }
    return out;
}

}  // namespace slgfm
