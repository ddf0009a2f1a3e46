#include "liftrom/spd.hpp"

#include <cmath>

#include "liftrom/error.hpp"

namespace liftrom {

namespace {

void check_symmetric(const Eigen::MatrixXd& m, const char* what) {
    if (m.rows() != m.cols()) throw Error(std::string(what) + ": matrix not square");
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw Error(std::string(what) + ": matrix not symmetric");
}

// B0^{+-1/2} with an eigenvalue floor of 1e-14 * lambda_max against roundoff
void sqrt_pair(const Eigen::MatrixXd& B0, Eigen::MatrixXd& half, Eigen::MatrixXd& inv_half) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(B0);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    double lmax = lam(lam.size() - 1);
    if (!(lam(0) > 0.0))
        throw Error("spd map: anchor not positive definite (min eigenvalue " +
                    std::to_string(lam(0)) + ")");
    const double floor = 1e-14 * lmax;
    Eigen::VectorXd s(lam.size()), si(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        double l = std::max(lam(i), floor);
        s(i) = std::sqrt(l);
        si(i) = 1.0 / s(i);
    }
    half = eig.eigenvectors() * s.asDiagonal() * eig.eigenvectors().transpose();
    inv_half = eig.eigenvectors() * si.asDiagonal() * eig.eigenvectors().transpose();
}

} // namespace

Eigen::MatrixXd spd_log(const Eigen::MatrixXd& B0, const Eigen::MatrixXd& B) {
    check_symmetric(B0, "spd_log(B0)");
    check_symmetric(B, "spd_log(B)");
    Eigen::MatrixXd half, inv_half;
    sqrt_pair(B0, half, inv_half);

    Eigen::MatrixXd inner = inv_half * B * inv_half;
    inner = 0.5 * (inner + inner.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner);
    const Eigen::VectorXd& lam = eig.eigenvalues();
    if (!(lam(0) > 0.0))
        throw Error("spd_log: argument not positive definite (min eigenvalue " +
                    std::to_string(lam(0)) + ")");
    Eigen::VectorXd loglam(lam.size());
    for (Eigen::Index i = 0; i < lam.size(); ++i) loglam(i) = std::log(lam(i));
    Eigen::MatrixXd logm =
        eig.eigenvectors() * loglam.asDiagonal() * eig.eigenvectors().transpose();
    Eigen::MatrixXd out = half * logm * half;
    return 0.5 * (out + out.transpose()).eval();
}

Eigen::MatrixXd spd_exp(const Eigen::MatrixXd& B0, const Eigen::MatrixXd& T) {
    check_symmetric(B0, "spd_exp(B0)");
    check_symmetric(T, "spd_exp(T)");
    Eigen::MatrixXd half, inv_half;
    sqrt_pair(B0, half, inv_half);

    Eigen::MatrixXd inner = inv_half * T * inv_half;
    inner = 0.5 * (inner + inner.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(inner);
    Eigen::VectorXd explam(eig.eigenvalues().size());
    for (Eigen::Index i = 0; i < explam.size(); ++i)
        explam(i) = std::exp(eig.eigenvalues()(i));
    Eigen::MatrixXd expm =
        eig.eigenvectors() * explam.asDiagonal() * eig.eigenvectors().transpose();
    Eigen::MatrixXd out = half * expm * half;
    return 0.5 * (out + out.transpose()).eval();
}

} // namespace liftrom
