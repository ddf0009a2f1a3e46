#pragma once

#include <Eigen/Dense>

namespace liftrom {

/// Affine-invariant logarithmic map of SPD matrix B to the tangent plane at
/// B0: B0^{1/2} log(B0^{-1/2} B B0^{-1/2}) B0^{1/2}. The result is symmetric.
/// Throws if either input has an eigenvalue <= 0.
Eigen::MatrixXd spd_log(const Eigen::MatrixXd& B0, const Eigen::MatrixXd& B);

/// Exponential map of symmetric tangent vector T back to the manifold:
/// B0^{1/2} exp(B0^{-1/2} T B0^{-1/2}) B0^{1/2}. Always SPD by construction.
Eigen::MatrixXd spd_exp(const Eigen::MatrixXd& B0, const Eigen::MatrixXd& T);

} // namespace liftrom
