#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "liftrom/lift.hpp"
#include "liftrom/pod.hpp"

namespace liftrom {

/// Greedy discrete empirical interpolation point selection over an
/// orthonormal basis X. Returns q = X.cols() distinct row indices.
std::vector<int> deim_select(const Eigen::MatrixXd& X);

/// Hyper-reduction data of one closure constraint: the interpolation points,
/// the precomputed projector Phi^T X (P^T X)^-1, and the sampled rows of the
/// input bases the kernel reads.
struct DeimConstraint {
    std::vector<int> indices;                ///< the q points
    Eigen::MatrixXd projector;               ///< k_{4+i} x q
    std::array<Eigen::MatrixXd, 8> sampled;  ///< Phi_j(indices,:), filled where used
    double condition = 0.0;                  ///< cond(P^T X), logged at build
};

/// Hyper-reduced evaluation of all four constraints in reduced coordinates.
struct DeimData {
    std::array<DeimConstraint, 4> constraint;
    std::array<int, 8> k{};      ///< per-observable basis sizes
    std::array<int, 8> offset{}; ///< reduced-coordinate offsets
    int total_k = 0;
    ConstraintForm form = ConstraintForm::cross;
    double v2_over_h = 0.0;
    double gamma = 1.4;

    bool empty() const { return total_k == 0; }
    /// number of reduced constraint rows (sum of k_{4+i})
    int m() const;
};

/// Builds the DEIM payload against a block basis. The nonlinear-term
/// snapshots coincide with the y_{4+i} snapshots on consistent training data,
/// so X_i is the leading q_i modes of Phi_{4+i}.
DeimData build_deim(const BlockBasis& basis, const std::array<int, 4>& q,
                    ConstraintForm form, const Freestream& fs);

/// h~(y~): evaluates the constraint kernels only at the sampled points and
/// applies the projector; cost independent of N. In quotient form a guarded
/// division at any sampled point switches that constraint to the
/// cross-multiplied kernel automatically.
Eigen::VectorXd deim_constraint(const DeimData& dd, const Eigen::VectorXd& y_reduced);

/// Analytic Jacobian of deim_constraint, m() x total_k.
Eigen::MatrixXd deim_constraint_jacobian(const DeimData& dd, const Eigen::VectorXd& y_reduced);

} // namespace liftrom
