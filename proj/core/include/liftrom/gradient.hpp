#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <utility>
#include <vector>

#include "liftrom/mesh.hpp"

namespace liftrom {

/// Contribution of one boundary-face value to the cell gradient: the face
/// value v adds v*coeff_x to gx(cell) and v*coeff_y to gy(cell). Kept
/// symbolic so the same operators serve prescribed data and snapshot closure.
struct BoundaryCoeff {
    int cell = -1;
    double coeff_x = 0.0;
    double coeff_y = 0.0;
};

/// Cell-centered Green-Gauss gradient operators with arithmetic face
/// averaging on interior faces. Boundary faces are represented by closure
/// descriptors indexed by the mesh's boundary ordinal.
struct GradientOperators {
    Eigen::SparseMatrix<double> gx; ///< N x N, 1/m
    Eigen::SparseMatrix<double> gy;
    std::vector<BoundaryCoeff> closure; ///< one per boundary ordinal

    int n() const { return static_cast<int>(gx.rows()); }
};

GradientOperators assemble_gradient_ops(const Mesh& mesh);

/// Interior-operator product plus boundary closure. boundary_values is
/// indexed by boundary ordinal; NaN marks a missing value and is an error
/// naming the patch and face.
std::pair<Eigen::VectorXd, Eigen::VectorXd> apply_with_boundary(
    const GradientOperators& ops, const Mesh& mesh, const Eigen::VectorXd& field,
    const Eigen::VectorXd& boundary_values);

} // namespace liftrom
