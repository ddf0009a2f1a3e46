#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <string>
#include <vector>

#include "liftrom/gradient.hpp"
#include "liftrom/observables.hpp"

namespace liftrom {

/// Which algebraic form of the closure constraints to evaluate.
/// - quotient: the textbook form h_i = y_{4+i} - f_i(y1..y4), physical units,
///   divides by y1/y2/y3 and refuses stagnation cells.
/// - cross: denominator-free polynomial form scaled by freestream magnitudes
///   so residuals are O(1); identical zero set away from the guards.
enum class ConstraintForm { quotient, cross };

/// One farfield boundary contribution to a lifted equation row: the row
/// receives coeff * (freestream value of observable obs) on the RHS.
struct FarfieldClosure {
    int row = -1;  ///< global row in [0, 4N)
    int obs = -1;  ///< observable index 0..7
    double coeff = 0.0;
};

/// The lifted linear system A y = f for the 2D Euler equations. A carries the
/// Gx/Gy block pattern with wall faces folded in by zeroth-order owner
/// extrapolation; farfield faces stay symbolic so f can be formed either from
/// prescribed freestream values or by snapshot extraction.
struct LiftedSystem {
    Eigen::SparseMatrix<double> A; ///< 4N x 8N
    std::vector<FarfieldClosure> farfield;
    Eigen::VectorXd theta;
    Eigen::VectorXd cell_volumes; ///< per-cell weights for the projection norm
    int n = 0;

    /// f := A y (snapshot extraction; training residual is zero by definition)
    Eigen::VectorXd extract_rhs(const ObservableVector& y) const;

    /// Verification path: f from freestream values on the farfield closure.
    Eigen::VectorXd freestream_rhs(const Freestream& fs) const;
};

LiftedSystem assemble_lifted(const GradientOperators& ops, const Freestream& fs,
                             const Mesh& mesh);

/// Closure constraint residuals h1..h4 (each an N-vector).
std::array<Eigen::VectorXd, 4> constraints(const ObservableVector& y, const Freestream& fs,
                                           ConstraintForm form);

/// Binary sparse format "liftrom-spmat v1 rows cols nnz" (row-compressed),
/// with an f vector appended.
void save_spmat(const std::string& path, const Eigen::SparseMatrix<double>& A,
                const Eigen::VectorXd& f);
void load_spmat(const std::string& path, Eigen::SparseMatrix<double>& A, Eigen::VectorXd& f);

} // namespace liftrom
