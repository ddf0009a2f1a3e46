#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "liftrom/deim.hpp"
#include "liftrom/lift.hpp"
#include "liftrom/pod.hpp"

namespace liftrom {

/// One reduced system B~ y~ = f~, tied to a single parameter point. B~ lives
/// in the freestream-scaled space and is SPD by construction.
struct RomInstance {
    enum class Provenance { snapshot_built, interpolated };

    Eigen::MatrixXd B;      ///< k x k, symmetric positive definite
    Eigen::VectorXd f;      ///< k
    Eigen::VectorXd theta;
    Provenance provenance = Provenance::snapshot_built;
    double min_eigenvalue = 0.0; ///< recorded at build/interpolation time
};

/// Galerkin projection on the normal equations: with Psi = W Phi (W the
/// row/column-scaled lifted operator), B~ = Psi^T Psi and f~ = Psi^T (D f).
/// Psi is formed block-by-block from sparse products; A^T A is never built.
/// Throws if the projected matrix fails the positive-definiteness check.
RomInstance project(const LiftedSystem& sys, const BlockBasis& basis,
                    const ObservableScales& scales, const Eigen::VectorXd& f_full);

struct RomSolveOptions {
    double obj_tol = 1e-6;
    double con_tol = 1e-6;
    long max_evals = 4000000;
    int max_iters = 200;
};

struct ReducedSolution {
    Eigen::VectorXd y;           ///< reduced observables
    double objective = 0.0;      ///< 0.5 ||B y - f||^2 at y
    double constraint_norm = 0.0; ///< ||h~(y)||_inf at y
    int iterations = 0;
    long evals = 0;
    bool converged = false;
    int init_index = -1;          ///< id of the snapshot used as initial guess
    double solve_seconds = 0.0;
};

/// Thrown when the solve exhausts its budget or stalls; carries the best
/// iterate found so callers can penalize and continue.
class RomSolveError : public Error {
public:
    RomSolveError(const std::string& msg, ReducedSolution best)
        : Error(msg), best_iterate(std::make_shared<ReducedSolution>(std::move(best))) {}
    std::shared_ptr<const ReducedSolution> best_iterate;
};

/// Solves min 0.5||B y - f||^2 s.t. h~(y) = 0 by damped Gauss-Newton steps on
/// the KKT system with an augmented-Lagrangian fallback. Passing dd == nullptr
/// (or an empty DeimData) solves the unconstrained SPD system directly.
ReducedSolution solve_rom(const RomInstance& rom, const DeimData* dd,
                          const Eigen::VectorXd& init, const RomSolveOptions& opts);

/// Structured-text (JSON) round trip for a reduced solution.
void save_solution(const std::string& path, const ReducedSolution& sol,
                   const Eigen::VectorXd& theta);

} // namespace liftrom
