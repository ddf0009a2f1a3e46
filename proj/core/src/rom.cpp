#include "liftrom/rom.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "liftrom/io_util.hpp"

namespace liftrom {

RomInstance project(const LiftedSystem& sys, const BlockBasis& basis,
                    const ObservableScales& scales, const Eigen::VectorXd& f_full) {
    const int n = sys.n;
    if (basis.n != n) throw Error("project: basis/system dimension mismatch");
    if (f_full.size() != 4 * n) throw Error("project: f dimension mismatch");
    const int k = basis.total_k;

    // Psi = D A S Phi, assembled per observable block. D carries the
    // freestream row scale and the cell volume, turning per-volume gradient
    // rows into flux-integral rows so small near-wall cells do not dominate
    // the least squares.
    Eigen::VectorXd volumes = sys.cell_volumes.size() == n
                                  ? sys.cell_volumes
                                  : Eigen::VectorXd::Ones(n);
    Eigen::MatrixXd psi(4 * n, k);
    for (int j = 0; j < 8; ++j) {
        Eigen::MatrixXd scaled_phi = basis.phi(j) * scales.obs[static_cast<std::size_t>(j)];
        psi.middleCols(basis.offset[static_cast<std::size_t>(j)], basis.k_of(j)).noalias() =
            sys.A.middleCols(j * n, n) * scaled_phi;
    }
    Eigen::VectorXd f_scaled(4 * n);
    for (int rb = 0; rb < 4; ++rb) {
        Eigen::VectorXd w = volumes / scales.row[static_cast<std::size_t>(rb)];
        psi.middleRows(rb * n, n) = w.asDiagonal() * psi.middleRows(rb * n, n);
        f_scaled.segment(rb * n, n) =
            w.asDiagonal() * f_full.segment(rb * n, n);
    }

    RomInstance rom;
    rom.theta = sys.theta;
    rom.B.noalias() = psi.transpose() * psi;
    rom.B = 0.5 * (rom.B + rom.B.transpose()).eval(); // scrub roundoff asymmetry
    rom.f.noalias() = psi.transpose() * f_scaled;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(rom.B, Eigen::EigenvaluesOnly);
    rom.min_eigenvalue = eig.eigenvalues()(0);
    if (!(rom.min_eigenvalue > 0.0))
        throw Error("project: reduced matrix not positive definite (min eigenvalue " +
                    std::to_string(rom.min_eigenvalue) + ")");
    return rom;
}

namespace {

struct Objective {
    const Eigen::MatrixXd& B;
    const Eigen::VectorXd& f;

    double value(const Eigen::VectorXd& y) const { return 0.5 * (B * y - f).squaredNorm(); }
    Eigen::VectorXd gradient(const Eigen::VectorXd& y) const {
        return B.transpose() * (B * y - f);
    }
};

} // namespace

ReducedSolution solve_rom(const RomInstance& rom, const DeimData* dd,
                          const Eigen::VectorXd& init, const RomSolveOptions& opts) {
    const auto t0 = std::chrono::steady_clock::now();
    const int k = static_cast<int>(rom.B.rows());
    if (init.size() != k) throw Error("solve_rom: init size mismatch");

    ReducedSolution sol;
    Objective obj{rom.B, rom.f};

    const bool constrained = dd != nullptr && !dd->empty() && dd->m() > 0;
    if (!constrained) {
        sol.y = rom.B.llt().solve(rom.f);
        sol.objective = obj.value(sol.y);
        sol.constraint_norm = 0.0;
        sol.converged = true;
        sol.evals = 1;
        sol.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return sol;
    }

    const int m = dd->m();
    const Eigen::MatrixXd H = rom.B.transpose() * rom.B; // exact Hessian of the quadratic
    const double grad_scale = std::max(1.0, (rom.B.transpose() * rom.f).lpNorm<Eigen::Infinity>());

    Eigen::VectorXd y = init;
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(m);
    double merit_sigma = 1.0;
    double mu = 0.0; // damping
    long evals = 0;
    auto budget_left = [&] { return evals < opts.max_evals; };

    Eigen::VectorXd c = deim_constraint(*dd, y);
    ++evals;
    bool fallback = false;

    int iter = 0;
    for (; iter < opts.max_iters && budget_left(); ++iter) {
        Eigen::VectorXd g = obj.gradient(y);
        Eigen::MatrixXd J = deim_constraint_jacobian(*dd, y);
        ++evals;

        double kkt = (g + J.transpose() * lambda).lpNorm<Eigen::Infinity>();
        double cnorm = c.lpNorm<Eigen::Infinity>();
        if (cnorm <= opts.con_tol && kkt <= opts.obj_tol * grad_scale) {
            sol.converged = true;
            break;
        }

        // KKT step: [H+muI J^T; J -eps I] [dy; l] = [-g; -c]
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(k + m, k + m);
        K.topLeftCorner(k, k) = H + mu * Eigen::MatrixXd::Identity(k, k);
        K.topRightCorner(k, m) = J.transpose();
        K.bottomLeftCorner(m, k) = J;
        K.bottomRightCorner(m, m) = -1e-12 * Eigen::MatrixXd::Identity(m, m);
        Eigen::VectorXd rhs(k + m);
        rhs.head(k) = -g;
        rhs.tail(m) = -c;
        Eigen::VectorXd step = K.fullPivLu().solve(rhs);
        Eigen::VectorXd dy = step.head(k);
        Eigen::VectorXd lam_new = step.tail(m);

        if (!dy.allFinite()) {
            mu = (mu == 0.0) ? 1e-8 : mu * 10.0;
            if (mu > 1e8) { fallback = true; break; }
            continue;
        }

        merit_sigma = std::max(merit_sigma, 2.0 * lam_new.lpNorm<Eigen::Infinity>());
        double phi0 = obj.value(y) + merit_sigma * c.lpNorm<1>();
        double dphi = g.dot(dy) - merit_sigma * c.lpNorm<1>();

        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 25 && budget_left(); ++ls) {
            Eigen::VectorXd y_try = y + t * dy;
            Eigen::VectorXd c_try = deim_constraint(*dd, y_try);
            ++evals;
            double phi_try = obj.value(y_try) + merit_sigma * c_try.lpNorm<1>();
            if (phi_try <= phi0 + 1e-4 * t * std::min(dphi, 0.0) || phi_try < phi0) {
                y = y_try;
                c = c_try;
                lambda = lam_new;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            mu = (mu == 0.0) ? 1e-8 : mu * 10.0;
            if (mu > 1e8) { fallback = true; break; }
        } else if (mu > 0.0) {
            mu *= 0.1;
            if (mu < 1e-12) mu = 0.0;
        }
    }

    if (!sol.converged && (fallback || !budget_left() || iter >= opts.max_iters)) {
        // augmented Lagrangian: min g(y) + lambda^T c + rho/2 ||c||^2
        double rho = 10.0;
        for (int outer = 0; outer < 20 && budget_left() && !sol.converged; ++outer) {
            for (int inner = 0; inner < 50 && budget_left(); ++inner) {
                Eigen::VectorXd g = obj.gradient(y);
                Eigen::MatrixXd J = deim_constraint_jacobian(*dd, y);
                ++evals;
                Eigen::VectorXd gl = g + J.transpose() * (lambda + rho * c);
                if (gl.lpNorm<Eigen::Infinity>() <= 0.1 * opts.obj_tol * grad_scale * (1.0 + rho))
                    break;
                Eigen::MatrixXd Hl = H + rho * J.transpose() * J +
                                     1e-10 * grad_scale * Eigen::MatrixXd::Identity(k, k);
                Eigen::VectorXd dy = Hl.ldlt().solve(-gl);
                double t = 1.0;
                double base = obj.value(y) + lambda.dot(c) + 0.5 * rho * c.squaredNorm();
                for (int ls = 0; ls < 25 && budget_left(); ++ls) {
                    Eigen::VectorXd y_try = y + t * dy;
                    Eigen::VectorXd c_try = deim_constraint(*dd, y_try);
                    ++evals;
                    double val =
                        obj.value(y_try) + lambda.dot(c_try) + 0.5 * rho * c_try.squaredNorm();
                    if (val < base) {
                        y = y_try;
                        c = c_try;
                        break;
                    }
                    t *= 0.5;
                    if (ls == 24) inner = 50; // stalled
                }
            }
            lambda += rho * c;
            double cnorm = c.lpNorm<Eigen::Infinity>();
            if (cnorm <= opts.con_tol) {
                Eigen::VectorXd g = obj.gradient(y);
                Eigen::MatrixXd J = deim_constraint_jacobian(*dd, y);
                ++evals;
                if ((g + J.transpose() * lambda).lpNorm<Eigen::Infinity>() <=
                    10.0 * opts.obj_tol * grad_scale)
                    sol.converged = true;
            } else {
                rho *= 10.0;
            }
        }
    }

    sol.y = y;
    sol.objective = obj.value(y);
    sol.constraint_norm = c.lpNorm<Eigen::Infinity>();
    sol.iterations = iter;
    sol.evals = evals;
    sol.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // feasible iterate with exhausted optimality margin still counts as solved
    if (!sol.converged && sol.constraint_norm <= opts.con_tol) sol.converged = true;
    if (!sol.converged) {
        std::string reason = budget_left() ? "stalled line search after fallback"
                                           : "evaluation budget exhausted";
        throw RomSolveError("solve_rom: " + reason + " (constraint norm " +
                                std::to_string(sol.constraint_norm) + ")",
                            sol);
    }
    return sol;
}

void save_solution(const std::string& path, const ReducedSolution& sol,
                   const Eigen::VectorXd& theta) {
    nlohmann::json j;
    j["theta"] = std::vector<double>(theta.data(), theta.data() + theta.size());
    j["y_reduced"] = std::vector<double>(sol.y.data(), sol.y.data() + sol.y.size());
    j["objective"] = sol.objective;
    j["constraint_norm"] = sol.constraint_norm;
    j["iterations"] = sol.iterations;
    j["evals"] = sol.evals;
    j["converged"] = sol.converged;
    j["init_index"] = sol.init_index;
    j["solve_seconds"] = sol.solve_seconds;
    std::ofstream os = io::open_out(path, false);
    os << j.dump(2) << "\n";
}

} // namespace liftrom
