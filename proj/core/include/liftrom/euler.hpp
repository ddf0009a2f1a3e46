#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "liftrom/error.hpp"
#include "liftrom/mesh.hpp"

namespace liftrom {

/// Free-stream reference conditions. mu_inf is carried for completeness but
/// never enters the inviscid equations.
struct Freestream {
    double p_inf = 101325.0;   ///< Pa
    double rho_inf = 1.225;    ///< kg/m^3
    double a_inf = 340.296;    ///< m/s
    double mach = 0.6;
    double alpha_deg = 2.0;
    double gamma = 1.4;
    double mu_inf = 0.0;       ///< Pa s, unused

    double speed() const { return mach * a_inf; }
    double u() const;
    double v() const;
    double dynamic_pressure() const { return 0.5 * rho_inf * speed() * speed(); }

    /// Checks positivity and the ideal-gas consistency a^2 = gamma p / rho to 1%.
    void validate() const;
};

/// Primitive cell-centered flow state.
struct FlowState {
    Eigen::VectorXd rho;
    Eigen::VectorXd u;
    Eigen::VectorXd v;
    Eigen::VectorXd p;

    int n() const { return static_cast<int>(rho.size()); }
    void validate_positivity() const;
};

struct EulerOptions {
    double cfl = 0.8;
    long max_iters = 200000;
    double tol = 1e-8; ///< relative density-residual drop
};

/// Thrown when pseudo-time marching exhausts max_iters; carries the residual
/// trace for diagnosis.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, std::vector<double> history)
        : Error(msg), residual_history(std::move(history)) {}
    std::vector<double> residual_history;
};

/// Steady solution of the 2D compressible Euler equations: first-order
/// Rusanov fluxes, local time stepping, slip wall ("wall" patch) and
/// Riemann-invariant far field ("farfield" patch).
FlowState solve_euler(const Mesh& mesh, const Freestream& fs, const EulerOptions& opts);

struct AeroCoeffs {
    Eigen::VectorXd cp; ///< per wall face, in wall-ordinal order
    Eigen::VectorXd x;  ///< face-center chordwise position, aligned with cp
    double cl = 0.0;
    double cd = 0.0;
};

/// Net and incoming mass fluxes through the farfield patch, evaluated with
/// the same characteristic boundary states the solver uses.
struct MassFlux {
    double net = 0.0;
    double inflow = 0.0; ///< magnitude of the incoming share
};
MassFlux farfield_mass_flux(const FlowState& state, const Mesh& mesh, const Freestream& fs);

/// Pressure coefficient on the wall plus integrated lift/drag coefficients
/// (pressure forces only, rotated to wind axes, normalized by q_inf * chord).
AeroCoeffs aero_coefficients(const FlowState& state, const Mesh& mesh, const Freestream& fs);

} // namespace liftrom
