#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "liftrom/euler.hpp"

namespace liftrom {

/// The eight lifted observables (rho u, rho v, rho u v, p, rho u^2, rho v^2,
/// rho u H, rho v H), each an N-vector. Index 0 is y1.
struct ObservableVector {
    std::array<Eigen::VectorXd, 8> y;

    int n() const { return static_cast<int>(y[0].size()); }
    Eigen::VectorXd& operator[](int i) { return y[static_cast<std::size_t>(i)]; }
    const Eigen::VectorXd& operator[](int i) const { return y[static_cast<std::size_t>(i)]; }

    /// Stacked 8N vector (y1; ...; y8).
    Eigen::VectorXd stacked() const;
    static ObservableVector from_stacked(const Eigen::VectorXd& s);

    /// Freestream observable values (constants per observable).
    static Eigen::Matrix<double, 8, 1> freestream_values(const Freestream& fs);
};

/// Reference magnitudes that make the mixed-unit observables O(1): each
/// observable and each equation row is divided by its freestream scale
/// throughout the reduction pipeline.
struct ObservableScales {
    std::array<double, 8> obs{};
    std::array<double, 4> row{}; ///< per lifted equation block
    double v_inf = 0.0;
    double h_inf = 0.0;
    double v2_over_h = 0.0; ///< recurring constraint coefficient V^2/H

    static ObservableScales from(const Freestream& fs);
};

ObservableVector state_to_observables(const FlowState& s, const Freestream& fs);

struct RecoveryReport {
    int guarded_cells = 0;
    bool warning = false; ///< set when guards fired in more than 1% of cells
};

/// Inverts the lifting: p = y4, u = y3/y2, v = y3/y1, rho = y1 y2 / y3, with
/// algebraic fallbacks (rho = y1^2/y5, u = y5/y1, v = y6/y2) where a
/// denominator falls under 1e-8 of its freestream scale. Throws on NaN or
/// non-positive recovered density/pressure.
FlowState observables_to_state(const ObservableVector& y, const Freestream& fs,
                               RecoveryReport* report = nullptr);

/// Binary snapshot file "liftrom-snap v1 N O=8": eight observable arrays,
/// four primitive arrays, then the parameter vector.
void save_snapshot(const std::string& path, const ObservableVector& y,
                   const FlowState& state, const Eigen::VectorXd& theta);
void load_snapshot(const std::string& path, ObservableVector& y, FlowState& state,
                   Eigen::VectorXd& theta);

} // namespace liftrom
