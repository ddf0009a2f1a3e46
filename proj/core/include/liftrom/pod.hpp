#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>

#include "liftrom/observables.hpp"

namespace liftrom {

/// Truncated POD basis of one observable's (scaled) snapshot matrix.
struct PodSlice {
    Eigen::MatrixXd phi;              ///< N x k, orthonormal columns
    Eigen::VectorXd singular_values;  ///< all numerically nonzero values
    int k = 0;

    int n() const { return static_cast<int>(phi.rows()); }
};

/// Thin SVD with energy truncation: k is the smallest count whose cumulative
/// singular-value fraction reaches energy_target. Numerically zero modes
/// (sigma <= 1e-12 sigma_max) are never retained, so energy_target = 1
/// returns the numerical rank. Mode signs are fixed by making the first
/// above-noise entry of each column positive.
PodSlice pod(const Eigen::MatrixXd& snapshots, double energy_target);

/// Logical block-diagonal basis over the eight observables, together with
/// the freestream scaling applied to snapshots before the per-observable
/// PODs. Never materialized as one dense matrix.
struct BlockBasis {
    std::array<PodSlice, 8> slice;
    std::array<double, 8> scales{};
    int n = 0;
    int total_k = 0;
    std::array<int, 8> offset{};

    int k_of(int obs) const { return slice[static_cast<std::size_t>(obs)].k; }
    const Eigen::MatrixXd& phi(int obs) const { return slice[static_cast<std::size_t>(obs)].phi; }

    /// physical observables -> reduced coordinates (scaling included)
    Eigen::VectorXd reduce(const ObservableVector& y) const;
    /// reduced coordinates -> physical observables
    ObservableVector lift(const Eigen::VectorXd& reduced) const;
};

BlockBasis assemble_block_basis(const std::array<PodSlice, 8>& slices,
                                const std::array<double, 8>& scales);

/// Binary file "liftrom-basis v1 N k_1..k_8": column-major phi blocks then
/// singular values, with the observable scales appended.
void save_basis(const std::string& path, const BlockBasis& basis);
BlockBasis load_basis(const std::string& path);

} // namespace liftrom
