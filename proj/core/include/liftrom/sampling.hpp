#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace liftrom {

/// Latin hypercube design on [0,1)^dims: `count` points, one per equal-width
/// stratum in every coordinate. Deterministic for a given seed.
Eigen::MatrixXd latin_hypercube(int count, int dims, std::uint64_t seed);

/// Plain uniform sampling on [0,1)^dims, deterministic per seed.
Eigen::MatrixXd uniform_box(int count, int dims, std::uint64_t seed);

} // namespace liftrom
