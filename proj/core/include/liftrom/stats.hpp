#pragma once

#include <Eigen/Dense>
#include <vector>

namespace liftrom {

/// Standard central-moment summary; kurtosis is non-excess (normal = 3).
struct SampleStats {
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0; ///< n-1 normalization
    double skewness = 0.0;
    double kurtosis = 0.0;

    static SampleStats compute(const std::vector<double>& samples);
};

struct KdeCurve {
    Eigen::VectorXd x;       ///< equally spaced grid
    Eigen::VectorXd density;

    /// trapezoid integral over the grid
    double integral() const;
};

/// Gaussian-kernel density estimate on `points` equally spaced grid points
/// spanning the sample range padded by 4 bandwidths.
KdeCurve kde_gaussian(const std::vector<double>& samples, double bandwidth, int points);

/// Same estimate on a caller-chosen grid [lo, hi] (for overlaying methods).
KdeCurve kde_gaussian_range(const std::vector<double>& samples, double bandwidth, int points,
                            double lo, double hi);

} // namespace liftrom
