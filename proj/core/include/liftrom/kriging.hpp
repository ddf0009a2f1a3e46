#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "liftrom/rom_db.hpp"

namespace liftrom {

/// Isotropic squared-exponential correlation exp(-||a-b||^2 / (2 l^2)).
double se_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double ell);

/// Zero-mean Gaussian-process interpolator of one scalar quantity over the
/// (standardized) training parameters.
struct GpModel {
    Eigen::MatrixXd inputs; ///< M x d standardized training points
    Eigen::VectorXd values; ///< M
    double ell = 1.0;
    double sigma2 = 0.0;
    double nugget = 1e-10;
    Eigen::MatrixXd chol_L; ///< Cholesky factor of R (+ nugget I)
    Eigen::VectorXd alpha;  ///< R^{-1} values
    bool zero = false;      ///< all-zero training data: predicts 0 with 0 variance
};

struct GpPrediction {
    double mean = 0.0;
    double variance = 0.0;
};

/// Maximum-likelihood fit: sigma^2 is profiled out analytically
/// (sigma^2 = y^T R^{-1} y / M) and the concentrated likelihood is searched
/// over log(ell) by golden section within [ell_lo, ell_hi].
GpModel fit_gp(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& values,
               double ell_lo, double ell_hi);

GpPrediction gp_predict(const GpModel& model, const Eigen::VectorXd& x);

/// POD + Kriging baseline: one GP per retained reduced coordinate, sharing
/// the database's block basis.
struct PodKrigSurrogate {
    std::vector<GpModel> models; ///< total_k models
    Eigen::VectorXd theta_mean;
    Eigen::VectorXd theta_std;

    Eigen::VectorXd predict_reduced(const Eigen::VectorXd& theta) const;
};

/// Fits every reduced coordinate of the training snapshots. Length-scale
/// bounds are relative to the standardized parameter-cloud diameter.
PodKrigSurrogate fit_pod_krig(const RomDatabase& db, double ell_lo_frac = 0.05,
                              double ell_hi_frac = 10.0);

/// Full-field baseline prediction (lift + state recovery + aero outputs).
Prediction pod_krig_predict(const PodKrigSurrogate& surrogate, const RomDatabase& db,
                            const Eigen::VectorXd& theta, const Mesh& mesh);

/// Binary file "liftrom-gp v1 count M d".
void save_surrogate(const std::string& path, const PodKrigSurrogate& s);
PodKrigSurrogate load_surrogate(const std::string& path);

} // namespace liftrom
