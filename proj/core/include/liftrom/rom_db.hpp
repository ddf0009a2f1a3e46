#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "liftrom/rom.hpp"

namespace liftrom {

/// Database of reduced systems over the training parameter set, sharing one
/// block basis and DEIM payload. Immutable after load; queries are reentrant.
struct RomDatabase {
    Eigen::MatrixXd thetas;     ///< M x d training parameters
    Eigen::VectorXd theta_mean; ///< d
    Eigen::VectorXd theta_std;  ///< d, per-dimension std-dev over training rows
    std::vector<RomInstance> instances;
    BlockBasis basis;
    DeimData deim;
    Eigen::MatrixXd reduced_snapshots; ///< k x M, training snapshots in reduced coordinates
    Freestream fs;
    std::string config_json; ///< run configuration blob (provenance)

    int m() const { return static_cast<int>(thetas.rows()); }
    int d() const { return static_cast<int>(thetas.cols()); }
    int k() const { return basis.total_k; }

    void validate() const;

    /// (theta - mean) / std with zero-std dimensions dropped from the metric.
    Eigen::VectorXd standardize(const Eigen::VectorXd& theta) const;
};

/// Index of the training point nearest in standardized Euclidean distance;
/// ties break to the lowest index.
int nearest_anchor(const RomDatabase& db, const Eigen::VectorXd& theta);

/// Reduced observables of the nearest training snapshot.
Eigen::VectorXd initial_guess(const RomDatabase& db, const Eigen::VectorXd& theta,
                              int* index = nullptr);

/// Parametric interpolation: B~ through the SPD tangent plane at the nearest
/// anchor, f~ in Euclidean space, both by least-squares quadratic fits in
/// standardized theta over the nearest min(M, (d+1)(d+2)) training points.
/// Degree degrades to linear/constant when neighbors run short.
RomInstance interpolate_rom(const RomDatabase& db, const Eigen::VectorXd& theta);

struct Prediction {
    FlowState state;
    AeroCoeffs aero;
    RecoveryReport recovery;
};

/// Lifts a reduced solution to full observables, recovers the primitive state
/// and evaluates wall pressure and force coefficients on the given mesh.
Prediction predict_full(const RomDatabase& db, const Eigen::VectorXd& y_reduced,
                        const Mesh& mesh);

/// Binary database file "liftrom-db v1 M d k N" plus a human-readable JSON
/// sidecar at path + ".json".
void save_db(const std::string& path, const RomDatabase& db);
RomDatabase load_db(const std::string& path);

} // namespace liftrom
