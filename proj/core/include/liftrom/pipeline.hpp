#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "liftrom/cst.hpp"
#include "liftrom/euler.hpp"
#include "liftrom/ga.hpp"
#include "liftrom/kriging.hpp"
#include "liftrom/lift.hpp"
#include "liftrom/rom.hpp"
#include "liftrom/rom_db.hpp"
#include "liftrom/stats.hpp"

namespace liftrom {

struct MeshConfig {
    int n_wrap = 64;
    int n_radial = 32;
    double far_radius = 15.0;
    double stretch = 1.12;
};

struct GaConfig {
    GaOptions ga;
    double obj_tol = 1e-3; ///< inner ROM solve objective tolerance
    double con_tol = 1e-5; ///< inner ROM solve constraint tolerance
};

struct McConfig {
    int samples = 500;
    std::uint64_t seed = 2024;
    int fom_control = 50; ///< FOM solves on the leading MC samples
    int kde_points = 100;
    double kde_bw_cd = 0.001;
    double kde_bw_cl = 0.017;
};

struct ValidateThresholds {
    double cp_max_pct = 10.0;
    double cp_mean_pct = 5.0;
    double cl_pct = 5.0;
    int cl_pass_min = 2;
};

/// Versioned run configuration ("liftrom-config v1" JSON schema). Every field
/// is validated against module preconditions before any compute starts.
struct RunConfig {
    std::string baseline_name = "naca0012"; ///< naca0012 | rae2822 | custom
    CstAirfoil baseline = CstAirfoil::naca0012();
    std::vector<int> active = {1, 4};
    double fraction = 0.3;
    int snapshots = 20;
    int holdout = 3;
    std::uint64_t lhs_seed = 42;
    MeshConfig mesh;
    Freestream freestream;
    double energy_target = 0.9999;
    EulerOptions solver;
    RomSolveOptions rom;
    ConstraintForm constraint_form = ConstraintForm::cross;
    GaConfig ga;
    McConfig mc;
    ValidateThresholds thresholds;

    void check() const;
    std::string to_json() const;
    static RunConfig from_json(const std::string& text);
    static RunConfig load(const std::string& path);
    void save(const std::string& path) const;
};

// §-style error metrics: C_P in the relative infinity norm, scalars relative,
// both in percent.
double cp_error_pct(const Eigen::VectorXd& cp_fom, const Eigen::VectorXd& cp_rom);
double scalar_error_pct(double fom, double rom);

struct BuildOutcome {
    std::string db_path;
    std::string surrogate_path;
    int built = 0;
    int skipped = 0;
    std::vector<Eigen::VectorXd> holdout;
    double seconds = 0.0;
};

/// Offline phase: LHS family, meshes, FOM snapshots (parallel), POD + DEIM,
/// per-point projection, persisted database + Kriging surrogate + manifest.
BuildOutcome cmd_build(const RunConfig& config, const std::string& out_dir, int jobs);

struct CaseErrors {
    double cp_pct = 0.0;
    double cl_pct = 0.0;
    double cd_pct = 0.0;
};

struct ErrorReport {
    std::vector<CaseErrors> pod_proj;
    std::vector<CaseErrors> pod_krig;
    std::vector<double> fom_cl, fom_cd;
    std::vector<double> proj_cl, proj_cd;
    std::vector<double> krig_cl, krig_cd;
    double fom_seconds = 0.0;
    double rom_seconds = 0.0; ///< single-query online cost, averaged
    bool thresholds_met = false;
};

/// Runs both POD-Proj and POD-Krig against fresh FOM solves at the holdout
/// points and evaluates the error metrics.
ErrorReport cmd_validate(const std::string& db_path,
                         const std::vector<Eigen::VectorXd>& holdout,
                         const std::string& out_dir, int jobs);

struct InverseDesignResult {
    Eigen::VectorXd best_theta;
    double best_fitness = 0.0;
    GaResult ga;
    int failed_evals = 0;
    double seconds = 0.0;
};

/// GA search for the shape whose predicted wall C_P matches the target.
/// The target is resampled onto the database wall stations by chordwise
/// position when the grids differ.
InverseDesignResult cmd_inverse_design(const std::string& db_path,
                                       const Eigen::VectorXd& target_x,
                                       const Eigen::VectorXd& target_cp,
                                       const std::string& out_dir, int jobs,
                                       std::optional<std::uint64_t> seed_override = std::nullopt);

struct UqResult {
    SampleStats proj_cl, proj_cd, krig_cl, krig_cd;
    std::optional<SampleStats> fom_cl, fom_cd;
    double kde_cl_integral = 0.0;
    double kde_cd_integral = 0.0;
    int failed_samples = 0;
    /// paired means over the FOM control subset
    double control_fom_cl_mean = 0.0, control_fom_cd_mean = 0.0;
    double control_proj_cl_mean = 0.0, control_proj_cd_mean = 0.0;
    double control_krig_cl_mean = 0.0, control_krig_cd_mean = 0.0;
    double seconds = 0.0;
};

/// Monte Carlo propagation of the CST box through both surrogates, with a
/// FOM control subset, KDE curves and the output-statistics table.
UqResult cmd_uq(const std::string& db_path, const std::string& out_dir, int jobs,
                std::optional<int> samples_override = std::nullopt,
                std::optional<std::uint64_t> seed_override = std::nullopt);

/// Collates a run directory into plot-ready CSVs plus summary.json; errors
/// listing the expected files when nothing usable is present.
void cmd_report(const std::string& run_dir);

// Internal building blocks shared by commands and tests.
Mesh mesh_for_theta(const RunConfig& config, const Eigen::VectorXd& theta);
RunConfig config_of_db(const RomDatabase& db);

} // namespace liftrom
