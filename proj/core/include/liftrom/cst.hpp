#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace liftrom {

/// Class-shape-transformation airfoil: y(psi) = C(psi) * S(psi) per surface,
/// with class C = psi^n1 (1-psi)^n2 and shape S a Bernstein expansion whose
/// scaling coefficients are the design parameters.
struct CstAirfoil {
    double n1 = 0.5;             ///< class exponent, > 0 (0.5 for round LE)
    double n2 = 1.0;             ///< class exponent, > 0 (1.0 for sharp TE)
    int order = 1;               ///< Bernstein order n >= 1
    Eigen::VectorXd coeffs_upper; ///< length order+1
    Eigen::VectorXd coeffs_lower; ///< length order+1

    void validate() const;

    /// Flattened design vector [upper..., lower...], length 2*(order+1).
    Eigen::VectorXd flatten() const;
    /// Rebuilds coefficient rows from a flattened vector.
    static CstAirfoil from_flat(double n1, double n2, int order,
                                const Eigen::VectorXd& flat);
    /// Copy with the `active` entries of the flattened vector replaced by theta.
    CstAirfoil with_active(const std::vector<int>& active,
                           const Eigen::VectorXd& theta) const;

    static CstAirfoil naca0012();
    static CstAirfoil rae2822();
};

/// Discrete airfoil curve sampled on a shared chordwise grid.
struct AirfoilShape {
    Eigen::VectorXd psi;      ///< strictly increasing, psi[0]=0, psi[last]=1
    Eigen::VectorXd y_upper;
    Eigen::VectorXd y_lower;

    void validate() const;
};

/// Class function psi^n1 (1-psi)^n2. Throws outside [0,1].
double class_fn(double psi, double n1, double n2);

/// Bernstein shape function sum_i A_i K(i,n) psi^i (1-psi)^(n-i).
double shape_fn(double psi, const Eigen::VectorXd& coeffs);

/// Cosine-clustered chordwise stations, psi[0]=0, psi[m-1]=1.
Eigen::VectorXd cosine_psi(int m);

/// Samples both surfaces at m cosine-clustered stations.
AirfoilShape evaluate_airfoil(const CstAirfoil& cst, int m);

/// Least-squares CST fit using all supplied points of each surface.
CstAirfoil fit_cst(const AirfoilShape& points, int order, double n1 = 0.5,
                   double n2 = 1.0);

/// Latin-hypercube family of design vectors in the box
/// [A_i(1-fraction), A_i(1+fraction)] over the active flattened coefficients.
/// Bounds are ordered regardless of coefficient sign. Deterministic per seed.
std::vector<Eigen::VectorXd> perturb_family(const CstAirfoil& base, double fraction,
                                            int count, const std::vector<int>& active,
                                            std::uint64_t seed);

/// Well-ordered per-coordinate bounds of the perturbation box.
void perturb_box(const CstAirfoil& base, double fraction, const std::vector<int>& active,
                 Eigen::VectorXd& lower, Eigen::VectorXd& upper);

/// Two-column text (psi, y), one file per surface.
void save_surface_points(const std::string& path, const Eigen::VectorXd& psi,
                         const Eigen::VectorXd& y);
void load_surface_points(const std::string& path, Eigen::VectorXd& psi,
                         Eigen::VectorXd& y);

/// Parameter family CSV; header row names the active coefficient indices.
void save_family_csv(const std::string& path, const std::vector<int>& active,
                     const std::vector<Eigen::VectorXd>& thetas);
std::vector<Eigen::VectorXd> load_family_csv(const std::string& path,
                                             std::vector<int>& active);

} // namespace liftrom
