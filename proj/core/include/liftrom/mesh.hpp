#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "liftrom/cst.hpp"

namespace liftrom {

/// A straight face of the finite-volume mesh. `normal` is the outward unit
/// normal of the owner cell; boundary faces have neighbor == -1 and a patch id.
struct Face {
    int owner = -1;
    int neighbor = -1;
    double nx = 0.0;
    double ny = 0.0;
    double area = 0.0; ///< edge length (2D)
    double cx = 0.0;   ///< midpoint
    double cy = 0.0;
    int patch = -1;    ///< -1 interior, otherwise index into patch_names
};

/// Cell-centered unstructured view of a 2D mesh. Generated meshes are
/// structured O-grids but nothing downstream relies on that.
struct Mesh {
    Eigen::MatrixX2d cell_centers; ///< N x 2
    Eigen::VectorXd cell_volumes;  ///< N (2D areas)
    std::vector<Face> faces;
    std::vector<std::string> patch_names;

    /// face index per boundary ordinal, in file/record order
    std::vector<int> boundary_faces;
    /// per face: boundary ordinal or -1
    std::vector<int> boundary_ordinal;

    int n_cells() const { return static_cast<int>(cell_centers.rows()); }
    int n_faces() const { return static_cast<int>(faces.size()); }
    int n_boundary() const { return static_cast<int>(boundary_faces.size()); }

    int patch_id(const std::string& name) const;
    /// boundary ordinals of one patch, in ordinal order
    std::vector<int> patch_ordinals(const std::string& name) const;

    /// Rebuilds boundary index tables and checks volumes, owners and cell
    /// closure. Call after constructing or mutating the raw fields.
    void finalize();
};

/// Algebraic O-grid around an airfoil: inner boundary is the airfoil surface
/// (patch "wall"), outer boundary a circle of far_radius chords (patch
/// "farfield"). n_wrap cells around the section, n_radial layers with
/// geometric stretching. Throws on self-intersecting (non-positive) cells.
Mesh generate_omesh(const AirfoilShape& shape, int n_wrap, int n_radial,
                    double far_radius, double stretch);

/// Text format "liftrom-mesh v1": decimal with 17 significant digits, so a
/// save/load round trip reproduces every double bit-exactly.
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

} // namespace liftrom
