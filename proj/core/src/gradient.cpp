#include "liftrom/gradient.hpp"

#include <cmath>

#include "liftrom/error.hpp"

namespace liftrom {

GradientOperators assemble_gradient_ops(const Mesh& mesh) {
    const int n = mesh.n_cells();
    std::vector<Eigen::Triplet<double>> tx, ty;
    tx.reserve(mesh.faces.size() * 4);
    ty.reserve(mesh.faces.size() * 4);
    GradientOperators ops;
    ops.closure.resize(static_cast<std::size_t>(mesh.n_boundary()));

    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        double sx = face.nx * face.area;
        double sy = face.ny * face.area;
        if (face.neighbor >= 0) {
            // arithmetic face mean: 0.5 (u_o + u_n) on both sides
            double wo = 1.0 / mesh.cell_volumes(face.owner);
            double wn = 1.0 / mesh.cell_volumes(face.neighbor);
            tx.emplace_back(face.owner, face.owner, 0.5 * sx * wo);
            tx.emplace_back(face.owner, face.neighbor, 0.5 * sx * wo);
            tx.emplace_back(face.neighbor, face.owner, -0.5 * sx * wn);
            tx.emplace_back(face.neighbor, face.neighbor, -0.5 * sx * wn);
            ty.emplace_back(face.owner, face.owner, 0.5 * sy * wo);
            ty.emplace_back(face.owner, face.neighbor, 0.5 * sy * wo);
            ty.emplace_back(face.neighbor, face.owner, -0.5 * sy * wn);
            ty.emplace_back(face.neighbor, face.neighbor, -0.5 * sy * wn);
        } else {
            double wo = 1.0 / mesh.cell_volumes(face.owner);
            int b = mesh.boundary_ordinal[f];
            ops.closure[static_cast<std::size_t>(b)] = {face.owner, sx * wo, sy * wo};
        }
    }
    ops.gx.resize(n, n);
    ops.gy.resize(n, n);
    ops.gx.setFromTriplets(tx.begin(), tx.end());
    ops.gy.setFromTriplets(ty.begin(), ty.end());
    ops.gx.makeCompressed();
    ops.gy.makeCompressed();
    return ops;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> apply_with_boundary(
    const GradientOperators& ops, const Mesh& mesh, const Eigen::VectorXd& field,
    const Eigen::VectorXd& boundary_values) {
    if (field.size() != ops.n()) throw Error("apply_with_boundary: field size mismatch");
    if (boundary_values.size() != mesh.n_boundary())
        throw Error("apply_with_boundary: expected one value per boundary face");
    for (int b = 0; b < mesh.n_boundary(); ++b) {
        if (std::isnan(boundary_values(b))) {
            const Face& face =
                mesh.faces[static_cast<std::size_t>(mesh.boundary_faces[static_cast<std::size_t>(b)])];
            throw Error("apply_with_boundary: missing value on patch '" +
                        mesh.patch_names[static_cast<std::size_t>(face.patch)] + "' face " +
                        std::to_string(mesh.boundary_faces[static_cast<std::size_t>(b)]));
        }
    }
    Eigen::VectorXd gx = ops.gx * field;
    Eigen::VectorXd gy = ops.gy * field;
    for (int b = 0; b < mesh.n_boundary(); ++b) {
        const BoundaryCoeff& c = ops.closure[static_cast<std::size_t>(b)];
        gx(c.cell) += boundary_values(b) * c.coeff_x;
        gy(c.cell) += boundary_values(b) * c.coeff_y;
    }
    return {std::move(gx), std::move(gy)};
}

} // namespace liftrom
