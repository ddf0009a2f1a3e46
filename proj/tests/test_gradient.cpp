#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>

#include "liftrom/cst.hpp"
#include "liftrom/error.hpp"
#include "liftrom/gradient.hpp"
#include "test_utils.hpp"

using namespace liftrom;

namespace {

// dense Green-Gauss assembly straight from the definition, independent of
// the sparse path
void dense_oracle(const Mesh& mesh, Eigen::MatrixXd& gx, Eigen::MatrixXd& gy,
                  std::vector<BoundaryCoeff>& closure) {
    const int n = mesh.n_cells();
    gx = Eigen::MatrixXd::Zero(n, n);
    gy = Eigen::MatrixXd::Zero(n, n);
    closure.assign(static_cast<std::size_t>(mesh.n_boundary()), {});
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        double sx = face.nx * face.area, sy = face.ny * face.area;
        if (face.neighbor >= 0) {
            for (int cell : {face.owner, face.neighbor}) {
                double sign = (cell == face.owner) ? 1.0 : -1.0;
                double w = sign / mesh.cell_volumes(cell);
                gx(cell, face.owner) += 0.5 * sx * w;
                gx(cell, face.neighbor) += 0.5 * sx * w;
                gy(cell, face.owner) += 0.5 * sy * w;
                gy(cell, face.neighbor) += 0.5 * sy * w;
            }
        } else {
            double w = 1.0 / mesh.cell_volumes(face.owner);
            closure[static_cast<std::size_t>(mesh.boundary_ordinal[f])] = {face.owner, sx * w,
                                                                           sy * w};
        }
    }
}

Eigen::VectorXd boundary_field(const Mesh& mesh,
                               const std::function<double(double, double)>& f) {
    Eigen::VectorXd vals(mesh.n_boundary());
    for (int b = 0; b < mesh.n_boundary(); ++b) {
        const Face& face =
            mesh.faces[static_cast<std::size_t>(mesh.boundary_faces[static_cast<std::size_t>(b)])];
        vals(b) = f(face.cx, face.cy);
    }
    return vals;
}

Eigen::VectorXd cell_field(const Mesh& mesh, const std::function<double(double, double)>& f) {
    Eigen::VectorXd vals(mesh.n_cells());
    for (int i = 0; i < mesh.n_cells(); ++i)
        vals(i) = f(mesh.cell_centers(i, 0), mesh.cell_centers(i, 1));
    return vals;
}

} // namespace

TEST_SUITE("gradient") {

TEST_CASE("constant field with constant boundary values is annihilated") {
    Mesh mesh = testutil::cartesian_mesh(6, 5, 0.25);
    GradientOperators ops = assemble_gradient_ops(mesh);
    const double c = 3.7;
    auto [gx, gy] = apply_with_boundary(ops, mesh, Eigen::VectorXd::Constant(mesh.n_cells(), c),
                                        Eigen::VectorXd::Constant(mesh.n_boundary(), c));
    CHECK(gx.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(gy.cwiseAbs().maxCoeff() < 1e-12);

    // same property on a curvilinear o-mesh
    Mesh omesh = generate_omesh(evaluate_airfoil(CstAirfoil::naca0012(), 33), 64, 16, 12.0, 1.2);
    GradientOperators oops = assemble_gradient_ops(omesh);
    auto [ogx, ogy] =
        apply_with_boundary(oops, omesh, Eigen::VectorXd::Constant(omesh.n_cells(), c),
                            Eigen::VectorXd::Constant(omesh.n_boundary(), c));
    CHECK(ogx.cwiseAbs().maxCoeff() < 1e-10);
    CHECK(ogy.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("linear fields are differentiated exactly with exact face values") {
    Mesh mesh = testutil::cartesian_mesh(8, 7, 0.1);
    GradientOperators ops = assemble_gradient_ops(mesh);
    auto lin = [](double x, double y) { return 2.0 * x - 3.0 * y + 0.5; };
    auto [gx, gy] = apply_with_boundary(ops, mesh, cell_field(mesh, lin),
                                        boundary_field(mesh, lin));
    CHECK((gx.array() - 2.0).abs().maxCoeff() < 1e-10);
    CHECK((gy.array() + 3.0).abs().maxCoeff() < 1e-10);
}

TEST_CASE("quadratic field matches central differences to O(h^2)") {
    auto quad = [](double x, double y) { return x * x + 0.0 * y; };
    double err_coarse = 0.0, err_fine = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        int nx = pass == 0 ? 8 : 16;
        double h = 0.8 / nx;
        Mesh mesh = testutil::cartesian_mesh(nx, 4, h);
        GradientOperators ops = assemble_gradient_ops(mesh);
        auto [gx, gy] = apply_with_boundary(ops, mesh, cell_field(mesh, quad),
                                            boundary_field(mesh, quad));
        // central-difference oracle on interior columns of the same grid
        double err = 0.0;
        for (int j = 0; j < 4; ++j)
            for (int i = 1; i + 1 < nx; ++i) {
                int id = j * nx + i;
                double x = mesh.cell_centers(id, 0);
                double fd = (quad(x + h, 0) - quad(x - h, 0)) / (2.0 * h);
                err = std::max(err, std::abs(gx(id) - fd));
            }
        (pass == 0 ? err_coarse : err_fine) = err;
    }
    // Green-Gauss with arithmetic means is exact for x^2 on a uniform grid,
    // as is the central difference; their gap stays at roundoff
    CHECK(err_coarse < 1e-10);
    CHECK(err_fine < 1e-10);
}

TEST_CASE("sparse action matches the dense oracle") {
    Mesh mesh = generate_omesh(evaluate_airfoil(CstAirfoil::rae2822(), 17), 32, 16, 12.0, 1.25);
    REQUIRE(mesh.n_cells() == 512);
    GradientOperators ops = assemble_gradient_ops(mesh);
    Eigen::MatrixXd dgx, dgy;
    std::vector<BoundaryCoeff> dclosure;
    dense_oracle(mesh, dgx, dgy, dclosure);

    auto f = [](double x, double y) { return std::sin(3.0 * x) * std::cos(2.0 * y) + x; };
    Eigen::VectorXd field = cell_field(mesh, f);
    Eigen::VectorXd bvals = boundary_field(mesh, f);
    auto [gx, gy] = apply_with_boundary(ops, mesh, field, bvals);

    Eigen::VectorXd ox = dgx * field, oy = dgy * field;
    for (int b = 0; b < mesh.n_boundary(); ++b) {
        ox(dclosure[static_cast<std::size_t>(b)].cell) +=
            bvals(b) * dclosure[static_cast<std::size_t>(b)].coeff_x;
        oy(dclosure[static_cast<std::size_t>(b)].cell) +=
            bvals(b) * dclosure[static_cast<std::size_t>(b)].coeff_y;
    }
    double scale = ox.cwiseAbs().maxCoeff();
    CHECK((gx - ox).cwiseAbs().maxCoeff() < 1e-12 * scale);
    CHECK((gy - oy).cwiseAbs().maxCoeff() < 1e-12 * scale);
}

TEST_CASE("operator locality: nonzeros only on the cell and face neighbors") {
    Mesh mesh = testutil::cartesian_mesh(5, 5, 0.2);
    GradientOperators ops = assemble_gradient_ops(mesh);
    std::vector<std::set<int>> adj(static_cast<std::size_t>(mesh.n_cells()));
    for (int i = 0; i < mesh.n_cells(); ++i) adj[static_cast<std::size_t>(i)].insert(i);
    for (const Face& f : mesh.faces)
        if (f.neighbor >= 0) {
            adj[static_cast<std::size_t>(f.owner)].insert(f.neighbor);
            adj[static_cast<std::size_t>(f.neighbor)].insert(f.owner);
        }
    for (int outer = 0; outer < ops.gx.outerSize(); ++outer)
        for (Eigen::SparseMatrix<double>::InnerIterator it(ops.gx, outer); it; ++it)
            CHECK(adj[static_cast<std::size_t>(it.row())].count(static_cast<int>(it.col())) == 1);
}

TEST_CASE("mirrored mesh flips Gy and preserves Gx") {
    Mesh mesh = generate_omesh(evaluate_airfoil(CstAirfoil::rae2822(), 17), 32, 8, 12.0, 1.3);
    Mesh mirror = mesh;
    for (int i = 0; i < mirror.n_cells(); ++i) mirror.cell_centers(i, 1) *= -1.0;
    for (Face& f : mirror.faces) {
        f.ny *= -1.0;
        f.cy *= -1.0;
    }
    mirror.finalize();

    GradientOperators a = assemble_gradient_ops(mesh);
    GradientOperators b = assemble_gradient_ops(mirror);
    CHECK((Eigen::MatrixXd(a.gx) - Eigen::MatrixXd(b.gx)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((Eigen::MatrixXd(a.gy) + Eigen::MatrixXd(b.gy)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("missing boundary value names the patch and face") {
    Mesh mesh = testutil::cartesian_mesh(3, 3, 0.5);
    GradientOperators ops = assemble_gradient_ops(mesh);
    Eigen::VectorXd bvals = Eigen::VectorXd::Zero(mesh.n_boundary());
    bvals(2) = std::nan("");
    CHECK_THROWS_WITH_AS(
        apply_with_boundary(ops, mesh, Eigen::VectorXd::Zero(mesh.n_cells()), bvals),
        doctest::Contains("farfield"), Error);
}

TEST_CASE("zero field and zero boundary values give zero output") {
    Mesh mesh = testutil::cartesian_mesh(4, 4, 0.3);
    GradientOperators ops = assemble_gradient_ops(mesh);
    auto [gx, gy] = apply_with_boundary(ops, mesh, Eigen::VectorXd::Zero(mesh.n_cells()),
                                        Eigen::VectorXd::Zero(mesh.n_boundary()));
    CHECK(gx.cwiseAbs().maxCoeff() == 0.0);
    CHECK(gy.cwiseAbs().maxCoeff() == 0.0);
}

} // TEST_SUITE
