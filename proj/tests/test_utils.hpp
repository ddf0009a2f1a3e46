#pragma once

#include <Eigen/Dense>
#include <random>

#include "liftrom/euler.hpp"
#include "liftrom/mesh.hpp"

namespace testutil {

// Uniform nx x ny Cartesian block of spacing h with a single "farfield"
// boundary, for operator exactness checks.
inline liftrom::Mesh cartesian_mesh(int nx, int ny, double h) {
    liftrom::Mesh mesh;
    const int n = nx * ny;
    mesh.cell_centers.resize(n, 2);
    mesh.cell_volumes.resize(n);
    mesh.patch_names = {"farfield"};
    auto id = [&](int i, int j) { return j * nx + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            mesh.cell_centers(id(i, j), 0) = (i + 0.5) * h;
            mesh.cell_centers(id(i, j), 1) = (j + 0.5) * h;
            mesh.cell_volumes(id(i, j)) = h * h;
        }
    auto face = [&](int owner, int neighbor, double nx_, double ny_, double cx, double cy,
                    int patch) {
        liftrom::Face f;
        f.owner = owner;
        f.neighbor = neighbor;
        f.nx = nx_;
        f.ny = ny_;
        f.area = h;
        f.cx = cx;
        f.cy = cy;
        f.patch = patch;
        mesh.faces.push_back(f);
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i <= nx; ++i) {
            double cx = i * h, cy = (j + 0.5) * h;
            if (i == 0)
                face(id(0, j), -1, -1.0, 0.0, cx, cy, 0);
            else if (i == nx)
                face(id(nx - 1, j), -1, 1.0, 0.0, cx, cy, 0);
            else
                face(id(i - 1, j), id(i, j), 1.0, 0.0, cx, cy, -1);
        }
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < nx; ++i) {
            double cx = (i + 0.5) * h, cy = j * h;
            if (j == 0)
                face(id(i, 0), -1, 0.0, -1.0, cx, cy, 0);
            else if (j == ny)
                face(id(i, ny - 1), -1, 0.0, 1.0, cx, cy, 0);
            else
                face(id(i, j - 1), id(i, j), 0.0, 1.0, cx, cy, -1);
        }
    mesh.finalize();
    return mesh;
}

// Random SPD matrix with prescribed condition number.
inline Eigen::MatrixXd random_spd(int k, double cond, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::MatrixXd a(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) a(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd eig(k);
    for (int i = 0; i < k; ++i) {
        double t = (k == 1) ? 0.0 : static_cast<double>(i) / (k - 1);
        eig(i) = std::pow(cond, t); // eigenvalues from 1 to cond
    }
    return q * eig.asDiagonal() * q.transpose();
}

inline liftrom::Freestream naca_freestream() {
    liftrom::Freestream fs;
    fs.p_inf = 101325.0;
    fs.rho_inf = 1.225;
    fs.a_inf = 340.296;
    fs.mach = 0.6;
    fs.alpha_deg = 2.0;
    fs.gamma = 1.4;
    fs.mu_inf = 1.78e-5;
    return fs;
}

} // namespace testutil

#ifdef LIFTROM_TEST_MINI_SETUP
#include "liftrom/cst.hpp"
#include "liftrom/gradient.hpp"
#include "liftrom/lift.hpp"
#include "liftrom/observables.hpp"
#include "liftrom/pod.hpp"

namespace testutil {

// Small end-to-end training set: NACA family over two coefficients, coarse
// mesh, converged FOM snapshots and the scaled block basis. Built once per
// translation unit.
struct MiniSetup {
    liftrom::Freestream fs;
    std::vector<Eigen::VectorXd> thetas;
    std::vector<liftrom::Mesh> meshes;
    std::vector<liftrom::ObservableVector> snapshots;
    liftrom::BlockBasis basis;
    liftrom::ObservableScales scales;
};

inline const MiniSetup& mini_setup(int count = 8, double energy = 0.9999) {
    static MiniSetup s = [count, energy] {
        MiniSetup m;
        m.fs = naca_freestream();
        m.scales = liftrom::ObservableScales::from(m.fs);
        liftrom::CstAirfoil base = liftrom::CstAirfoil::naca0012();
        m.thetas = liftrom::perturb_family(base, 0.3, count, {1, 4}, 17);
        const int n_wrap = 32, n_radial = 8;
        for (const auto& theta : m.thetas) {
            liftrom::CstAirfoil cst = base.with_active({1, 4}, theta);
            liftrom::AirfoilShape shape = liftrom::evaluate_airfoil(cst, n_wrap / 2 + 1);
            m.meshes.push_back(liftrom::generate_omesh(shape, n_wrap, n_radial, 12.0, 1.3));
            liftrom::FlowState st = liftrom::solve_euler(m.meshes.back(), m.fs, {});
            m.snapshots.push_back(liftrom::state_to_observables(st, m.fs));
        }
        const int n = m.meshes.front().n_cells();
        std::array<liftrom::PodSlice, 8> slices;
        for (int obs = 0; obs < 8; ++obs) {
            Eigen::MatrixXd snaps(n, count);
            for (int c = 0; c < count; ++c)
                snaps.col(c) = m.snapshots[static_cast<std::size_t>(c)][obs] /
                               m.scales.obs[static_cast<std::size_t>(obs)];
            slices[static_cast<std::size_t>(obs)] = liftrom::pod(snaps, energy);
        }
        m.basis = liftrom::assemble_block_basis(slices, m.scales.obs);
        return m;
    }();
    return s;
}

} // namespace testutil
#endif
