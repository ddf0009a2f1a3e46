#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "liftrom/deim.hpp"
#include "liftrom/error.hpp"
#define LIFTROM_TEST_MINI_SETUP
#include "test_utils.hpp"

using namespace liftrom;

namespace {

Eigen::MatrixXd random_orthonormal(int n, int q, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd a(n, q);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < q; ++j) a(i, j) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    return Eigen::MatrixXd(qr.householderQ()).leftCols(q);
}

// full-order reduced-constraint oracle: Phi_{4+i}^T applied to the scaled
// constraint residual of the lifted observables
Eigen::VectorXd full_order_oracle(const BlockBasis& basis, const Freestream& fs,
                                  const Eigen::VectorXd& y_reduced, ConstraintForm form) {
    ObservableVector y = basis.lift(y_reduced);
    auto h = constraints(y, fs, form);
    const ObservableScales sc = ObservableScales::from(fs);
    Eigen::VectorXd out(basis.k_of(4) + basis.k_of(5) + basis.k_of(6) + basis.k_of(7));
    int row = 0;
    for (int i = 0; i < 4; ++i) {
        Eigen::VectorXd hi = h[static_cast<std::size_t>(i)];
        if (form == ConstraintForm::quotient) hi /= sc.obs[static_cast<std::size_t>(4 + i)];
        out.segment(row, basis.k_of(4 + i)) = basis.phi(4 + i).transpose() * hi;
        row += basis.k_of(4 + i);
    }
    return out;
}

} // namespace

TEST_SUITE("deim") {

TEST_CASE("identity basis selects the leading rows in order") {
    const int q = 5;
    Eigen::MatrixXd X = Eigen::MatrixXd::Identity(20, q);
    std::vector<int> idx = deim_select(X);
    REQUIRE(static_cast<int>(idx.size()) == q);
    for (int j = 0; j < q; ++j) CHECK(idx[static_cast<std::size_t>(j)] == j);
}

TEST_CASE("q = 1 picks the largest-magnitude entry") {
    Eigen::VectorXd col = Eigen::VectorXd::Zero(10);
    col(7) = -0.9;
    col(2) = 0.5;
    std::vector<int> idx = deim_select(col);
    REQUIRE(idx.size() == 1);
    CHECK(idx[0] == 7);
}

TEST_CASE("in-span vectors are reproduced exactly through the sampled projector") {
    const int n = 60, q = 5;
    Eigen::MatrixXd X = random_orthonormal(n, q, 3);
    std::vector<int> idx = deim_select(X);
    Eigen::MatrixXd PtX(q, q);
    for (int r = 0; r < q; ++r) PtX.row(r) = X.row(idx[static_cast<std::size_t>(r)]);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd c(q);
        for (int j = 0; j < q; ++j) c(j) = g(rng);
        Eigen::VectorXd f = X * c;
        Eigen::VectorXd fp(q);
        for (int r = 0; r < q; ++r) fp(r) = f(idx[static_cast<std::size_t>(r)]);
        Eigen::VectorXd approx = X * PtX.fullPivLu().solve(fp);
        CHECK((approx - f).cwiseAbs().maxCoeff() < 1e-10 * f.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("rank-deficient bases are rejected mid-greedy") {
    Eigen::MatrixXd X(10, 2);
    X.col(0) = Eigen::VectorXd::LinSpaced(10, 0.1, 1.0).normalized();
    X.col(1) = 2.0 * X.col(0); // same direction
    CHECK_THROWS_AS(deim_select(X), Error);
}

TEST_CASE("reduced constraints match the full-order oracle on an untruncated basis") {
    // at energy target 1 the nonlinear-term fields lie in the basis span, so
    // the sampled evaluation reproduces the projected full evaluation exactly
    const auto& mini = testutil::mini_setup();
    const int n = mini.meshes.front().n_cells();
    const int count = static_cast<int>(mini.snapshots.size());
    std::array<PodSlice, 8> slices;
    for (int obs = 0; obs < 8; ++obs) {
        Eigen::MatrixXd snaps(n, count);
        for (int c = 0; c < count; ++c)
            snaps.col(c) = mini.snapshots[static_cast<std::size_t>(c)][obs] /
                           mini.scales.obs[static_cast<std::size_t>(obs)];
        slices[static_cast<std::size_t>(obs)] = pod(snaps, 1.0);
    }
    BlockBasis full = assemble_block_basis(slices, mini.scales.obs);
    std::array<int, 4> q{full.k_of(4), full.k_of(5), full.k_of(6), full.k_of(7)};

    for (ConstraintForm form : {ConstraintForm::cross, ConstraintForm::quotient}) {
        DeimData dd = build_deim(full, q, form, mini.fs);
        CHECK(dd.m() == q[0] + q[1] + q[2] + q[3]);
        for (std::size_t s = 0; s < mini.snapshots.size(); ++s) {
            Eigen::VectorXd yr = full.reduce(mini.snapshots[s]);
            Eigen::VectorXd h = deim_constraint(dd, yr);
            Eigen::VectorXd oracle = full_order_oracle(full, mini.fs, yr, form);
            double onorm = std::max(oracle.cwiseAbs().maxCoeff(), 1.0);
            CHECK((h - oracle).cwiseAbs().maxCoeff() < 1e-6 * onorm);
            // snapshots are consistent, so the reduced residual is tiny
            CHECK(h.cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("truncated-basis constraints stay at the truncation scale") {
    const auto& mini = testutil::mini_setup();
    std::array<int, 4> q{mini.basis.k_of(4), mini.basis.k_of(5), mini.basis.k_of(6),
                         mini.basis.k_of(7)};
    DeimData dd = build_deim(mini.basis, q, ConstraintForm::cross, mini.fs);
    for (std::size_t s = 0; s < mini.snapshots.size(); ++s) {
        Eigen::VectorXd yr = mini.basis.reduce(mini.snapshots[s]);
        CHECK(deim_constraint(dd, yr).cwiseAbs().maxCoeff() < 5e-2);
    }
}

TEST_CASE("analytic Jacobians match finite differences") {
    const auto& mini = testutil::mini_setup();
    std::array<int, 4> q{mini.basis.k_of(4), mini.basis.k_of(5), mini.basis.k_of(6),
                         mini.basis.k_of(7)};
    Eigen::VectorXd yr = mini.basis.reduce(mini.snapshots[2]);

    for (ConstraintForm form : {ConstraintForm::cross, ConstraintForm::quotient}) {
        DeimData dd = build_deim(mini.basis, q, form, mini.fs);
        Eigen::MatrixXd J = deim_constraint_jacobian(dd, yr);
        const double h = 1e-6;
        for (int col = 0; col < yr.size(); col += 3) {
            Eigen::VectorXd plus = yr, minus = yr;
            plus(col) += h;
            minus(col) -= h;
            Eigen::VectorXd fd = (deim_constraint(dd, plus) - deim_constraint(dd, minus)) / (2 * h);
            CHECK((J.col(col) - fd).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, fd.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("error against the oracle does not grow as q increases") {
    // full-rank basis, slightly perturbed training states: the residual is
    // nonzero and its hyper-reduced evaluation converges to the oracle
    const auto& mini = testutil::mini_setup();
    const int n = mini.meshes.front().n_cells();
    const int count = static_cast<int>(mini.snapshots.size());
    std::array<PodSlice, 8> slices;
    for (int obs = 0; obs < 8; ++obs) {
        Eigen::MatrixXd snaps(n, count);
        for (int c = 0; c < count; ++c)
            snaps.col(c) = mini.snapshots[static_cast<std::size_t>(c)][obs] /
                           mini.scales.obs[static_cast<std::size_t>(obs)];
        slices[static_cast<std::size_t>(obs)] = pod(snaps, 1.0);
    }
    BlockBasis full = assemble_block_basis(slices, mini.scales.obs);
    int kmin = std::min(std::min(full.k_of(4), full.k_of(5)),
                        std::min(full.k_of(6), full.k_of(7)));
    if (kmin < 2) return; // nothing to sweep at this training size

    // at this smoke scale only the qualitative trend is meaningful; the
    // acceptance suite enforces the 90% step criterion at full resolution
    int non_increasing = 0, steps = 0;
    std::mt19937_64 prng(100);
    std::normal_distribution<double> pg(0.0, 1.0);
    for (int s = 0; s < 4; ++s) {
        Eigen::VectorXd yr0 = full.reduce(mini.snapshots[static_cast<std::size_t>(s)]);
        Eigen::VectorXd noise(yr0.size());
        for (Eigen::Index z = 0; z < yr0.size(); ++z) noise(z) = pg(prng);
        Eigen::VectorXd yp = yr0 + 0.03 * noise * yr0.norm() / noise.norm();
        Eigen::VectorXd oracle = full_order_oracle(full, mini.fs, yp, ConstraintForm::cross);
        double prev = -1.0, first = -1.0, last = 0.0;
        for (int qq = 1; qq <= kmin; ++qq) {
            DeimData dd = build_deim(full, {qq, qq, qq, qq}, ConstraintForm::cross, mini.fs);
            double err = (deim_constraint(dd, yp) - oracle).norm();
            if (first < 0.0) first = err;
            last = err;
            if (prev >= 0.0) {
                ++steps;
                if (err <= prev) ++non_increasing;
            }
            prev = err;
        }
        CHECK(last < first); // net decay per target
    }
    CHECK(non_increasing * 4 >= steps * 3);
}

TEST_CASE("interpolation conditioning is recorded") {
    const auto& mini = testutil::mini_setup();
    DeimData dd = build_deim(mini.basis,
                             {mini.basis.k_of(4), mini.basis.k_of(5), mini.basis.k_of(6),
                              mini.basis.k_of(7)},
                             ConstraintForm::cross, mini.fs);
    for (int i = 0; i < 4; ++i) {
        CHECK(dd.constraint[static_cast<std::size_t>(i)].condition >= 1.0);
        CHECK(std::isfinite(dd.constraint[static_cast<std::size_t>(i)].condition));
        // indices distinct and in range
        std::set<int> seen;
        for (int idx : dd.constraint[static_cast<std::size_t>(i)].indices) {
            CHECK(idx >= 0);
            CHECK(idx < mini.basis.n);
            CHECK(seen.insert(idx).second);
        }
    }
}

} // TEST_SUITE
