#include <doctest.h>

#include <cmath>
#include <random>

#include "liftrom/error.hpp"
#include "liftrom/spd.hpp"
#include "test_utils.hpp"

using namespace liftrom;

TEST_SUITE("spd") {

TEST_CASE("log at the anchor itself is zero") {
    std::mt19937_64 rng(1);
    Eigen::MatrixXd b0 = testutil::random_spd(8, 1e3, rng);
    CHECK(spd_log(b0, b0).cwiseAbs().maxCoeff() < 1e-10 * b0.cwiseAbs().maxCoeff());
}

TEST_CASE("diagonal cases match the scalar log/exp") {
    Eigen::MatrixXd b0 = Eigen::MatrixXd::Identity(2, 2);
    Eigen::MatrixXd b(2, 2);
    b << std::exp(1.0), 0.0, 0.0, 1.0;
    Eigen::MatrixXd t = spd_log(b0, b);
    CHECK(t(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t(1, 1) == doctest::Approx(0.0));
    CHECK(std::abs(t(0, 1)) < 1e-14);

    Eigen::MatrixXd tt(2, 2);
    tt << 1.0, 0.0, 0.0, 0.0;
    Eigen::MatrixXd back = spd_exp(b0, tt);
    CHECK(back(0, 0) == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(back(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("exp of the zero tangent returns the anchor") {
    std::mt19937_64 rng(2);
    Eigen::MatrixXd b0 = testutil::random_spd(10, 1e4, rng);
    Eigen::MatrixXd back = spd_exp(b0, Eigen::MatrixXd::Zero(10, 10));
    CHECK((back - b0).cwiseAbs().maxCoeff() < 1e-10 * b0.cwiseAbs().maxCoeff());
}

TEST_CASE("exp-log round trip on random pairs up to condition 1e6") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        int k = 2 + static_cast<int>(rng() % 49);
        double cond = std::pow(10.0, 1.0 + 5.0 * (trial % 10) / 9.0);
        Eigen::MatrixXd b0 = testutil::random_spd(k, cond, rng);
        Eigen::MatrixXd b = testutil::random_spd(k, cond, rng);
        Eigen::MatrixXd t = spd_log(b0, b);
        CHECK((t - t.transpose()).cwiseAbs().maxCoeff() < 1e-12 * t.cwiseAbs().maxCoeff());
        Eigen::MatrixXd back = spd_exp(b0, t);
        double rel = (back - b).norm() / b.norm();
        CHECK(rel < 1e-8);
    }
}

TEST_CASE("exp output is always positive definite") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        int k = 2 + static_cast<int>(rng() % 20);
        Eigen::MatrixXd b0 = testutil::random_spd(k, 1e5, rng);
        Eigen::MatrixXd t(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) t(i, j) = 3.0 * g(rng);
        t = 0.5 * (t + t.transpose()).eval();
        Eigen::MatrixXd out = spd_exp(b0, t);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out, Eigen::EigenvaluesOnly);
        CHECK(eig.eigenvalues()(0) > 0.0);
    }
}

TEST_CASE("non-positive-definite inputs are rejected with the eigenvalue") {
    Eigen::MatrixXd bad(2, 2);
    bad << 1.0, 0.0, 0.0, -0.5;
    Eigen::MatrixXd good = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_WITH_AS(spd_log(good, bad), doctest::Contains("-0.5"), Error);
    CHECK_THROWS_AS(spd_log(bad, good), Error);
    CHECK_THROWS_AS(spd_exp(bad, good), Error);

    Eigen::MatrixXd asym(2, 2);
    asym << 1.0, 0.5, -0.5, 1.0;
    CHECK_THROWS_AS(spd_log(good, asym), Error);
}

} // TEST_SUITE
