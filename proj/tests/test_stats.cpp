#include <doctest.h>

#include <cmath>
#include <random>

#include "liftrom/error.hpp"
#include "liftrom/stats.hpp"

using namespace liftrom;

TEST_SUITE("stats") {

TEST_CASE("moment summary on a hand-checked sample") {
    std::vector<double> s{1.0, 2.0, 3.0, 4.0};
    SampleStats st = SampleStats::compute(s);
    CHECK(st.mean == doctest::Approx(2.5));
    CHECK(st.median == doctest::Approx(2.5));
    CHECK(st.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-12));
    CHECK(st.skewness == doctest::Approx(0.0));
    // m4/m2^2 with m2 = 1.25, m4 = 2.5625
    CHECK(st.kurtosis == doctest::Approx(2.5625 / (1.25 * 1.25)).epsilon(1e-12));
}

TEST_CASE("normal samples have kurtosis near three (non-excess convention)") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> g(0.0, 2.0);
    std::vector<double> s(20000);
    for (double& v : s) v = g(rng);
    SampleStats st = SampleStats::compute(s);
    CHECK(std::abs(st.kurtosis - 3.0) < 0.15);
    CHECK(std::abs(st.skewness) < 0.1);
}

TEST_CASE("kde integrates to one and peaks at the data") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.3, 0.05);
    std::vector<double> s(4000);
    for (double& v : s) v = g(rng);
    KdeCurve c = kde_gaussian(s, 0.017, 100);
    REQUIRE(c.x.size() == 100);
    CHECK(std::abs(c.integral() - 1.0) < 0.02);
    Eigen::Index peak;
    c.density.maxCoeff(&peak);
    CHECK(std::abs(c.x(peak) - 0.3) < 0.02);
}

TEST_CASE("kde of a single repeated value collapses to the kernel") {
    std::vector<double> s(50, 0.125);
    CHECK(SampleStats::compute(s).stddev == 0.0);
    KdeCurve c = kde_gaussian(s, 0.001, 100);
    CHECK(std::abs(c.integral() - 1.0) < 0.02);
    Eigen::Index peak;
    double pk = c.density.maxCoeff(&peak);
    CHECK(std::abs(c.x(peak) - 0.125) < 1e-3);
    // kernel height 1/(bw sqrt(2 pi))
    CHECK(pk == doctest::Approx(1.0 / (0.001 * std::sqrt(2.0 * M_PI))).epsilon(1e-2));
}

TEST_CASE("guards") {
    CHECK_THROWS_AS(SampleStats::compute({1.0}), Error);
    CHECK_THROWS_AS(kde_gaussian({}, 0.01, 100), Error);
    CHECK_THROWS_AS(kde_gaussian({1.0}, -1.0, 100), Error);
}

} // TEST_SUITE
