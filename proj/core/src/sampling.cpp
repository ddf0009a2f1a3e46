#include "liftrom/sampling.hpp"

#include <numeric>
#include <random>
#include <vector>

#include "liftrom/error.hpp"

namespace liftrom {

namespace {

// 53-bit uniform in [0,1); avoids distribution objects so streams are
// identical across standard libraries.
double unit_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

} // namespace

Eigen::MatrixXd latin_hypercube(int count, int dims, std::uint64_t seed) {
    if (count < 1) throw Error("latin_hypercube: count must be >= 1");
    if (dims < 1) throw Error("latin_hypercube: dims must be >= 1");
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd pts(count, dims);
    std::vector<int> strata(static_cast<std::size_t>(count));
    for (int d = 0; d < dims; ++d) {
        std::iota(strata.begin(), strata.end(), 0);
        // Fisher-Yates with the deterministic unit_double stream
        for (int i = count - 1; i > 0; --i) {
            int j = static_cast<int>(unit_double(rng) * (i + 1));
            if (j > i) j = i;
            std::swap(strata[static_cast<std::size_t>(i)], strata[static_cast<std::size_t>(j)]);
        }
        for (int i = 0; i < count; ++i) {
            double u = unit_double(rng);
            pts(i, d) = (strata[static_cast<std::size_t>(i)] + u) / count;
        }
    }
    return pts;
}

Eigen::MatrixXd uniform_box(int count, int dims, std::uint64_t seed) {
    if (count < 1) throw Error("uniform_box: count must be >= 1");
    if (dims < 1) throw Error("uniform_box: dims must be >= 1");
    std::mt19937_64 rng(seed);
    Eigen::MatrixXd pts(count, dims);
    for (int i = 0; i < count; ++i)
        for (int d = 0; d < dims; ++d) pts(i, d) = unit_double(rng);
    return pts;
}

} // namespace liftrom
