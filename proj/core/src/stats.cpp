#include "liftrom/stats.hpp"

#include <algorithm>
#include <cmath>

#include "liftrom/error.hpp"

namespace liftrom {

SampleStats SampleStats::compute(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 2) throw Error("SampleStats: need at least 2 samples");
    SampleStats s;
    double sum = 0.0;
    for (double x : samples) sum += x;
    s.mean = sum / static_cast<double>(n);

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    s.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : samples) {
        double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    double nn = static_cast<double>(n);
    s.stddev = std::sqrt(m2 / (nn - 1.0));
    m2 /= nn;
    m3 /= nn;
    m4 /= nn;
    if (m2 > 0.0) {
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
    }
    return s;
}

double KdeCurve::integral() const {
    double acc = 0.0;
    for (Eigen::Index i = 1; i < x.size(); ++i)
        acc += 0.5 * (density(i) + density(i - 1)) * (x(i) - x(i - 1));
    return acc;
}

KdeCurve kde_gaussian(const std::vector<double>& samples, double bandwidth, int points) {
    if (samples.empty()) throw Error("kde_gaussian: no samples");
    double lo = samples[0], hi = samples[0];
    for (double v : samples) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return kde_gaussian_range(samples, bandwidth, points, lo - 4.0 * bandwidth,
                              hi + 4.0 * bandwidth);
}

KdeCurve kde_gaussian_range(const std::vector<double>& samples, double bandwidth, int points,
                            double lo, double hi) {
    if (samples.empty()) throw Error("kde_gaussian: no samples");
    if (bandwidth <= 0.0) throw Error("kde_gaussian: bandwidth must be > 0");
    if (points < 2) throw Error("kde_gaussian: need at least 2 grid points");
    if (!(hi > lo)) throw Error("kde_gaussian: empty grid range");

    KdeCurve c;
    c.x.resize(points);
    c.density.resize(points);
    const double norm = 1.0 / (static_cast<double>(samples.size()) * bandwidth *
                               std::sqrt(2.0 * M_PI));
    for (int i = 0; i < points; ++i) {
        double x = lo + (hi - lo) * i / (points - 1);
        double acc = 0.0;
        for (double v : samples) {
            double z = (x - v) / bandwidth;
            acc += std::exp(-0.5 * z * z);
        }
        c.x(i) = x;
        c.density(i) = norm * acc;
    }
    return c;
}

} // namespace liftrom
