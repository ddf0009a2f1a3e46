#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

namespace liftrom {

struct GaOptions {
    int population = 30;
    int generations = 60;
    int tournament = 3;
    int elitism = 2;
    double blend_alpha = 0.5;        ///< BLX-alpha crossover width
    double mutation_rate = 0.1;      ///< per-gene probability
    double mutation_sigma_frac = 0.05; ///< Gaussian sigma as a fraction of the gene range
    long max_evals = 1830;           ///< hard fitness-evaluation budget
    std::uint64_t seed = 0;
};

struct GaGeneration {
    int generation = 0;
    double best = 0.0;
    double mean = 0.0;
};

struct GaResult {
    Eigen::VectorXd best_theta;
    double best_fitness = 0.0;
    std::vector<GaGeneration> history;
    long evals = 0;
};

/// Box-constrained genetic minimizer: tournament selection, blend crossover,
/// per-gene Gaussian mutation, elitism. Every candidate is clamped to
/// [lower, upper]. Deterministic for a given seed; fitness calls may run on
/// `jobs` threads but the genetic operator stream does not depend on them.
GaResult run_ga(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                const std::function<double(const Eigen::VectorXd&)>& fitness,
                const GaOptions& opts, int jobs = 1);

} // namespace liftrom
