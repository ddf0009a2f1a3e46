#include "liftrom/ga.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "liftrom/error.hpp"
#include "liftrom/parallel.hpp"

namespace liftrom {

namespace {

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double unit() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    int below(int n) { return std::min(n - 1, static_cast<int>(unit() * n)); }
    double normal() {
        // Box-Muller on the deterministic unit stream
        double u1 = std::max(unit(), 1e-300);
        double u2 = unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }
};

} // namespace

GaResult run_ga(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                const std::function<double(const Eigen::VectorXd&)>& fitness,
                const GaOptions& opts, int jobs) {
    const int d = static_cast<int>(lower.size());
    if (upper.size() != d || d < 1) throw Error("run_ga: bad bounds");
    for (int j = 0; j < d; ++j)
        if (!(lower(j) <= upper(j))) throw Error("run_ga: lower > upper in gene " + std::to_string(j));
    if (opts.population < 2 || opts.elitism < 0 || opts.elitism >= opts.population)
        throw Error("run_ga: bad population/elitism settings");

    Rng rng(opts.seed);
    const Eigen::VectorXd range = upper - lower;

    auto clamp = [&](Eigen::VectorXd& x) {
        for (int j = 0; j < d; ++j) x(j) = std::min(std::max(x(j), lower(j)), upper(j));
    };

    std::vector<Eigen::VectorXd> pop(static_cast<std::size_t>(opts.population));
    for (auto& ind : pop) {
        ind.resize(d);
        for (int j = 0; j < d; ++j) ind(j) = lower(j) + rng.unit() * range(j);
    }

    GaResult result;
    std::vector<double> fit(pop.size(), 0.0);
    long evals = 0;

    auto evaluate = [&](const std::vector<int>& which) {
        parallel_for(static_cast<int>(which.size()), jobs, [&](int t) {
            int i = which[static_cast<std::size_t>(t)];
            fit[static_cast<std::size_t>(i)] = fitness(pop[static_cast<std::size_t>(i)]);
        });
        evals += static_cast<long>(which.size());
    };

    {
        std::vector<int> all(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) all[i] = static_cast<int>(i);
        evaluate(all);
    }

    auto tournament_pick = [&]() -> int {
        int best = rng.below(opts.population);
        for (int t = 1; t < opts.tournament; ++t) {
            int c = rng.below(opts.population);
            if (fit[static_cast<std::size_t>(c)] < fit[static_cast<std::size_t>(best)]) best = c;
        }
        return best;
    };

    for (int gen = 0; gen <= opts.generations; ++gen) {
        // bookkeeping on the current population
        std::vector<int> order(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) order[i] = static_cast<int>(i);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return fit[static_cast<std::size_t>(a)] < fit[static_cast<std::size_t>(b)]; });
        double mean = 0.0;
        for (double f : fit) mean += f;
        mean /= static_cast<double>(fit.size());
        result.history.push_back({gen, fit[static_cast<std::size_t>(order[0])], mean});

        if (gen == opts.generations) break;
        if (evals + (opts.population - opts.elitism) > opts.max_evals) break;

        std::vector<Eigen::VectorXd> next(pop.size());
        for (int e = 0; e < opts.elitism; ++e)
            next[static_cast<std::size_t>(e)] = pop[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])];

        for (int i = opts.elitism; i < opts.population; ++i) {
            const Eigen::VectorXd& pa = pop[static_cast<std::size_t>(tournament_pick())];
            const Eigen::VectorXd& pb = pop[static_cast<std::size_t>(tournament_pick())];
            Eigen::VectorXd child(d);
            for (int j = 0; j < d; ++j) {
                double lo = std::min(pa(j), pb(j));
                double hi = std::max(pa(j), pb(j));
                double w = (hi - lo) * opts.blend_alpha;
                child(j) = (lo - w) + rng.unit() * ((hi + w) - (lo - w));
                if (rng.unit() < opts.mutation_rate)
                    child(j) += rng.normal() * opts.mutation_sigma_frac * range(j);
            }
            clamp(child);
            next[static_cast<std::size_t>(i)] = child;
        }

        // carry elite fitness over, evaluate only the offspring
        std::vector<double> next_fit(pop.size(), 0.0);
        for (int e = 0; e < opts.elitism; ++e)
            next_fit[static_cast<std::size_t>(e)] = fit[static_cast<std::size_t>(order[static_cast<std::size_t>(e)])];
        pop = std::move(next);
        fit = std::move(next_fit);
        std::vector<int> fresh;
        for (int i = opts.elitism; i < opts.population; ++i) fresh.push_back(i);
        evaluate(fresh);
    }

    int best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (fit[i] < fit[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
    result.best_theta = pop[static_cast<std::size_t>(best)];
    result.best_fitness = fit[static_cast<std::size_t>(best)];
    result.evals = evals;
    return result;
}

} // namespace liftrom
