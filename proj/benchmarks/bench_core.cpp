// Microbenchmarks for the hot paths: FV assembly, Euler iteration throughput,
// POD, SPD maps, constrained reduced solves and GP prediction.

#include <benchmark/benchmark.h>

#include <random>

#include "liftrom/cst.hpp"
#include "liftrom/deim.hpp"
#include "liftrom/euler.hpp"
#include "liftrom/gradient.hpp"
#include "liftrom/kriging.hpp"
#include "liftrom/lift.hpp"
#include "liftrom/pod.hpp"
#include "liftrom/rom.hpp"
#include "liftrom/spd.hpp"

using namespace liftrom;

namespace {

Freestream freestream() {
    Freestream fs;
    fs.p_inf = 101325.0;
    fs.rho_inf = 1.225;
    fs.a_inf = 340.296;
    fs.mach = 0.6;
    fs.alpha_deg = 2.0;
    return fs;
}

Mesh bench_mesh(int n_wrap, int n_radial) {
    return generate_omesh(evaluate_airfoil(CstAirfoil::naca0012(), n_wrap / 2 + 1), n_wrap,
                          n_radial, 15.0, 1.12);
}

Eigen::MatrixXd random_spd(int k, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd a(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) a(i, j) = g(rng);
    return a * a.transpose() + Eigen::MatrixXd::Identity(k, k);
}

void bm_omesh(benchmark::State& state) {
    AirfoilShape shape = evaluate_airfoil(CstAirfoil::naca0012(), 33);
    for (auto _ : state)
        benchmark::DoNotOptimize(generate_omesh(shape, 64, 32, 15.0, 1.12));
}
BENCHMARK(bm_omesh);

void bm_gradient_assembly(benchmark::State& state) {
    Mesh mesh = bench_mesh(64, 32);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_gradient_ops(mesh));
}
BENCHMARK(bm_gradient_assembly);

void bm_euler_iterations(benchmark::State& state) {
    Mesh mesh = bench_mesh(64, 32);
    Freestream fs = freestream();
    EulerOptions opts;
    opts.max_iters = 200;
    opts.tol = 1e-300; // force exactly max_iters sweeps
    for (auto _ : state) {
        try {
            solve_euler(mesh, fs, opts);
        } catch (const ConvergenceError&) {
            // expected: we only measure the fixed sweep count
        }
    }
    state.SetItemsProcessed(state.iterations() * 200 * mesh.n_cells());
}
BENCHMARK(bm_euler_iterations)->Unit(benchmark::kMillisecond);

void bm_pod(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd snaps(2048, 20);
    for (int i = 0; i < snaps.rows(); ++i)
        for (int j = 0; j < snaps.cols(); ++j) snaps(i, j) = g(rng);
    for (auto _ : state) benchmark::DoNotOptimize(pod(snaps, 0.9999));
}
BENCHMARK(bm_pod);

void bm_spd_roundtrip(benchmark::State& state) {
    std::mt19937_64 rng(2);
    const int k = static_cast<int>(state.range(0));
    Eigen::MatrixXd b0 = random_spd(k, rng);
    Eigen::MatrixXd b = random_spd(k, rng);
    for (auto _ : state) benchmark::DoNotOptimize(spd_exp(b0, spd_log(b0, b)));
}
BENCHMARK(bm_spd_roundtrip)->Arg(20)->Arg(60);

void bm_gp_predict(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd x(20, 2);
    Eigen::VectorXd y(20);
    for (int i = 0; i < 20; ++i) {
        x(i, 0) = g(rng);
        x(i, 1) = g(rng);
        y(i) = std::sin(x(i, 0)) + 0.1 * g(rng);
    }
    GpModel model = fit_gp(x, y, 0.1, 10.0);
    Eigen::VectorXd q(2);
    q << 0.3, -0.2;
    for (auto _ : state) benchmark::DoNotOptimize(gp_predict(model, q));
}
BENCHMARK(bm_gp_predict);

} // namespace

BENCHMARK_MAIN();
