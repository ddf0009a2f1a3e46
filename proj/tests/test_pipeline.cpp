#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "liftrom/pipeline.hpp"
#include "test_utils.hpp"

using namespace liftrom;
namespace fsp = std::filesystem;

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

RunConfig micro_config() {
    RunConfig c;
    c.baseline_name = "naca0012";
    c.baseline = CstAirfoil::naca0012();
    c.active = {1, 4};
    c.fraction = 0.3;
    c.snapshots = 4;
    c.holdout = 1;
    c.lhs_seed = 21;
    c.mesh.n_wrap = 32;
    c.mesh.n_radial = 8;
    c.mesh.far_radius = 12.0;
    c.mesh.stretch = 1.3;
    c.freestream = testutil::naca_freestream();
    c.solver.tol = 1e-8;
    c.ga.ga.population = 6;
    c.ga.ga.generations = 3;
    c.ga.ga.elitism = 1;
    c.ga.ga.max_evals = 40;
    c.ga.ga.seed = 3;
    c.mc.samples = 8;
    c.mc.fom_control = 2;
    c.mc.seed = 6;
    return c;
}

} // namespace

TEST_SUITE("pipeline") {

TEST_CASE("error metrics reproduce the published validation rows") {
    CHECK(round2(scalar_error_pct(0.1912, 0.1889)) == doctest::Approx(1.20));
    CHECK(round2(scalar_error_pct(0.0174, 0.0161)) == doctest::Approx(7.47));
    CHECK(round2(scalar_error_pct(0.0302, 0.0336)) == doctest::Approx(11.26));
    CHECK(scalar_error_pct(0.25, 0.25) == 0.0);

    Eigen::VectorXd cp_fom(3), cp_rom(3);
    cp_fom << 1.0, -2.0, 0.5;
    cp_rom = cp_fom;
    CHECK(cp_error_pct(cp_fom, cp_rom) == 0.0);
    cp_rom(1) = -2.1;
    CHECK(cp_error_pct(cp_fom, cp_rom) == doctest::Approx(0.1 / 2.0 * 100.0));
}

TEST_CASE("configuration schema round trips and validates") {
    RunConfig c = micro_config();
    std::string text = c.to_json();
    RunConfig back = RunConfig::from_json(text);
    CHECK(back.snapshots == c.snapshots);
    CHECK(back.active == c.active);
    CHECK(back.mesh.n_wrap == c.mesh.n_wrap);
    CHECK(back.freestream.mach == c.freestream.mach);
    CHECK(back.ga.ga.population == c.ga.ga.population);
    CHECK(back.mc.kde_bw_cl == c.mc.kde_bw_cl);
    CHECK(back.baseline.coeffs_upper == c.baseline.coeffs_upper);

    CHECK_THROWS_WITH_AS(RunConfig::from_json("{\"schema\": \"other\"}"),
                         doctest::Contains("schema"), Error);
    CHECK_THROWS_AS(RunConfig::from_json("not json"), Error);

    RunConfig bad = c;
    bad.fraction = 1.5;
    CHECK_THROWS_AS(bad.check(), Error);
    bad = c;
    bad.active = {99};
    CHECK_THROWS_AS(bad.check(), Error);
}

TEST_CASE("report on an empty run directory lists the expected files") {
    fsp::create_directories("test_tmp/empty_run");
    try {
        cmd_report("test_tmp/empty_run");
        FAIL("expected an error");
    } catch (const Error& e) {
        std::string msg = e.what();
        CHECK(msg.find("manifest.json") != std::string::npos);
        CHECK(msg.find("kde_cl.csv") != std::string::npos);
        CHECK(msg.find("ga/history.csv") != std::string::npos);
    }
}

TEST_CASE("micro pipeline end to end") {
    const std::string run = "test_tmp/micro_run";
    fsp::remove_all(run);
    RunConfig config = micro_config();

    BuildOutcome build = cmd_build(config, run, 2);
    CHECK(build.built == 4);
    CHECK(build.skipped == 0);
    REQUIRE(build.holdout.size() == 1);
    CHECK(fsp::exists(build.db_path));
    CHECK(fsp::exists(build.surrogate_path));
    CHECK(fsp::exists(run + "/train_family.csv"));
    CHECK(fsp::exists(run + "/manifest.json"));
    CHECK(fsp::exists(run + "/snapshots/snap_000.bin"));
    CHECK(fsp::exists(run + "/meshes/mesh_000.txt"));

    SUBCASE("database invariants") {
        RomDatabase db = load_db(build.db_path);
        db.validate();
        CHECK(db.m() == 4);
        CHECK(db.d() == 2);
        for (const RomInstance& inst : db.instances) {
            CHECK(inst.min_eigenvalue > 0.0);
            CHECK((inst.B - inst.B.transpose()).cwiseAbs().maxCoeff() == 0.0);
        }
    }

    SUBCASE("validate produces per-case artifacts") {
        ErrorReport report = cmd_validate(build.db_path, build.holdout, run, 2);
        REQUIRE(report.pod_proj.size() == 1);
        CHECK(report.pod_proj[0].cp_pct >= 0.0);
        CHECK(report.fom_seconds > 0.0);
        CHECK(fsp::exists(run + "/validate/cp_case_0.csv"));
        CHECK(fsp::exists(run + "/validate/report.json"));
        CHECK(fsp::exists(run + "/validate/solution_case_0.json"));
    }

    SUBCASE("uq produces kde tables and statistics") {
        UqResult uq = cmd_uq(build.db_path, run, 2);
        CHECK(uq.failed_samples <= 2);
        CHECK(std::abs(uq.kde_cl_integral - 1.0) < 0.02);
        CHECK(std::abs(uq.kde_cd_integral - 1.0) < 0.02);
        CHECK(fsp::exists(run + "/uq/kde_cl.csv"));
        CHECK(fsp::exists(run + "/uq/kde_cd.csv"));
        CHECK(fsp::exists(run + "/uq/stats.csv"));
        CHECK(fsp::exists(run + "/uq/samples.csv"));
        // kde files have exactly kde_points data rows
        std::ifstream is(run + "/uq/kde_cl.csv");
        int lines = 0;
        std::string line;
        while (std::getline(is, line)) ++lines;
        CHECK(lines == config.mc.kde_points + 1);
    }

    SUBCASE("inverse design self-target on a tiny budget") {
        // target from the ROM itself at a known interior point
        RomDatabase db = load_db(build.db_path);
        Eigen::VectorXd lower, upper;
        perturb_box(config.baseline, config.fraction, config.active, lower, upper);
        Eigen::VectorXd theta_star = 0.5 * (lower + upper);
        Mesh mesh = mesh_for_theta(config, theta_star);
        RomInstance rom = interpolate_rom(db, theta_star);
        ReducedSolution sol = solve_rom(rom, &db.deim, initial_guess(db, theta_star), config.rom);
        Prediction pred = predict_full(db, sol.y, mesh);

        InverseDesignResult r =
            cmd_inverse_design(build.db_path, pred.aero.x, pred.aero.cp, run, 2);
        CHECK(r.ga.evals <= config.ga.ga.max_evals);
        CHECK(fsp::exists(run + "/ga/history.csv"));
        CHECK(fsp::exists(run + "/ga/best.json"));
        CHECK(fsp::exists(run + "/ga/best_cp.csv"));
    }

    SUBCASE("report collates the artifacts") {
        cmd_validate(build.db_path, build.holdout, run, 2);
        cmd_uq(build.db_path, run, 2);
        cmd_report(run);
        CHECK(fsp::exists(run + "/report/summary.json"));
        CHECK(fsp::exists(run + "/report/cp_case_0.csv"));
        CHECK(fsp::exists(run + "/report/kde_cl.csv"));
    }
}

TEST_CASE("builds are deterministic for a fixed seed") {
    RunConfig config = micro_config();
    config.snapshots = 3;
    config.holdout = 0;
    const std::string run_a = "test_tmp/det_a";
    const std::string run_b = "test_tmp/det_b";
    fsp::remove_all(run_a);
    fsp::remove_all(run_b);
    cmd_build(config, run_a, 2);
    cmd_build(config, run_b, 2);
    auto slurp = [](const std::string& p) {
        std::ifstream is(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(is)),
                           std::istreambuf_iterator<char>());
    };
    CHECK(slurp(run_a + "/train_family.csv") == slurp(run_b + "/train_family.csv"));
    CHECK(slurp(run_a + "/snapshots/snap_000.bin") == slurp(run_b + "/snapshots/snap_000.bin"));
}

} // TEST_SUITE
