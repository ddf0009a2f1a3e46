// liftrom command-line driver: build / validate / inverse-design / uq / report.
//
// Exit codes: 0 success, 2 validation-threshold failure, 1 any other error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "liftrom/pipeline.hpp"

namespace {

using namespace liftrom;

std::vector<Eigen::VectorXd> load_holdout(const std::string& out_dir) {
    std::vector<int> active;
    return load_family_csv(out_dir + "/holdout.csv", active);
}

void load_target_csv(const std::string& path, Eigen::VectorXd& x, Eigen::VectorXd& cp) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open target C_P file: " + path);
    std::string line;
    if (!std::getline(is, line)) throw Error("empty target C_P file: " + path);
    std::vector<double> xs, cps;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
            throw Error("target C_P file must have two columns x,cp");
        xs.push_back(std::stod(a));
        cps.push_back(std::stod(b));
    }
    if (xs.size() < 2) throw Error("target C_P file needs at least 2 rows");
    x = Eigen::Map<Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    cp = Eigen::Map<Eigen::VectorXd>(cps.data(), static_cast<Eigen::Index>(cps.size()));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"liftrom: non-intrusive lifted reduced-order models for steady parametric "
                 "aerodynamics"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "run", target_path;
    int jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    long seed = -1;
    int mc_samples = -1;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--out", out_dir, "run directory")->capture_default_str();
        cmd->add_option("--jobs", jobs, "worker threads")->capture_default_str();
        cmd->add_option("--seed", seed, "seed override for this command");
    };

    CLI::App* cb = app.add_subcommand("build", "generate snapshots and build the ROM database");
    cb->add_option("--config", config_path, "run configuration JSON")->required();
    add_common(cb);

    CLI::App* cv = app.add_subcommand("validate", "compare ROM and Kriging against fresh FOM "
                                                  "solves at the holdout points");
    add_common(cv);

    CLI::App* ci = app.add_subcommand("inverse-design", "GA search matching a target C_P");
    ci->add_option("--target", target_path, "target C_P CSV (columns x,cp)")->required();
    add_common(ci);

    CLI::App* cu = app.add_subcommand("uq", "Monte Carlo uncertainty quantification");
    cu->add_option("--samples", mc_samples, "Monte Carlo sample count override");
    add_common(cu);

    CLI::App* cr = app.add_subcommand("report", "collate run artifacts into plot data");
    add_common(cr);

    CLI11_PARSE(app, argc, argv);

    try {
        if (cb->parsed()) {
            RunConfig config = RunConfig::load(config_path);
            if (seed >= 0) config.lhs_seed = static_cast<std::uint64_t>(seed);
            BuildOutcome out = cmd_build(config, out_dir, jobs);
            std::cout << "built " << out.built << " snapshots (" << out.skipped
                      << " skipped) in " << out.seconds << " s -> " << out.db_path << "\n";
        } else if (cv->parsed()) {
            ErrorReport report = cmd_validate(out_dir + "/db.liftrom", load_holdout(out_dir),
                                              out_dir, jobs);
            for (std::size_t c = 0; c < report.pod_proj.size(); ++c)
                std::cout << "case " << c << ": cp " << report.pod_proj[c].cp_pct << "% cl "
                          << report.pod_proj[c].cl_pct << "% cd " << report.pod_proj[c].cd_pct
                          << "%\n";
            std::cout << (report.thresholds_met ? "validation thresholds met"
                                                : "validation thresholds NOT met")
                      << "\n";
            if (!report.thresholds_met) return 2;
        } else if (ci->parsed()) {
            Eigen::VectorXd tx, tcp;
            load_target_csv(target_path, tx, tcp);
            std::optional<std::uint64_t> sd;
            if (seed >= 0) sd = static_cast<std::uint64_t>(seed);
            InverseDesignResult out =
                cmd_inverse_design(out_dir + "/db.liftrom", tx, tcp, out_dir, jobs, sd);
            std::cout << "best fitness " << out.best_fitness << " after " << out.ga.evals
                      << " evaluations (" << out.failed_evals << " failed) in " << out.seconds
                      << " s\n";
        } else if (cu->parsed()) {
            std::optional<int> samples;
            if (mc_samples > 0) samples = mc_samples;
            std::optional<std::uint64_t> sd;
            if (seed >= 0) sd = static_cast<std::uint64_t>(seed);
            UqResult out = cmd_uq(out_dir + "/db.liftrom", out_dir, jobs, samples, sd);
            std::cout << "uq: " << out.failed_samples << " failed samples; cl mean "
                      << out.proj_cl.mean << " cd mean " << out.proj_cd.mean << " in "
                      << out.seconds << " s\n";
        } else if (cr->parsed()) {
            cmd_report(out_dir);
            std::cout << "report written to " << out_dir << "/report\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "liftrom: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
