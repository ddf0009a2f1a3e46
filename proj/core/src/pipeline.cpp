#include "liftrom/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>

#include <nlohmann/json.hpp>

#include "liftrom/io_util.hpp"
#include "liftrom/parallel.hpp"
#include "liftrom/sampling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace liftrom {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd from_std(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// All writers of a run directory funnel through one manifest: each command
// loads, appends its record, saves.
class Manifest {
public:
    explicit Manifest(const std::string& run_dir) : path_(run_dir + "/manifest.json") {
        std::ifstream is(path_);
        if (is) {
            try {
                is >> j_;
            } catch (...) {
                j_ = json::object();
            }
        }
        if (!j_.contains("records")) j_["records"] = json::array();
    }

    void record(const std::string& command, const json& payload) {
        std::lock_guard<std::mutex> lk(mu_);
        json rec;
        rec["command"] = command;
        rec["payload"] = payload;
        j_["records"].push_back(rec);
    }

    void save() {
        std::lock_guard<std::mutex> lk(mu_);
        std::ofstream os = io::open_out(path_, false);
        os << j_.dump(2) << "\n";
    }

private:
    std::string path_;
    json j_;
    std::mutex mu_;
};

} // namespace

// ---------------------------------------------------------------------------
// configuration
// ---------------------------------------------------------------------------

void RunConfig::check() const {
    baseline.validate();
    if (active.empty()) throw Error("config: active coefficient set is empty");
    for (int idx : active)
        if (idx < 0 || idx >= 2 * (baseline.order + 1))
            throw Error("config: active coefficient index out of range");
    if (fraction < 0.0 || fraction >= 1.0) throw Error("config: fraction must be in [0,1)");
    if (snapshots < 1) throw Error("config: snapshots must be >= 1");
    if (holdout < 0) throw Error("config: holdout must be >= 0");
    if (mesh.n_wrap < 32 || mesh.n_wrap % 2 != 0)
        throw Error("config: mesh.n_wrap must be even and >= 32");
    if (mesh.n_radial < 8) throw Error("config: mesh.n_radial must be >= 8");
    if (mesh.far_radius < 10.0) throw Error("config: mesh.far_radius must be >= 10");
    if (mesh.stretch <= 0.0) throw Error("config: mesh.stretch must be > 0");
    freestream.validate();
    if (energy_target <= 0.0 || energy_target > 1.0)
        throw Error("config: energy_target must be in (0,1]");
    if (solver.cfl <= 0.0 || solver.tol <= 0.0 || solver.max_iters < 1)
        throw Error("config: bad solver options");
    if (rom.obj_tol <= 0.0 || rom.con_tol <= 0.0 || rom.max_evals < 1)
        throw Error("config: bad rom options");
    if (ga.ga.population < 2 || ga.ga.generations < 1) throw Error("config: bad ga options");
    if (mc.samples < 1 || mc.kde_points < 2 || mc.kde_bw_cd <= 0.0 || mc.kde_bw_cl <= 0.0)
        throw Error("config: bad mc options");
    if (mc.fom_control < 0 || mc.fom_control > mc.samples)
        throw Error("config: mc.fom_control must be in [0, samples]");
}

std::string RunConfig::to_json() const {
    json j;
    j["schema"] = "liftrom-config v1";
    j["baseline"]["name"] = baseline_name;
    j["baseline"]["n1"] = baseline.n1;
    j["baseline"]["n2"] = baseline.n2;
    j["baseline"]["order"] = baseline.order;
    j["baseline"]["upper"] = to_std(baseline.coeffs_upper);
    j["baseline"]["lower"] = to_std(baseline.coeffs_lower);
    j["active_coeffs"] = active;
    j["fraction"] = fraction;
    j["snapshots"] = snapshots;
    j["holdout"] = holdout;
    j["lhs_seed"] = lhs_seed;
    j["mesh"] = {{"n_wrap", mesh.n_wrap},
                 {"n_radial", mesh.n_radial},
                 {"far_radius", mesh.far_radius},
                 {"stretch", mesh.stretch}};
    j["freestream"] = {{"p_inf", freestream.p_inf},   {"rho_inf", freestream.rho_inf},
                       {"a_inf", freestream.a_inf},   {"mach", freestream.mach},
                       {"alpha_deg", freestream.alpha_deg}, {"gamma", freestream.gamma},
                       {"mu_inf", freestream.mu_inf}};
    j["energy_target"] = energy_target;
    j["solver"] = {{"cfl", solver.cfl}, {"max_iters", solver.max_iters}, {"tol", solver.tol}};
    j["rom"] = {{"obj_tol", rom.obj_tol},
                {"con_tol", rom.con_tol},
                {"max_evals", rom.max_evals},
                {"max_iters", rom.max_iters},
                {"constraint_form",
                 constraint_form == ConstraintForm::cross ? "cross" : "quotient"}};
    j["ga"] = {{"population", ga.ga.population},
               {"generations", ga.ga.generations},
               {"tournament", ga.ga.tournament},
               {"elitism", ga.ga.elitism},
               {"blend_alpha", ga.ga.blend_alpha},
               {"mutation_rate", ga.ga.mutation_rate},
               {"mutation_sigma_frac", ga.ga.mutation_sigma_frac},
               {"max_evals", ga.ga.max_evals},
               {"seed", ga.ga.seed},
               {"obj_tol", ga.obj_tol},
               {"con_tol", ga.con_tol}};
    j["mc"] = {{"samples", mc.samples},         {"seed", mc.seed},
               {"fom_control", mc.fom_control}, {"kde_points", mc.kde_points},
               {"kde_bw_cd", mc.kde_bw_cd},     {"kde_bw_cl", mc.kde_bw_cl}};
    j["validate"] = {{"cp_max_pct", thresholds.cp_max_pct},
                     {"cp_mean_pct", thresholds.cp_mean_pct},
                     {"cl_pct", thresholds.cl_pct},
                     {"cl_pass_min", thresholds.cl_pass_min}};
    return j.dump(2);
}

RunConfig RunConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw Error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.contains("schema") || j["schema"] != "liftrom-config v1")
        throw Error("config: missing or unsupported schema (want 'liftrom-config v1')");

    RunConfig c;
    const json& jb = j.at("baseline");
    c.baseline_name = jb.value("name", "custom");
    if (c.baseline_name == "naca0012" && !jb.contains("upper")) {
        c.baseline = CstAirfoil::naca0012();
    } else if (c.baseline_name == "rae2822" && !jb.contains("upper")) {
        c.baseline = CstAirfoil::rae2822();
    } else {
        c.baseline.n1 = jb.value("n1", 0.5);
        c.baseline.n2 = jb.value("n2", 1.0);
        c.baseline.order = jb.at("order").get<int>();
        c.baseline.coeffs_upper = from_std(jb.at("upper").get<std::vector<double>>());
        c.baseline.coeffs_lower = from_std(jb.at("lower").get<std::vector<double>>());
    }
    c.active = j.at("active_coeffs").get<std::vector<int>>();
    c.fraction = j.value("fraction", 0.3);
    c.snapshots = j.value("snapshots", 20);
    c.holdout = j.value("holdout", 3);
    c.lhs_seed = j.value("lhs_seed", std::uint64_t{42});
    if (j.contains("mesh")) {
        const json& m = j["mesh"];
        c.mesh.n_wrap = m.value("n_wrap", 64);
        c.mesh.n_radial = m.value("n_radial", 32);
        c.mesh.far_radius = m.value("far_radius", 15.0);
        c.mesh.stretch = m.value("stretch", 1.12);
    }
    if (j.contains("freestream")) {
        const json& f = j["freestream"];
        c.freestream.p_inf = f.value("p_inf", 101325.0);
        c.freestream.rho_inf = f.value("rho_inf", 1.225);
        c.freestream.a_inf = f.value("a_inf", 340.296);
        c.freestream.mach = f.value("mach", 0.6);
        c.freestream.alpha_deg = f.value("alpha_deg", 2.0);
        c.freestream.gamma = f.value("gamma", 1.4);
        c.freestream.mu_inf = f.value("mu_inf", 0.0);
    }
    c.energy_target = j.value("energy_target", 0.9999);
    if (j.contains("solver")) {
        const json& s = j["solver"];
        c.solver.cfl = s.value("cfl", 0.8);
        c.solver.max_iters = s.value("max_iters", 200000L);
        c.solver.tol = s.value("tol", 1e-8);
    }
    if (j.contains("rom")) {
        const json& r = j["rom"];
        c.rom.obj_tol = r.value("obj_tol", 1e-6);
        c.rom.con_tol = r.value("con_tol", 1e-6);
        c.rom.max_evals = r.value("max_evals", 4000000L);
        c.rom.max_iters = r.value("max_iters", 200);
        c.constraint_form = r.value("constraint_form", std::string("cross")) == "quotient"
                                ? ConstraintForm::quotient
                                : ConstraintForm::cross;
    }
    if (j.contains("ga")) {
        const json& g = j["ga"];
        c.ga.ga.population = g.value("population", 30);
        c.ga.ga.generations = g.value("generations", 60);
        c.ga.ga.tournament = g.value("tournament", 3);
        c.ga.ga.elitism = g.value("elitism", 2);
        c.ga.ga.blend_alpha = g.value("blend_alpha", 0.5);
        c.ga.ga.mutation_rate = g.value("mutation_rate", 0.1);
        c.ga.ga.mutation_sigma_frac = g.value("mutation_sigma_frac", 0.05);
        c.ga.ga.max_evals = g.value("max_evals", 1830L);
        c.ga.ga.seed = g.value("seed", std::uint64_t{7});
        c.ga.obj_tol = g.value("obj_tol", 1e-3);
        c.ga.con_tol = g.value("con_tol", 1e-5);
    }
    if (j.contains("mc")) {
        const json& m = j["mc"];
        c.mc.samples = m.value("samples", 500);
        c.mc.seed = m.value("seed", std::uint64_t{2024});
        c.mc.fom_control = m.value("fom_control", 50);
        c.mc.kde_points = m.value("kde_points", 100);
        c.mc.kde_bw_cd = m.value("kde_bw_cd", 0.001);
        c.mc.kde_bw_cl = m.value("kde_bw_cl", 0.017);
    }
    if (j.contains("validate")) {
        const json& v = j["validate"];
        c.thresholds.cp_max_pct = v.value("cp_max_pct", 10.0);
        c.thresholds.cp_mean_pct = v.value("cp_mean_pct", 5.0);
        c.thresholds.cl_pct = v.value("cl_pct", 5.0);
        c.thresholds.cl_pass_min = v.value("cl_pass_min", 2);
    }
    c.check();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream is = io::open_in(path, false);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    return from_json(text);
}

void RunConfig::save(const std::string& path) const {
    std::ofstream os = io::open_out(path, false);
    os << to_json() << "\n";
}

RunConfig config_of_db(const RomDatabase& db) {
    if (db.config_json.empty()) throw Error("database carries no configuration blob");
    return RunConfig::from_json(db.config_json);
}

Mesh mesh_for_theta(const RunConfig& config, const Eigen::VectorXd& theta) {
    CstAirfoil cst = config.baseline.with_active(config.active, theta);
    AirfoilShape shape = evaluate_airfoil(cst, config.mesh.n_wrap / 2 + 1);
    return generate_omesh(shape, config.mesh.n_wrap, config.mesh.n_radial,
                          config.mesh.far_radius, config.mesh.stretch);
}

// ---------------------------------------------------------------------------
// error metrics
// ---------------------------------------------------------------------------

double cp_error_pct(const Eigen::VectorXd& cp_fom, const Eigen::VectorXd& cp_rom) {
    if (cp_fom.size() != cp_rom.size()) throw Error("cp_error_pct: size mismatch");
    double denom = cp_fom.lpNorm<Eigen::Infinity>();
    if (denom == 0.0) throw Error("cp_error_pct: zero reference C_P");
    return (cp_fom - cp_rom).lpNorm<Eigen::Infinity>() / denom * 100.0;
}

double scalar_error_pct(double fom, double rom) {
    if (fom == 0.0) throw Error("scalar_error_pct: zero reference value");
    return std::abs(fom - rom) / std::abs(fom) * 100.0;
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

namespace {

struct PointData {
    Eigen::VectorXd theta;
    Mesh mesh;
    ObservableVector y;
    bool ok = false;
    std::string error;
};

} // namespace

BuildOutcome cmd_build(const RunConfig& config, const std::string& out_dir, int jobs) {
    config.check();
    const double t_start = now_seconds();
    fs::create_directories(out_dir);
    fs::create_directories(out_dir + "/snapshots");
    fs::create_directories(out_dir + "/meshes");
    Manifest manifest(out_dir);
    config.save(out_dir + "/config.json");

    const int total = config.snapshots + config.holdout;
    std::vector<Eigen::VectorXd> family =
        perturb_family(config.baseline, config.fraction, total, config.active, config.lhs_seed);
    std::vector<Eigen::VectorXd> train(family.begin(), family.begin() + config.snapshots);
    std::vector<Eigen::VectorXd> holdout(family.begin() + config.snapshots, family.end());
    save_family_csv(out_dir + "/train_family.csv", config.active, train);
    if (!holdout.empty()) save_family_csv(out_dir + "/holdout.csv", config.active, holdout);

    // FOM snapshots
    double t_fom = now_seconds();
    std::vector<PointData> points(train.size());
    parallel_for(static_cast<int>(train.size()), jobs, [&](int i) {
        PointData& pd = points[static_cast<std::size_t>(i)];
        pd.theta = train[static_cast<std::size_t>(i)];
        try {
            pd.mesh = mesh_for_theta(config, pd.theta);
            FlowState state = solve_euler(pd.mesh, config.freestream, config.solver);
            pd.y = state_to_observables(state, config.freestream);
            char name[64];
            std::snprintf(name, sizeof(name), "/snapshots/snap_%03d.bin", i);
            save_snapshot(out_dir + name, pd.y, state, pd.theta);
            std::snprintf(name, sizeof(name), "/meshes/mesh_%03d.txt", i);
            save_mesh(out_dir + name, pd.mesh);
            pd.ok = true;
        } catch (const std::exception& e) {
            pd.ok = false;
            pd.error = e.what();
        }
    });
    t_fom = now_seconds() - t_fom;

    std::vector<const PointData*> built;
    json skips = json::array();
    for (const PointData& pd : points) {
        if (pd.ok)
            built.push_back(&pd);
        else
            skips.push_back({{"theta", to_std(pd.theta)}, {"error", pd.error}});
    }
    const int skipped = static_cast<int>(points.size() - built.size());
    if (built.empty() || skipped > static_cast<int>(points.size()) / 5)
        throw Error("cmd_build: " + std::to_string(skipped) + " of " +
                    std::to_string(points.size()) + " snapshots failed (over 20%)");

    // POD on freestream-scaled snapshots
    double t_pod = now_seconds();
    const ObservableScales scales = ObservableScales::from(config.freestream);
    const int n = built.front()->mesh.n_cells();
    const int M = static_cast<int>(built.size());
    std::array<PodSlice, 8> slices;
    parallel_for(8, jobs, [&](int obs) {
        Eigen::MatrixXd snaps(n, M);
        for (int c = 0; c < M; ++c)
            snaps.col(c) = built[static_cast<std::size_t>(c)]->y[obs] /
                           scales.obs[static_cast<std::size_t>(obs)];
        slices[static_cast<std::size_t>(obs)] = pod(snaps, config.energy_target);
    });
    std::array<double, 8> scale_arr = scales.obs;
    BlockBasis basis = assemble_block_basis(slices, scale_arr);
    save_basis(out_dir + "/basis.bin", basis);
    t_pod = now_seconds() - t_pod;

    // DEIM with q = k of the corresponding nonlinear observable
    std::array<int, 4> q{basis.k_of(4), basis.k_of(5), basis.k_of(6), basis.k_of(7)};
    DeimData deim = build_deim(basis, q, config.constraint_form, config.freestream);

    // per-point lifted assembly and projection
    double t_proj = now_seconds();
    std::vector<RomInstance> instances(built.size());
    Eigen::MatrixXd reduced(basis.total_k, M);
    parallel_for(M, jobs, [&](int i) {
        const PointData& pd = *built[static_cast<std::size_t>(i)];
        GradientOperators ops = assemble_gradient_ops(pd.mesh);
        LiftedSystem sys = assemble_lifted(ops, config.freestream, pd.mesh);
        sys.theta = pd.theta;
        Eigen::VectorXd f = sys.extract_rhs(pd.y);
        instances[static_cast<std::size_t>(i)] = project(sys, basis, scales, f);
        reduced.col(i) = basis.reduce(pd.y);
    });
    t_proj = now_seconds() - t_proj;

    // database assembly
    RomDatabase db;
    db.thetas.resize(M, static_cast<int>(config.active.size()));
    for (int i = 0; i < M; ++i) db.thetas.row(i) = built[static_cast<std::size_t>(i)]->theta.transpose();
    db.theta_mean = db.thetas.colwise().mean();
    db.theta_std.resize(db.thetas.cols());
    for (int jcol = 0; jcol < db.thetas.cols(); ++jcol) {
        double m0 = db.theta_mean(jcol);
        double acc = 0.0;
        for (int i = 0; i < M; ++i) acc += (db.thetas(i, jcol) - m0) * (db.thetas(i, jcol) - m0);
        db.theta_std(jcol) = (M > 1) ? std::sqrt(acc / (M - 1)) : 0.0;
    }
    db.instances = std::move(instances);
    db.basis = basis;
    db.deim = deim;
    db.reduced_snapshots = reduced;
    db.fs = config.freestream;
    db.config_json = config.to_json();

    BuildOutcome out;
    out.db_path = out_dir + "/db.liftrom";
    out.surrogate_path = out.db_path + ".gp";
    save_db(out.db_path, db);

    double t_krig = now_seconds();
    PodKrigSurrogate surrogate = fit_pod_krig(db);
    save_surrogate(out.surrogate_path, surrogate);
    t_krig = now_seconds() - t_krig;

    out.built = M;
    out.skipped = skipped;
    out.holdout = holdout;
    out.seconds = now_seconds() - t_start;

    json payload;
    payload["config"] = json::parse(config.to_json());
    payload["built"] = M;
    payload["skipped"] = skips;
    payload["timings"] = {{"fom", t_fom},
                          {"pod", t_pod},
                          {"projection", t_proj},
                          {"kriging", t_krig},
                          {"total", out.seconds}};
    payload["artifacts"] = {out.db_path, out.surrogate_path, out_dir + "/basis.bin",
                            out_dir + "/train_family.csv"};
    for (int i = 0; i < 8; ++i) payload["k_per_observable"].push_back(basis.k_of(i));
    manifest.record("build", payload);
    manifest.save();
    return out;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

ErrorReport cmd_validate(const std::string& db_path,
                         const std::vector<Eigen::VectorXd>& holdout,
                         const std::string& out_dir, int jobs) {
    if (holdout.empty()) throw Error("cmd_validate: empty holdout list");
    RomDatabase db = load_db(db_path);
    PodKrigSurrogate surrogate = load_surrogate(db_path + ".gp");
    RunConfig config = config_of_db(db);
    fs::create_directories(out_dir + "/validate");
    Manifest manifest(out_dir);

    const int cases = static_cast<int>(holdout.size());
    ErrorReport report;
    report.pod_proj.resize(static_cast<std::size_t>(cases));
    report.pod_krig.resize(static_cast<std::size_t>(cases));
    report.fom_cl.resize(static_cast<std::size_t>(cases));
    report.fom_cd.resize(static_cast<std::size_t>(cases));
    report.proj_cl.resize(static_cast<std::size_t>(cases));
    report.proj_cd.resize(static_cast<std::size_t>(cases));
    report.krig_cl.resize(static_cast<std::size_t>(cases));
    report.krig_cd.resize(static_cast<std::size_t>(cases));

    std::vector<double> fom_sec(static_cast<std::size_t>(cases), 0.0);
    std::vector<double> rom_sec(static_cast<std::size_t>(cases), 0.0);

    parallel_for(cases, jobs, [&](int c) {
        const Eigen::VectorXd& theta = holdout[static_cast<std::size_t>(c)];
        Mesh mesh = mesh_for_theta(config, theta);

        double t0 = now_seconds();
        FlowState fom_state = solve_euler(mesh, config.freestream, config.solver);
        fom_sec[static_cast<std::size_t>(c)] = now_seconds() - t0;
        AeroCoeffs fom = aero_coefficients(fom_state, mesh, config.freestream);

        t0 = now_seconds();
        RomInstance rom = interpolate_rom(db, theta);
        int init_id = -1;
        Eigen::VectorXd init = initial_guess(db, theta, &init_id);
        ReducedSolution sol = solve_rom(rom, &db.deim, init, config.rom);
        sol.init_index = init_id;
        Prediction proj = predict_full(db, sol.y, mesh);
        rom_sec[static_cast<std::size_t>(c)] = now_seconds() - t0;

        Prediction krig = pod_krig_predict(surrogate, db, theta, mesh);

        report.fom_cl[static_cast<std::size_t>(c)] = fom.cl;
        report.fom_cd[static_cast<std::size_t>(c)] = fom.cd;
        report.proj_cl[static_cast<std::size_t>(c)] = proj.aero.cl;
        report.proj_cd[static_cast<std::size_t>(c)] = proj.aero.cd;
        report.krig_cl[static_cast<std::size_t>(c)] = krig.aero.cl;
        report.krig_cd[static_cast<std::size_t>(c)] = krig.aero.cd;
        report.pod_proj[static_cast<std::size_t>(c)] = {
            cp_error_pct(fom.cp, proj.aero.cp), scalar_error_pct(fom.cl, proj.aero.cl),
            scalar_error_pct(fom.cd, proj.aero.cd)};
        report.pod_krig[static_cast<std::size_t>(c)] = {
            cp_error_pct(fom.cp, krig.aero.cp), scalar_error_pct(fom.cl, krig.aero.cl),
            scalar_error_pct(fom.cd, krig.aero.cd)};

        char name[64];
        std::snprintf(name, sizeof(name), "/validate/cp_case_%d.csv", c);
        io::CsvWriter csv(out_dir + name, {"x", "cp_fom", "cp_rom", "cp_krig"});
        for (Eigen::Index r = 0; r < fom.cp.size(); ++r)
            csv.row({fom.x(r), fom.cp(r), proj.aero.cp(r), krig.aero.cp(r)});

        std::snprintf(name, sizeof(name), "/validate/solution_case_%d.json", c);
        save_solution(out_dir + name, sol, theta);
    });

    double cp_max = 0.0, cp_sum = 0.0;
    int cl_ok = 0;
    for (int c = 0; c < cases; ++c) {
        cp_max = std::max(cp_max, report.pod_proj[static_cast<std::size_t>(c)].cp_pct);
        cp_sum += report.pod_proj[static_cast<std::size_t>(c)].cp_pct;
        if (report.pod_proj[static_cast<std::size_t>(c)].cl_pct <= config.thresholds.cl_pct)
            ++cl_ok;
        report.fom_seconds += fom_sec[static_cast<std::size_t>(c)] / cases;
        report.rom_seconds += rom_sec[static_cast<std::size_t>(c)] / cases;
    }
    report.thresholds_met = cp_max <= config.thresholds.cp_max_pct &&
                            cp_sum / cases <= config.thresholds.cp_mean_pct &&
                            cl_ok >= std::min(config.thresholds.cl_pass_min, cases);

    json payload;
    payload["cases"] = cases;
    payload["cp_max_pct"] = cp_max;
    payload["cp_mean_pct"] = cp_sum / cases;
    payload["cl_within_threshold"] = cl_ok;
    payload["thresholds_met"] = report.thresholds_met;
    payload["fom_seconds_mean"] = report.fom_seconds;
    payload["rom_seconds_mean"] = report.rom_seconds;
    for (int c = 0; c < cases; ++c) {
        json row;
        row["theta"] = to_std(holdout[static_cast<std::size_t>(c)]);
        row["pod_proj"] = {{"cp_pct", report.pod_proj[static_cast<std::size_t>(c)].cp_pct},
                           {"cl_pct", report.pod_proj[static_cast<std::size_t>(c)].cl_pct},
                           {"cd_pct", report.pod_proj[static_cast<std::size_t>(c)].cd_pct}};
        row["pod_krig"] = {{"cp_pct", report.pod_krig[static_cast<std::size_t>(c)].cp_pct},
                           {"cl_pct", report.pod_krig[static_cast<std::size_t>(c)].cl_pct},
                           {"cd_pct", report.pod_krig[static_cast<std::size_t>(c)].cd_pct}};
        row["fom"] = {{"cl", report.fom_cl[static_cast<std::size_t>(c)]},
                      {"cd", report.fom_cd[static_cast<std::size_t>(c)]}};
        payload["cases_detail"].push_back(row);
    }
    {
        std::ofstream os = io::open_out(out_dir + "/validate/report.json", false);
        os << payload.dump(2) << "\n";
    }
    manifest.record("validate", payload);
    manifest.save();
    return report;
}

// ---------------------------------------------------------------------------
// inverse design
// ---------------------------------------------------------------------------

namespace {

// resamples (x_src, cp_src) onto x_dst; both traverse TE -> LE -> TE, so each
// half is monotone in x and interpolated on its own
Eigen::VectorXd resample_cp(const Eigen::VectorXd& x_src, const Eigen::VectorXd& cp_src,
                            const Eigen::VectorXd& x_dst) {
    if (x_src.size() == x_dst.size() && (x_src - x_dst).lpNorm<Eigen::Infinity>() < 1e-9)
        return cp_src;
    auto interp_half = [](const std::vector<std::pair<double, double>>& pts, double x) {
        if (pts.size() < 2) return pts.empty() ? 0.0 : pts.front().second;
        if (x <= pts.front().first) return pts.front().second;
        if (x >= pts.back().first) return pts.back().second;
        for (std::size_t i = 1; i < pts.size(); ++i) {
            if (x <= pts[i].first) {
                double w = (x - pts[i - 1].first) / (pts[i].first - pts[i - 1].first);
                return (1.0 - w) * pts[i - 1].second + w * pts[i].second;
            }
        }
        return pts.back().second;
    };
    // split source at the leading edge (x minimum)
    Eigen::Index le = 0;
    x_src.minCoeff(&le);
    std::vector<std::pair<double, double>> upper, lower;
    for (Eigen::Index i = 0; i <= le; ++i) upper.emplace_back(x_src(i), cp_src(i));
    for (Eigen::Index i = le; i < x_src.size(); ++i) lower.emplace_back(x_src(i), cp_src(i));
    std::sort(upper.begin(), upper.end());
    std::sort(lower.begin(), lower.end());

    Eigen::Index le_dst = 0;
    x_dst.minCoeff(&le_dst);
    Eigen::VectorXd out(x_dst.size());
    for (Eigen::Index i = 0; i < x_dst.size(); ++i)
        out(i) = (i <= le_dst) ? interp_half(upper, x_dst(i)) : interp_half(lower, x_dst(i));
    return out;
}

} // namespace

InverseDesignResult cmd_inverse_design(const std::string& db_path,
                                       const Eigen::VectorXd& target_x,
                                       const Eigen::VectorXd& target_cp,
                                       const std::string& out_dir, int jobs,
                                       std::optional<std::uint64_t> seed_override) {
    if (target_x.size() != target_cp.size() || target_x.size() < 2)
        throw Error("cmd_inverse_design: bad target C_P table");
    const double t_start = now_seconds();
    RomDatabase db = load_db(db_path);
    RunConfig config = config_of_db(db);
    if (seed_override) config.ga.ga.seed = *seed_override;
    fs::create_directories(out_dir + "/ga");
    Manifest manifest(out_dir);

    Eigen::VectorXd lower, upper;
    perturb_box(config.baseline, config.fraction, config.active, lower, upper);

    // reference wall stations (identical across shapes: psi grid is fixed)
    Mesh ref_mesh = mesh_for_theta(config, db.thetas.row(0).transpose());
    AeroCoeffs ref;
    {
        auto wall = ref_mesh.patch_ordinals("wall");
        ref.x.resize(static_cast<Eigen::Index>(wall.size()));
        for (std::size_t i = 0; i < wall.size(); ++i) {
            int fid = ref_mesh.boundary_faces[static_cast<std::size_t>(wall[i])];
            ref.x(static_cast<Eigen::Index>(i)) = ref_mesh.faces[static_cast<std::size_t>(fid)].cx;
        }
    }
    Eigen::VectorXd cp_star = resample_cp(target_x, target_cp, ref.x);

    RomSolveOptions inner = config.rom;
    inner.obj_tol = config.ga.obj_tol;
    inner.con_tol = config.ga.con_tol;

    std::atomic<int> failures{0};
    auto fitness = [&](const Eigen::VectorXd& theta) -> double {
        try {
            RomInstance rom = interpolate_rom(db, theta);
            Eigen::VectorXd init = initial_guess(db, theta);
            ReducedSolution sol = solve_rom(rom, &db.deim, init, inner);
            Mesh mesh = mesh_for_theta(config, theta);
            Prediction pred = predict_full(db, sol.y, mesh);
            return 0.5 * (pred.aero.cp - cp_star).squaredNorm();
        } catch (const std::exception&) {
            failures.fetch_add(1);
            return 1e12;
        }
    };

    GaResult ga = run_ga(lower, upper, fitness, config.ga.ga, jobs);

    InverseDesignResult out;
    out.best_theta = ga.best_theta;
    out.best_fitness = ga.best_fitness;
    out.ga = ga;
    out.failed_evals = failures.load();
    out.seconds = now_seconds() - t_start;

    {
        io::CsvWriter csv(out_dir + "/ga/history.csv", {"generation", "best", "mean"});
        for (const GaGeneration& g : ga.history)
            csv.row({static_cast<double>(g.generation), g.best, g.mean});
    }
    {
        // best design C_P overlay
        RomInstance rom = interpolate_rom(db, ga.best_theta);
        ReducedSolution sol =
            solve_rom(rom, &db.deim, initial_guess(db, ga.best_theta), inner);
        Mesh mesh = mesh_for_theta(config, ga.best_theta);
        Prediction pred = predict_full(db, sol.y, mesh);
        io::CsvWriter csv(out_dir + "/ga/best_cp.csv", {"x", "cp_target", "cp_best"});
        for (Eigen::Index r = 0; r < cp_star.size(); ++r)
            csv.row({ref.x(r), cp_star(r), pred.aero.cp(r)});
    }
    json payload;
    payload["best_theta"] = to_std(ga.best_theta);
    payload["best_fitness"] = ga.best_fitness;
    payload["evals"] = ga.evals;
    payload["failed_evals"] = out.failed_evals;
    payload["seconds"] = out.seconds;
    {
        std::ofstream os = io::open_out(out_dir + "/ga/best.json", false);
        os << payload.dump(2) << "\n";
    }
    manifest.record("inverse-design", payload);
    manifest.save();
    return out;
}

// ---------------------------------------------------------------------------
// uncertainty quantification
// ---------------------------------------------------------------------------

UqResult cmd_uq(const std::string& db_path, const std::string& out_dir, int jobs,
                std::optional<int> samples_override,
                std::optional<std::uint64_t> seed_override) {
    const double t_start = now_seconds();
    RomDatabase db = load_db(db_path);
    PodKrigSurrogate surrogate = load_surrogate(db_path + ".gp");
    RunConfig config = config_of_db(db);
    if (samples_override) config.mc.samples = *samples_override;
    if (seed_override) config.mc.seed = *seed_override;
    config.check();
    fs::create_directories(out_dir + "/uq");
    Manifest manifest(out_dir);

    Eigen::VectorXd lower, upper;
    perturb_box(config.baseline, config.fraction, config.active, lower, upper);
    const int d = static_cast<int>(config.active.size());
    const int ns = config.mc.samples;
    Eigen::MatrixXd unit = uniform_box(ns, d, config.mc.seed);

    struct SampleOut {
        bool ok = false;
        double cl_p = 0, cd_p = 0, cl_k = 0, cd_k = 0;
    };
    std::vector<SampleOut> rows(static_cast<std::size_t>(ns));

    parallel_for(ns, jobs, [&](int i) {
        Eigen::VectorXd theta =
            lower.array() + unit.row(i).transpose().array() * (upper - lower).array();
        SampleOut& r = rows[static_cast<std::size_t>(i)];
        try {
            Mesh mesh = mesh_for_theta(config, theta);
            RomInstance rom = interpolate_rom(db, theta);
            ReducedSolution sol = solve_rom(rom, &db.deim, initial_guess(db, theta), config.rom);
            Prediction proj = predict_full(db, sol.y, mesh);
            Prediction krig = pod_krig_predict(surrogate, db, theta, mesh);
            r.cl_p = proj.aero.cl;
            r.cd_p = proj.aero.cd;
            r.cl_k = krig.aero.cl;
            r.cd_k = krig.aero.cd;
            r.ok = true;
        } catch (const std::exception&) {
            r.ok = false;
        }
    });

    // FOM control subset on the leading samples
    const int nctl = std::min(config.mc.fom_control, ns);
    std::vector<double> fom_cl(static_cast<std::size_t>(nctl), 0.0);
    std::vector<double> fom_cd(static_cast<std::size_t>(nctl), 0.0);
    std::vector<char> fom_ok(static_cast<std::size_t>(nctl), 0);
    parallel_for(nctl, jobs, [&](int i) {
        Eigen::VectorXd theta =
            lower.array() + unit.row(i).transpose().array() * (upper - lower).array();
        try {
            Mesh mesh = mesh_for_theta(config, theta);
            FlowState state = solve_euler(mesh, config.freestream, config.solver);
            AeroCoeffs aero = aero_coefficients(state, mesh, config.freestream);
            fom_cl[static_cast<std::size_t>(i)] = aero.cl;
            fom_cd[static_cast<std::size_t>(i)] = aero.cd;
            fom_ok[static_cast<std::size_t>(i)] = 1;
        } catch (const std::exception&) {
            fom_ok[static_cast<std::size_t>(i)] = 0;
        }
    });

    UqResult out;
    std::vector<double> pcl, pcd, kcl, kcd;
    for (const SampleOut& r : rows) {
        if (!r.ok) {
            ++out.failed_samples;
            continue;
        }
        pcl.push_back(r.cl_p);
        pcd.push_back(r.cd_p);
        kcl.push_back(r.cl_k);
        kcd.push_back(r.cd_k);
    }
    if (pcl.size() < 2) throw Error("cmd_uq: too few successful samples");
    out.proj_cl = SampleStats::compute(pcl);
    out.proj_cd = SampleStats::compute(pcd);
    out.krig_cl = SampleStats::compute(kcl);
    out.krig_cd = SampleStats::compute(kcd);

    std::vector<double> ctl_fom_cl, ctl_fom_cd;
    int paired = 0;
    for (int i = 0; i < nctl; ++i) {
        if (!fom_ok[static_cast<std::size_t>(i)] || !rows[static_cast<std::size_t>(i)].ok) continue;
        ++paired;
        ctl_fom_cl.push_back(fom_cl[static_cast<std::size_t>(i)]);
        ctl_fom_cd.push_back(fom_cd[static_cast<std::size_t>(i)]);
        out.control_fom_cl_mean += fom_cl[static_cast<std::size_t>(i)];
        out.control_fom_cd_mean += fom_cd[static_cast<std::size_t>(i)];
        out.control_proj_cl_mean += rows[static_cast<std::size_t>(i)].cl_p;
        out.control_proj_cd_mean += rows[static_cast<std::size_t>(i)].cd_p;
        out.control_krig_cl_mean += rows[static_cast<std::size_t>(i)].cl_k;
        out.control_krig_cd_mean += rows[static_cast<std::size_t>(i)].cd_k;
    }
    if (paired > 0) {
        out.control_fom_cl_mean /= paired;
        out.control_fom_cd_mean /= paired;
        out.control_proj_cl_mean /= paired;
        out.control_proj_cd_mean /= paired;
        out.control_krig_cl_mean /= paired;
        out.control_krig_cd_mean /= paired;
    }
    if (ctl_fom_cl.size() >= 2) {
        out.fom_cl = SampleStats::compute(ctl_fom_cl);
        out.fom_cd = SampleStats::compute(ctl_fom_cd);
    }

    // KDE curves on shared grids
    auto range_of = [](std::initializer_list<const std::vector<double>*> sets, double bw,
                       double& lo, double& hi) {
        lo = 1e300;
        hi = -1e300;
        for (const auto* s : sets)
            for (double v : *s) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        lo -= 4.0 * bw;
        hi += 4.0 * bw;
    };
    double lo, hi;
    range_of({&pcl, &kcl, &ctl_fom_cl}, config.mc.kde_bw_cl, lo, hi);
    KdeCurve kde_cl_p = kde_gaussian_range(pcl, config.mc.kde_bw_cl, config.mc.kde_points, lo, hi);
    KdeCurve kde_cl_k = kde_gaussian_range(kcl, config.mc.kde_bw_cl, config.mc.kde_points, lo, hi);
    range_of({&pcd, &kcd, &ctl_fom_cd}, config.mc.kde_bw_cd, lo, hi);
    KdeCurve kde_cd_p = kde_gaussian_range(pcd, config.mc.kde_bw_cd, config.mc.kde_points, lo, hi);
    KdeCurve kde_cd_k = kde_gaussian_range(kcd, config.mc.kde_bw_cd, config.mc.kde_points, lo, hi);
    out.kde_cl_integral = kde_cl_p.integral();
    out.kde_cd_integral = kde_cd_p.integral();

    {
        io::CsvWriter csv(out_dir + "/uq/kde_cl.csv", {"cl", "pod_proj", "pod_krig"});
        for (int i = 0; i < config.mc.kde_points; ++i)
            csv.row({kde_cl_p.x(i), kde_cl_p.density(i), kde_cl_k.density(i)});
    }
    {
        io::CsvWriter csv(out_dir + "/uq/kde_cd.csv", {"cd", "pod_proj", "pod_krig"});
        for (int i = 0; i < config.mc.kde_points; ++i)
            csv.row({kde_cd_p.x(i), kde_cd_p.density(i), kde_cd_k.density(i)});
    }
    {
        io::CsvWriter csv(out_dir + "/uq/samples.csv",
                          {"index", "cl_pod_proj", "cd_pod_proj", "cl_pod_krig", "cd_pod_krig",
                           "ok"});
        for (int i = 0; i < ns; ++i) {
            const SampleOut& r = rows[static_cast<std::size_t>(i)];
            csv.row({static_cast<double>(i), r.cl_p, r.cd_p, r.cl_k, r.cd_k,
                     r.ok ? 1.0 : 0.0});
        }
    }
    {
        // five-row statistics table in the paper's layout
        io::CsvWriter csv(out_dir + "/uq/stats.csv",
                          {"statistic", "cl_pod_proj", "cl_pod_krig", "cl_fom", "cd_pod_proj",
                           "cd_pod_krig", "cd_fom"});
        auto row = [&](const std::string& name, auto pick) {
            std::vector<std::string> r{name};
            auto fmt = [&](double v) { return io::fmt17(v); };
            r.push_back(fmt(pick(out.proj_cl)));
            r.push_back(fmt(pick(out.krig_cl)));
            r.push_back(out.fom_cl ? fmt(pick(*out.fom_cl)) : "");
            r.push_back(fmt(pick(out.proj_cd)));
            r.push_back(fmt(pick(out.krig_cd)));
            r.push_back(out.fom_cd ? fmt(pick(*out.fom_cd)) : "");
            csv.row_mixed(r);
        };
        row("mean", [](const SampleStats& s) { return s.mean; });
        row("median", [](const SampleStats& s) { return s.median; });
        row("std_dev", [](const SampleStats& s) { return s.stddev; });
        row("skewness", [](const SampleStats& s) { return s.skewness; });
        row("kurtosis", [](const SampleStats& s) { return s.kurtosis; });
    }

    out.seconds = now_seconds() - t_start;
    json payload;
    payload["samples"] = ns;
    payload["failed"] = out.failed_samples;
    payload["fom_control"] = paired;
    payload["kde_cl_integral"] = out.kde_cl_integral;
    payload["kde_cd_integral"] = out.kde_cd_integral;
    payload["control_means"] = {{"fom_cl", out.control_fom_cl_mean},
                                {"fom_cd", out.control_fom_cd_mean},
                                {"proj_cl", out.control_proj_cl_mean},
                                {"proj_cd", out.control_proj_cd_mean},
                                {"krig_cl", out.control_krig_cl_mean},
                                {"krig_cd", out.control_krig_cd_mean}};
    payload["seconds"] = out.seconds;
    {
        std::ofstream os = io::open_out(out_dir + "/uq/summary.json", false);
        os << payload.dump(2) << "\n";
    }
    manifest.record("uq", payload);
    manifest.save();
    return out;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

void cmd_report(const std::string& run_dir) {
    const std::vector<std::string> expected = {
        "manifest.json",          "validate/report.json", "uq/kde_cl.csv", "uq/kde_cd.csv",
        "uq/stats.csv",           "uq/samples.csv",       "uq/summary.json",
        "ga/history.csv",         "ga/best.json",         "ga/best_cp.csv"};

    std::vector<std::string> present;
    for (const std::string& rel : expected)
        if (fs::exists(run_dir + "/" + rel)) present.push_back(rel);
    // per-case validate CSVs
    std::vector<std::string> cp_cases;
    if (fs::exists(run_dir + "/validate")) {
        for (const auto& e : fs::directory_iterator(run_dir + "/validate")) {
            std::string name = e.path().filename().string();
            if (name.rfind("cp_case_", 0) == 0 && name.size() > 4 &&
                name.substr(name.size() - 4) == ".csv")
                cp_cases.push_back("validate/" + name);
        }
    }

    if (present.empty() && cp_cases.empty()) {
        std::string msg = "cmd_report: no run artifacts under '" + run_dir +
                          "'; expected files include:";
        for (const std::string& rel : expected) msg += "\n  " + rel;
        throw Error(msg);
    }

    fs::create_directories(run_dir + "/report");
    json summary;
    summary["run_dir"] = run_dir;
    for (const std::string& rel : cp_cases) {
        fs::copy_file(run_dir + "/" + rel, run_dir + "/report/" + fs::path(rel).filename().string(),
                      fs::copy_options::overwrite_existing);
        summary["cp_curves"].push_back(fs::path(rel).filename().string());
    }
    for (const std::string& rel : present) {
        if (rel.size() > 4 && rel.substr(rel.size() - 4) == ".csv") {
            fs::copy_file(run_dir + "/" + rel,
                          run_dir + "/report/" + fs::path(rel).filename().string(),
                          fs::copy_options::overwrite_existing);
            summary["tables"].push_back(fs::path(rel).filename().string());
        } else if (rel != "manifest.json") {
            std::ifstream is(run_dir + "/" + rel);
            try {
                json j;
                is >> j;
                summary[fs::path(rel).parent_path().filename().string()] = j;
            } catch (...) {
                // leave malformed artifacts out of the summary
            }
        }
    }
    std::ofstream os = io::open_out(run_dir + "/report/summary.json", false);
    os << summary.dump(2) << "\n";

    Manifest manifest(run_dir);
    json payload;
    payload["collected"] = present;
    payload["cp_curves"] = cp_cases;
    manifest.record("report", payload);
    manifest.save();
}

} // namespace liftrom
