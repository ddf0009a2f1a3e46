#include "liftrom/rom_db.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "liftrom/io_util.hpp"
#include "liftrom/spd.hpp"

namespace liftrom {

void RomDatabase::validate() const {
    if (m() < 1) throw Error("RomDatabase: empty");
    if (static_cast<int>(instances.size()) != m())
        throw Error("RomDatabase: instance count != M");
    for (const auto& inst : instances)
        if (inst.B.rows() != k() || inst.f.size() != k())
            throw Error("RomDatabase: instance dimension mismatch");
    if (theta_std.size() != d() || theta_mean.size() != d())
        throw Error("RomDatabase: standardization vectors have wrong length");
    if (reduced_snapshots.rows() != k() || reduced_snapshots.cols() != m())
        throw Error("RomDatabase: reduced snapshot matrix has wrong shape");
    // unique parameter rows
    for (int i = 0; i < m(); ++i)
        for (int j = i + 1; j < m(); ++j)
            if ((thetas.row(i) - thetas.row(j)).norm() == 0.0)
                throw Error("RomDatabase: duplicate training parameters at rows " +
                            std::to_string(i) + "," + std::to_string(j));
}

Eigen::VectorXd RomDatabase::standardize(const Eigen::VectorXd& theta) const {
    if (theta.size() != d()) throw Error("RomDatabase: query dimension mismatch");
    Eigen::VectorXd out(d());
    for (int j = 0; j < d(); ++j) {
        double s = theta_std(j);
        out(j) = (s > 0.0) ? (theta(j) - theta_mean(j)) / s : 0.0;
    }
    return out;
}

namespace {

bool warn_zero_std(const RomDatabase& db) {
    for (int j = 0; j < db.d(); ++j)
        if (!(db.theta_std(j) > 0.0)) return true;
    return false;
}

} // namespace

int nearest_anchor(const RomDatabase& db, const Eigen::VectorXd& theta) {
    if (db.m() < 1) throw Error("nearest_anchor: empty database");
    if (warn_zero_std(db)) {
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true))
            std::cerr << "liftrom: warning: zero-variance parameter dimension dropped from "
                         "the anchor metric\n";
    }
    Eigen::VectorXd q = db.standardize(theta);
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < db.m(); ++i) {
        double dist = (db.standardize(db.thetas.row(i).transpose()) - q).norm();
        if (dist < best_d) {
            best_d = dist;
            best = i;
        }
    }
    return best;
}

Eigen::VectorXd initial_guess(const RomDatabase& db, const Eigen::VectorXd& theta,
                              int* index) {
    int i = nearest_anchor(db, theta);
    if (index) *index = i;
    return db.reduced_snapshots.col(i);
}

namespace {

// monomial basis 1, xi_a, xi_a xi_b (a <= b) up to `degree`
int basis_size(int d, int degree) {
    if (degree <= 0) return 1;
    if (degree == 1) return 1 + d;
    return 1 + d + d * (d + 1) / 2;
}

Eigen::VectorXd basis_row(const Eigen::VectorXd& xi, int degree) {
    const int d = static_cast<int>(xi.size());
    Eigen::VectorXd row(basis_size(d, degree));
    int c = 0;
    row(c++) = 1.0;
    if (degree >= 1)
        for (int a = 0; a < d; ++a) row(c++) = xi(a);
    if (degree >= 2)
        for (int a = 0; a < d; ++a)
            for (int b = a; b < d; ++b) row(c++) = xi(a) * xi(b);
    return row;
}

} // namespace

RomInstance interpolate_rom(const RomDatabase& db, const Eigen::VectorXd& theta) {
    db.validate();
    const int M = db.m();
    const int d = db.d();
    const int k = db.k();

    const int anchor = nearest_anchor(db, theta);
    const Eigen::MatrixXd& B0 = db.instances[static_cast<std::size_t>(anchor)].B;

    // neighbor stencil by standardized distance
    Eigen::VectorXd q = db.standardize(theta);
    std::vector<std::pair<double, int>> order;
    order.reserve(static_cast<std::size_t>(M));
    for (int i = 0; i < M; ++i)
        order.emplace_back((db.standardize(db.thetas.row(i).transpose()) - q).norm(), i);
    std::sort(order.begin(), order.end());

    const int m_sten = std::min(M, (d + 1) * (d + 2));
    int degree = 2;
    if (m_sten < basis_size(d, 2)) {
        degree = (m_sten >= basis_size(d, 1)) ? 1 : 0;
        static std::atomic<bool> warned{false};
        if (!warned.exchange(true))
            std::cerr << "liftrom: warning: only " << m_sten
                      << " neighbors, interpolation degree lowered to " << degree << "\n";
    }
    const int nb = basis_size(d, degree);

    Eigen::MatrixXd design(m_sten, nb);
    Eigen::MatrixXd rhs(m_sten, k * k + k); // [vec(Log B) | f~] per neighbor
    for (int r = 0; r < m_sten; ++r) {
        int i = order[static_cast<std::size_t>(r)].second;
        Eigen::VectorXd xi = db.standardize(db.thetas.row(i).transpose()) - q;
        design.row(r) = basis_row(xi, degree).transpose();
        const RomInstance& inst = db.instances[static_cast<std::size_t>(i)];
        Eigen::MatrixXd T = spd_log(B0, inst.B);
        rhs.block(r, 0, 1, k * k) = Eigen::Map<const Eigen::RowVectorXd>(T.data(), k * k);
        rhs.block(r, k * k, 1, k) = inst.f.transpose();
    }

    Eigen::MatrixXd coeff = design.colPivHouseholderQr().solve(rhs);
    // evaluation at xi = 0 picks the constant-term row
    Eigen::VectorXd at_query = coeff.row(0).transpose();

    Eigen::MatrixXd T_query = Eigen::Map<Eigen::MatrixXd>(at_query.data(), k, k);
    T_query = 0.5 * (T_query + T_query.transpose()).eval();

    RomInstance out;
    out.theta = theta;
    out.provenance = RomInstance::Provenance::interpolated;
    out.B = spd_exp(B0, T_query);
    out.f = at_query.tail(k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(out.B, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = eig.eigenvalues()(0);
    if (!(out.min_eigenvalue > 0.0))
        throw Error("interpolate_rom: interpolant lost positive definiteness (min eigenvalue " +
                    std::to_string(out.min_eigenvalue) + ")");
    return out;
}

Prediction predict_full(const RomDatabase& db, const Eigen::VectorXd& y_reduced,
                        const Mesh& mesh) {
    Prediction out;
    ObservableVector y = db.basis.lift(y_reduced);
    out.state = observables_to_state(y, db.fs, &out.recovery);
    out.aero = aero_coefficients(out.state, mesh, db.fs);
    return out;
}

// ---------------------------------------------------------------------------
// persistence
// ---------------------------------------------------------------------------

namespace {

void write_freestream(std::ostream& os, const Freestream& fs) {
    io::write_f64(os, fs.p_inf);
    io::write_f64(os, fs.rho_inf);
    io::write_f64(os, fs.a_inf);
    io::write_f64(os, fs.mach);
    io::write_f64(os, fs.alpha_deg);
    io::write_f64(os, fs.gamma);
    io::write_f64(os, fs.mu_inf);
}

Freestream read_freestream(std::istream& is, const std::string& path) {
    Freestream fs;
    fs.p_inf = io::read_f64(is, path + " fs");
    fs.rho_inf = io::read_f64(is, path + " fs");
    fs.a_inf = io::read_f64(is, path + " fs");
    fs.mach = io::read_f64(is, path + " fs");
    fs.alpha_deg = io::read_f64(is, path + " fs");
    fs.gamma = io::read_f64(is, path + " fs");
    fs.mu_inf = io::read_f64(is, path + " fs");
    return fs;
}

} // namespace

void save_db(const std::string& path, const RomDatabase& db) {
    db.validate();
    const int M = db.m(), d = db.d(), k = db.k(), n = db.basis.n;
    std::ofstream os = io::open_out(path, true);
    os << "liftrom-db v1 " << M << " " << d << " " << k << " " << n << "\n";

    io::write_u64(os, db.config_json.size());
    os.write(db.config_json.data(), static_cast<std::streamsize>(db.config_json.size()));
    write_freestream(os, db.fs);
    io::write_mat(os, db.thetas);
    io::write_vec(os, db.theta_mean);
    io::write_vec(os, db.theta_std);

    for (const RomInstance& inst : db.instances) {
        io::write_vec(os, inst.theta);
        io::write_mat(os, inst.B);
        io::write_vec(os, inst.f);
        io::write_u64(os, inst.provenance == RomInstance::Provenance::interpolated ? 1 : 0);
        io::write_f64(os, inst.min_eigenvalue);
    }

    for (int i = 0; i < 8; ++i) {
        const PodSlice& s = db.basis.slice[static_cast<std::size_t>(i)];
        io::write_u64(os, static_cast<std::uint64_t>(s.k));
        io::write_mat(os, s.phi);
        io::write_u64(os, static_cast<std::uint64_t>(s.singular_values.size()));
        io::write_vec(os, s.singular_values);
        io::write_f64(os, db.basis.scales[static_cast<std::size_t>(i)]);
    }

    io::write_u64(os, db.deim.form == ConstraintForm::cross ? 1 : 0);
    io::write_f64(os, db.deim.v2_over_h);
    io::write_f64(os, db.deim.gamma);
    for (int i = 0; i < 4; ++i) {
        const DeimConstraint& c = db.deim.constraint[static_cast<std::size_t>(i)];
        io::write_u64(os, c.indices.size());
        io::write_ints(os, c.indices);
        io::write_u64(os, static_cast<std::uint64_t>(c.projector.rows()));
        io::write_mat(os, c.projector);
        for (int j = 0; j < 5; ++j) {
            int obs = (j < 4) ? j : 4 + i;
            io::write_u64(os, static_cast<std::uint64_t>(obs));
            io::write_mat(os, c.sampled[static_cast<std::size_t>(obs)]);
        }
        io::write_f64(os, c.condition);
    }

    io::write_mat(os, db.reduced_snapshots);
    if (!os) throw Error("save_db: write failure on " + path);

    // human-readable sidecar
    nlohmann::json j;
    j["file"] = path;
    j["M"] = M;
    j["d"] = d;
    j["k"] = k;
    j["N"] = n;
    for (int i = 0; i < 8; ++i) j["k_per_observable"].push_back(db.basis.k_of(i));
    for (int i = 0; i < 4; ++i) {
        j["deim"][i]["q"] = db.deim.constraint[static_cast<std::size_t>(i)].indices.size();
        j["deim"][i]["condition"] = db.deim.constraint[static_cast<std::size_t>(i)].condition;
    }
    j["constraint_form"] = db.deim.form == ConstraintForm::cross ? "cross" : "quotient";
    std::ofstream side = io::open_out(path + ".json", false);
    side << j.dump(2) << "\n";
}

RomDatabase load_db(const std::string& path) {
    std::ifstream is = io::open_in(path, true);
    auto toks = io::expect_header(is, "liftrom-db v1", path);
    if (toks.size() != 4) throw Error(path + ": bad database header");
    const int M = std::stoi(toks[0]);
    const int d = std::stoi(toks[1]);
    const int k = std::stoi(toks[2]);
    const int n = std::stoi(toks[3]);
    if (M < 1 || d < 1 || k < 1 || n < 1) throw Error(path + ": bad database sizes");

    RomDatabase db;
    std::size_t cfg_len = io::read_u64(is, path + " config length");
    db.config_json.resize(cfg_len);
    if (cfg_len > 0) {
        is.read(db.config_json.data(), static_cast<std::streamsize>(cfg_len));
        if (!is) throw Error(path + ": truncated config blob");
    }
    db.fs = read_freestream(is, path);
    db.thetas = io::read_mat(is, static_cast<std::size_t>(M), static_cast<std::size_t>(d), path + " thetas");
    db.theta_mean = io::read_vec(is, static_cast<std::size_t>(d), path + " theta_mean");
    db.theta_std = io::read_vec(is, static_cast<std::size_t>(d), path + " theta_std");

    db.instances.resize(static_cast<std::size_t>(M));
    for (RomInstance& inst : db.instances) {
        inst.theta = io::read_vec(is, static_cast<std::size_t>(d), path + " inst theta");
        inst.B = io::read_mat(is, static_cast<std::size_t>(k), static_cast<std::size_t>(k), path + " inst B");
        inst.f = io::read_vec(is, static_cast<std::size_t>(k), path + " inst f");
        inst.provenance = io::read_u64(is, path + " provenance") == 1
                              ? RomInstance::Provenance::interpolated
                              : RomInstance::Provenance::snapshot_built;
        inst.min_eigenvalue = io::read_f64(is, path + " min eig");
    }

    std::array<PodSlice, 8> slices;
    std::array<double, 8> scales{};
    for (int i = 0; i < 8; ++i) {
        PodSlice& s = slices[static_cast<std::size_t>(i)];
        s.k = static_cast<int>(io::read_u64(is, path + " basis k"));
        s.phi = io::read_mat(is, static_cast<std::size_t>(n), static_cast<std::size_t>(s.k), path + " basis phi");
        std::size_t nsv = io::read_u64(is, path + " basis sv count");
        s.singular_values = io::read_vec(is, nsv, path + " basis sv");
        scales[static_cast<std::size_t>(i)] = io::read_f64(is, path + " basis scale");
    }
    db.basis = assemble_block_basis(slices, scales);
    if (db.basis.total_k != k) throw Error(path + ": basis size disagrees with header");

    db.deim.form = io::read_u64(is, path + " deim form") == 1 ? ConstraintForm::cross
                                                              : ConstraintForm::quotient;
    db.deim.v2_over_h = io::read_f64(is, path + " deim scale");
    db.deim.gamma = io::read_f64(is, path + " deim gamma");
    for (int i = 0; i < 8; ++i) {
        db.deim.k[static_cast<std::size_t>(i)] = db.basis.k_of(i);
        db.deim.offset[static_cast<std::size_t>(i)] = db.basis.offset[static_cast<std::size_t>(i)];
    }
    db.deim.total_k = db.basis.total_k;
    for (int i = 0; i < 4; ++i) {
        DeimConstraint& c = db.deim.constraint[static_cast<std::size_t>(i)];
        std::size_t q = io::read_u64(is, path + " deim q");
        c.indices = io::read_ints(is, q, path + " deim indices");
        std::size_t prows = io::read_u64(is, path + " deim projector rows");
        c.projector = io::read_mat(is, prows, q, path + " deim projector");
        for (int j = 0; j < 5; ++j) {
            std::size_t obs = io::read_u64(is, path + " deim sampled obs");
            if (obs >= 8) throw Error(path + ": bad sampled observable index");
            c.sampled[obs] = io::read_mat(is, q, static_cast<std::size_t>(db.basis.k_of(static_cast<int>(obs))),
                                          path + " deim sampled");
        }
        c.condition = io::read_f64(is, path + " deim condition");
    }

    db.reduced_snapshots = io::read_mat(is, static_cast<std::size_t>(k), static_cast<std::size_t>(M),
                                        path + " reduced snapshots");
    db.validate();
    return db;
}

} // namespace liftrom
