#include "liftrom/observables.hpp"

#include <cmath>
#include <fstream>

#include "liftrom/io_util.hpp"

namespace liftrom {

Eigen::VectorXd ObservableVector::stacked() const {
    const int m = n();
    Eigen::VectorXd s(8 * m);
    for (int i = 0; i < 8; ++i) s.segment(i * m, m) = y[static_cast<std::size_t>(i)];
    return s;
}

ObservableVector ObservableVector::from_stacked(const Eigen::VectorXd& s) {
    if (s.size() % 8 != 0) throw Error("ObservableVector: stacked size not divisible by 8");
    const Eigen::Index m = s.size() / 8;
    ObservableVector out;
    for (int i = 0; i < 8; ++i) out.y[static_cast<std::size_t>(i)] = s.segment(i * m, m);
    return out;
}

Eigen::Matrix<double, 8, 1> ObservableVector::freestream_values(const Freestream& fs) {
    double rho = fs.rho_inf, u = fs.u(), v = fs.v(), p = fs.p_inf, g = fs.gamma;
    double rhoE = 0.5 * rho * (u * u + v * v) + p / (g - 1.0);
    double h = rhoE / rho + p / rho;
    Eigen::Matrix<double, 8, 1> y;
    y << rho * u, rho * v, rho * u * v, p, rho * u * u, rho * v * v, rho * u * h, rho * v * h;
    return y;
}

ObservableScales ObservableScales::from(const Freestream& fs) {
    ObservableScales s;
    double rho = fs.rho_inf, vel = fs.speed(), p = fs.p_inf, g = fs.gamma;
    double e_inf = 0.5 * vel * vel + p / (rho * (g - 1.0));
    s.v_inf = vel;
    s.h_inf = e_inf + p / rho;
    s.v2_over_h = vel * vel / s.h_inf;
    double rv = rho * vel;
    double rv2 = rho * vel * vel;
    double rvh = rho * vel * s.h_inf;
    s.obs = {rv, rv, rv2, rv2, rv2, rv2, rvh, rvh};
    s.row = {rv, rv2, rv2, rvh};
    return s;
}

ObservableVector state_to_observables(const FlowState& s, const Freestream& fs) {
    s.validate_positivity();
    const int n = s.n();
    const double g = fs.gamma;
    ObservableVector y;
    for (auto& c : y.y) c.resize(n);
    for (int i = 0; i < n; ++i) {
        double rho = s.rho(i), u = s.u(i), v = s.v(i), p = s.p(i);
        double rhoE = 0.5 * rho * (u * u + v * v) + p / (g - 1.0);
        double h = rhoE / rho + p / rho;
        y[0](i) = rho * u;
        y[1](i) = rho * v;
        y[2](i) = rho * u * v;
        y[3](i) = p;
        y[4](i) = rho * u * u;
        y[5](i) = rho * v * v;
        y[6](i) = rho * u * h;
        y[7](i) = rho * v * h;
    }
    return y;
}

FlowState observables_to_state(const ObservableVector& y, const Freestream& fs,
                               RecoveryReport* report) {
    const int n = y.n();
    for (int i = 1; i < 8; ++i)
        if (y[i].size() != n) throw Error("observables_to_state: component size mismatch");
    const ObservableScales sc = ObservableScales::from(fs);
    const double eps = 1e-8;
    const double f1 = eps * sc.obs[0], f2 = eps * sc.obs[1], f3 = eps * sc.obs[2];
    const double f5 = eps * sc.obs[4], f6 = eps * sc.obs[5];

    FlowState s;
    s.rho.resize(n);
    s.u.resize(n);
    s.v.resize(n);
    s.p.resize(n);
    int guarded = 0;
    for (int i = 0; i < n; ++i) {
        double y1 = y[0](i), y2 = y[1](i), y3 = y[2](i), y4 = y[3](i);
        double y5 = y[4](i), y6 = y[5](i);
        bool hit = false;

        s.p(i) = y4;

        double u;
        if (std::abs(y2) >= f2 && std::abs(y3) >= f3) {
            u = y3 / y2;
        } else if (std::abs(y1) >= f1) {
            u = y5 / y1; // rho u^2 / rho u
            hit = true;
        } else {
            u = 0.0;
            hit = true;
        }

        double v;
        if (std::abs(y1) >= f1 && std::abs(y3) >= f3) {
            v = y3 / y1;
        } else if (std::abs(y2) >= f2) {
            v = y6 / y2; // rho v^2 / rho v
            hit = true;
        } else {
            v = 0.0;
            hit = true;
        }

        // density cascade is sign-aware: a slightly inconsistent prediction
        // can give y1 y2 / y3 the wrong sign at an isolated stagnation cell,
        // where the quadratic identities still recover a positive value
        double rho = 0.0;
        if (std::abs(y3) >= f3) rho = y1 * y2 / y3;
        if (!(rho > 0.0)) {
            hit = true;
            if (std::abs(y5) >= f5 && y5 > 0.0)
                rho = y1 * y1 / y5; // (rho u)^2 / rho u^2
            else if (std::abs(y6) >= f6 && y6 > 0.0)
                rho = y2 * y2 / y6;
            else
                rho = fs.rho_inf;
        }
        if (!(rho > 0.0)) rho = fs.rho_inf;

        if (std::isnan(rho) || std::isnan(u) || std::isnan(v) || std::isnan(y4))
            throw Error("observables_to_state: NaN at cell " + std::to_string(i));
        if (hit) ++guarded;
        s.rho(i) = rho;
        s.u(i) = u;
        s.v(i) = v;
    }
    if (report) {
        report->guarded_cells = guarded;
        report->warning = guarded > n / 100;
    }
    s.validate_positivity();
    return s;
}

void save_snapshot(const std::string& path, const ObservableVector& y,
                   const FlowState& state, const Eigen::VectorXd& theta) {
    const int n = y.n();
    if (state.n() != n) throw Error("save_snapshot: state/observable size mismatch");
    std::ofstream os = io::open_out(path, true);
    os << "liftrom-snap v1 " << n << " O=8\n";
    for (const auto& c : y.y) io::write_vec(os, c);
    io::write_vec(os, state.rho);
    io::write_vec(os, state.u);
    io::write_vec(os, state.v);
    io::write_vec(os, state.p);
    io::write_u64(os, static_cast<std::uint64_t>(theta.size()));
    io::write_vec(os, theta);
    if (!os) throw Error("save_snapshot: write failure on " + path);
}

void load_snapshot(const std::string& path, ObservableVector& y, FlowState& state,
                   Eigen::VectorXd& theta) {
    std::ifstream is = io::open_in(path, true);
    auto toks = io::expect_header(is, "liftrom-snap v1", path);
    if (toks.size() != 2 || toks[1] != "O=8")
        throw Error(path + ": bad snapshot header fields");
    std::size_t n = std::stoul(toks[0]);
    for (auto& c : y.y) c = io::read_vec(is, n, path + " observable");
    state.rho = io::read_vec(is, n, path + " rho");
    state.u = io::read_vec(is, n, path + " u");
    state.v = io::read_vec(is, n, path + " v");
    state.p = io::read_vec(is, n, path + " p");
    std::size_t d = io::read_u64(is, path + " theta size");
    theta = io::read_vec(is, d, path + " theta");
}

} // namespace liftrom
