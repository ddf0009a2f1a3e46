#include "liftrom/euler.hpp"

#include <algorithm>
#include <cmath>

namespace liftrom {

double Freestream::u() const { return speed() * std::cos(alpha_deg * M_PI / 180.0); }
double Freestream::v() const { return speed() * std::sin(alpha_deg * M_PI / 180.0); }

void Freestream::validate() const {
    if (p_inf <= 0 || rho_inf <= 0 || a_inf <= 0 || mach <= 0 || gamma <= 1)
        throw Error("Freestream: non-physical reference values");
    double a2 = gamma * p_inf / rho_inf;
    if (std::abs(a2 - a_inf * a_inf) > 0.01 * a_inf * a_inf)
        throw Error("Freestream: a_inf inconsistent with ideal gas by more than 1%");
}

void FlowState::validate_positivity() const {
    for (int i = 0; i < n(); ++i)
        if (!(rho(i) > 0.0) || !(p(i) > 0.0))
            throw Error("FlowState: non-positive density or pressure at cell " +
                        std::to_string(i));
}

namespace {

struct Cons {
    double r, mu, mv, e; // rho, rho u, rho v, rho E
};

inline Cons to_cons(double rho, double u, double v, double p, double gamma) {
    return {rho, rho * u, rho * v, 0.5 * rho * (u * u + v * v) + p / (gamma - 1.0)};
}

inline void flux_normal(double rho, double u, double v, double p, double e, double nx,
                        double ny, double* out) {
    double un = u * nx + v * ny;
    out[0] = rho * un;
    out[1] = rho * u * un + p * nx;
    out[2] = rho * v * un + p * ny;
    out[3] = (e + p) * un;
}

struct Prim {
    double rho, u, v, p;
};

// characteristic (Riemann-invariant) farfield state; n is the outward normal.
// The freestream sound speed is rebuilt from p/rho so the boundary fixes the
// initialization state exactly (the tabulated a_inf is only 1%-consistent).
Prim farfield_state(const Prim& in, const Freestream& fs, double nx, double ny) {
    const double g = fs.gamma;
    const double uf = fs.u(), vf = fs.v();
    const double af = std::sqrt(g * fs.p_inf / fs.rho_inf);
    const double sf = fs.p_inf / std::pow(fs.rho_inf, g);
    double a_i = std::sqrt(g * in.p / in.rho);
    double un_i = in.u * nx + in.v * ny;
    double un_f = uf * nx + vf * ny;
    if (un_i >= a_i) return in;                              // supersonic outflow
    if (un_f <= -af) return {fs.rho_inf, uf, vf, fs.p_inf};  // supersonic inflow
    double rp = un_i + 2.0 * a_i / (g - 1.0);
    double rm = un_f - 2.0 * af / (g - 1.0);
    double un_b = 0.5 * (rp + rm);
    double a_b = 0.25 * (g - 1.0) * (rp - rm);
    double s, ut_x, ut_y;
    if (un_b > 0.0) {
        s = in.p / std::pow(in.rho, g);
        ut_x = in.u - un_i * nx;
        ut_y = in.v - un_i * ny;
    } else {
        s = sf;
        ut_x = uf - un_f * nx;
        ut_y = vf - un_f * ny;
    }
    Prim b;
    b.rho = std::pow(a_b * a_b / (g * s), 1.0 / (g - 1.0));
    b.p = b.rho * a_b * a_b / g;
    b.u = ut_x + un_b * nx;
    b.v = ut_y + un_b * ny;
    return b;
}

} // namespace

MassFlux farfield_mass_flux(const FlowState& state, const Mesh& mesh, const Freestream& fs) {
    const int far_id = mesh.patch_id("farfield");
    MassFlux out;
    for (const Face& face : mesh.faces) {
        if (face.patch != far_id) continue;
        Prim in{state.rho(face.owner), state.u(face.owner), state.v(face.owner),
                state.p(face.owner)};
        Prim b = farfield_state(in, fs, face.nx, face.ny);
        double flux = b.rho * (b.u * face.nx + b.v * face.ny) * face.area;
        out.net += flux;
        if (flux < 0.0) out.inflow -= flux;
    }
    return out;
}

FlowState solve_euler(const Mesh& mesh, const Freestream& fs, const EulerOptions& opts) {
    fs.validate();
    if (opts.cfl <= 0 || opts.tol <= 0 || opts.max_iters < 1)
        throw Error("solve_euler: bad options");
    const int n = mesh.n_cells();
    const double g = fs.gamma;
    const double uf = fs.u(), vf = fs.v();

    // conservative state, freestream initialization
    Eigen::VectorXd r(n), mu(n), mv(n), e(n);
    {
        Cons c0 = to_cons(fs.rho_inf, uf, vf, fs.p_inf, g);
        r.setConstant(c0.r);
        mu.setConstant(c0.mu);
        mv.setConstant(c0.mv);
        e.setConstant(c0.e);
    }

    Eigen::VectorXd res_r(n), res_mu(n), res_mv(n), res_e(n), wave(n);
    std::vector<double> history;
    history.reserve(256);

    const int wall_id = mesh.patch_id("wall");
    const int far_id = mesh.patch_id("farfield");

    // roundoff floor: a residual at this level means the discrete equations
    // are satisfied to machine precision (uniform-flow preservation)
    double area_scale = 0.0;
    for (const Face& face : mesh.faces) area_scale += face.area * face.area;
    const double res_floor =
        1e-12 * fs.rho_inf * (fs.speed() + fs.a_inf) * std::sqrt(area_scale);

    double res0 = -1.0;
    for (long iter = 0; iter < opts.max_iters; ++iter) {
        res_r.setZero();
        res_mu.setZero();
        res_mv.setZero();
        res_e.setZero();
        wave.setZero();

        for (const Face& face : mesh.faces) {
            const int o = face.owner;
            double rho_o = r(o);
            if (!(rho_o > 0.0))
                throw Error("solve_euler: negative density at cell " + std::to_string(o));
            double u_o = mu(o) / rho_o, v_o = mv(o) / rho_o;
            double p_o = (g - 1.0) * (e(o) - 0.5 * rho_o * (u_o * u_o + v_o * v_o));
            if (!(p_o > 0.0))
                throw Error("solve_euler: negative pressure at cell " + std::to_string(o));
            double a_o = std::sqrt(g * p_o / rho_o);
            double f[4];

            if (face.neighbor >= 0) {
                const int nb = face.neighbor;
                double rho_n = r(nb);
                if (!(rho_n > 0.0))
                    throw Error("solve_euler: negative density at cell " + std::to_string(nb));
                double u_n = mu(nb) / rho_n, v_n = mv(nb) / rho_n;
                double p_n = (g - 1.0) * (e(nb) - 0.5 * rho_n * (u_n * u_n + v_n * v_n));
                if (!(p_n > 0.0))
                    throw Error("solve_euler: negative pressure at cell " + std::to_string(nb));
                double a_n = std::sqrt(g * p_n / rho_n);

                double fl[4], fr[4];
                flux_normal(rho_o, u_o, v_o, p_o, e(o), face.nx, face.ny, fl);
                flux_normal(rho_n, u_n, v_n, p_n, e(nb), face.nx, face.ny, fr);
                double un_o = u_o * face.nx + v_o * face.ny;
                double un_n = u_n * face.nx + v_n * face.ny;
                double lam = std::max(std::abs(un_o) + a_o, std::abs(un_n) + a_n);
                f[0] = 0.5 * (fl[0] + fr[0]) - 0.5 * lam * (rho_n - rho_o);
                f[1] = 0.5 * (fl[1] + fr[1]) - 0.5 * lam * (mu(nb) - mu(o));
                f[2] = 0.5 * (fl[2] + fr[2]) - 0.5 * lam * (mv(nb) - mv(o));
                f[3] = 0.5 * (fl[3] + fr[3]) - 0.5 * lam * (e(nb) - e(o));

                res_r(o) += f[0] * face.area;
                res_mu(o) += f[1] * face.area;
                res_mv(o) += f[2] * face.area;
                res_e(o) += f[3] * face.area;
                res_r(nb) -= f[0] * face.area;
                res_mu(nb) -= f[1] * face.area;
                res_mv(nb) -= f[2] * face.area;
                res_e(nb) -= f[3] * face.area;
                wave(o) += lam * face.area;
                wave(nb) += lam * face.area;
            } else if (face.patch == wall_id) {
                // slip wall: zero normal mass flux, pressure-only momentum flux
                res_mu(o) += p_o * face.nx * face.area;
                res_mv(o) += p_o * face.ny * face.area;
                wave(o) += a_o * face.area;
            } else if (face.patch == far_id) {
                Prim b = farfield_state({rho_o, u_o, v_o, p_o}, fs, face.nx, face.ny);
                double e_b = 0.5 * b.rho * (b.u * b.u + b.v * b.v) + b.p / (g - 1.0);
                flux_normal(b.rho, b.u, b.v, b.p, e_b, face.nx, face.ny, f);
                res_r(o) += f[0] * face.area;
                res_mu(o) += f[1] * face.area;
                res_mv(o) += f[2] * face.area;
                res_e(o) += f[3] * face.area;
                double un_i = u_o * face.nx + v_o * face.ny;
                wave(o) += (std::abs(un_i) + a_o) * face.area;
            } else {
                throw Error("solve_euler: boundary face with unknown patch");
            }
        }

        double res_norm = res_r.norm();
        history.push_back(res_norm);
        if (res0 < 0.0) res0 = res_norm;
        if (res_norm <= opts.tol * res0 || res_norm <= res_floor) break;
        if (iter + 1 == opts.max_iters)
            throw ConvergenceError(
                "solve_euler: no convergence after " + std::to_string(opts.max_iters) +
                    " iterations (residual " + std::to_string(res_norm / res0) + " of initial)",
                history);

        // explicit local-time-step update
        for (int i = 0; i < n; ++i) {
            double dt_v = opts.cfl / wave(i); // dt_i / V_i
            r(i) -= dt_v * res_r(i);
            mu(i) -= dt_v * res_mu(i);
            mv(i) -= dt_v * res_mv(i);
            e(i) -= dt_v * res_e(i);
        }
    }

    FlowState out;
    out.rho = r;
    out.u = mu.cwiseQuotient(r);
    out.v = mv.cwiseQuotient(r);
    out.p.resize(n);
    for (int i = 0; i < n; ++i)
        out.p(i) = (g - 1.0) * (e(i) - 0.5 * (mu(i) * mu(i) + mv(i) * mv(i)) / r(i));
    out.validate_positivity();
    return out;
}

AeroCoeffs aero_coefficients(const FlowState& state, const Mesh& mesh, const Freestream& fs) {
    const auto wall = mesh.patch_ordinals("wall");
    if (wall.empty()) throw Error("aero_coefficients: empty wall patch");
    const double q = fs.dynamic_pressure();

    AeroCoeffs out;
    out.cp.resize(static_cast<Eigen::Index>(wall.size()));
    out.x.resize(static_cast<Eigen::Index>(wall.size()));
    double fx = 0.0, fy = 0.0;
    double xmin = 1e300, xmax = -1e300;
    for (std::size_t j = 0; j < wall.size(); ++j) {
        int fid = mesh.boundary_faces[static_cast<std::size_t>(wall[j])];
        const Face& face = mesh.faces[static_cast<std::size_t>(fid)];
        double pf = state.p(face.owner);
        out.cp(static_cast<Eigen::Index>(j)) = (pf - fs.p_inf) / q;
        out.x(static_cast<Eigen::Index>(j)) = face.cx;
        fx += (pf - fs.p_inf) * face.area * face.nx;
        fy += (pf - fs.p_inf) * face.area * face.ny;
        xmin = std::min(xmin, face.cx);
        xmax = std::max(xmax, face.cx);
    }
    double chord = xmax - xmin;
    if (chord <= 1e-12) throw Error("aero_coefficients: zero chord");
    double ca = std::cos(fs.alpha_deg * M_PI / 180.0);
    double sa = std::sin(fs.alpha_deg * M_PI / 180.0);
    out.cd = (fx * ca + fy * sa) / (q * chord);
    out.cl = (-fx * sa + fy * ca) / (q * chord);
    return out;
}

} // namespace liftrom
