#include "liftrom/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "liftrom/error.hpp"
#include "liftrom/io_util.hpp"

namespace liftrom {

int Mesh::patch_id(const std::string& name) const {
    for (std::size_t i = 0; i < patch_names.size(); ++i)
        if (patch_names[i] == name) return static_cast<int>(i);
    return -1;
}

std::vector<int> Mesh::patch_ordinals(const std::string& name) const {
    int id = patch_id(name);
    std::vector<int> out;
    for (int b = 0; b < n_boundary(); ++b)
        if (faces[static_cast<std::size_t>(boundary_faces[static_cast<std::size_t>(b)])].patch == id)
            out.push_back(b);
    return out;
}

void Mesh::finalize() {
    const int nc = n_cells();
    if (cell_volumes.size() != nc) throw Error("Mesh: volume/center count mismatch");
    for (int i = 0; i < nc; ++i)
        if (!(cell_volumes(i) > 0.0))
            throw Error("Mesh: non-positive volume at cell " + std::to_string(i));

    boundary_faces.clear();
    boundary_ordinal.assign(faces.size(), -1);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Face& face = faces[f];
        if (face.owner < 0 || face.owner >= nc)
            throw Error("Mesh: face " + std::to_string(f) + " has invalid owner");
        if (face.neighbor >= nc)
            throw Error("Mesh: face " + std::to_string(f) + " has invalid neighbor");
        if (face.neighbor < 0) {
            if (face.patch < 0 || face.patch >= static_cast<int>(patch_names.size()))
                throw Error("Mesh: boundary face " + std::to_string(f) + " has no patch");
            boundary_ordinal[f] = static_cast<int>(boundary_faces.size());
            boundary_faces.push_back(static_cast<int>(f));
        }
    }

    // geometric closure: sum of outward area vectors vanishes per cell
    Eigen::MatrixX2d closure = Eigen::MatrixX2d::Zero(nc, 2);
    Eigen::VectorXd perim = Eigen::VectorXd::Zero(nc);
    for (const Face& face : faces) {
        closure(face.owner, 0) += face.nx * face.area;
        closure(face.owner, 1) += face.ny * face.area;
        perim(face.owner) += face.area;
        if (face.neighbor >= 0) {
            closure(face.neighbor, 0) -= face.nx * face.area;
            closure(face.neighbor, 1) -= face.ny * face.area;
            perim(face.neighbor) += face.area;
        }
    }
    for (int i = 0; i < nc; ++i) {
        double tol = 1e-10 * std::max(1.0, perim(i));
        if (closure.row(i).norm() > tol)
            throw Error("Mesh: cell " + std::to_string(i) + " is not closed (|sum A n| = " +
                        std::to_string(closure.row(i).norm()) + ")");
    }
}

namespace {

// Linear interpolation of a single-valued surface y(psi).
double interp_surface(const Eigen::VectorXd& psi, const Eigen::VectorXd& y, double t) {
    if (t <= psi(0)) return y(0);
    if (t >= psi(psi.size() - 1)) return y(y.size() - 1);
    Eigen::Index lo = 0, hi = psi.size() - 1;
    while (hi - lo > 1) {
        Eigen::Index mid = (lo + hi) / 2;
        if (psi(mid) <= t)
            lo = mid;
        else
            hi = mid;
    }
    double w = (t - psi(lo)) / (psi(hi) - psi(lo));
    return (1.0 - w) * y(lo) + w * y(hi);
}

struct QuadGeom {
    double area;
    double cx, cy;
};

QuadGeom quad_geometry(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                       const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
    // CCW polygon a-b-c-d; signed area + centroid via the shoelace formula
    const Eigen::Vector2d pts[4] = {a, b, c, d};
    double area2 = 0.0, cx = 0.0, cy = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector2d& p = pts[i];
        const Eigen::Vector2d& q = pts[(i + 1) % 4];
        double w = p.x() * q.y() - q.x() * p.y();
        area2 += w;
        cx += (p.x() + q.x()) * w;
        cy += (p.y() + q.y()) * w;
    }
    double area = 0.5 * area2;
    QuadGeom g;
    g.area = area;
    if (std::abs(area) > 0.0) {
        g.cx = cx / (6.0 * area);
        g.cy = cy / (6.0 * area);
    } else {
        g.cx = (a.x() + b.x() + c.x() + d.x()) / 4.0;
        g.cy = (a.y() + b.y() + c.y() + d.y()) / 4.0;
    }
    return g;
}

Face make_face(const Eigen::Vector2d& from, const Eigen::Vector2d& to, int owner,
               int neighbor, int patch) {
    // outward normal of the owner cell for an edge traversed CCW around it
    Face f;
    f.owner = owner;
    f.neighbor = neighbor;
    f.patch = patch;
    Eigen::Vector2d d = to - from;
    f.area = d.norm();
    if (f.area <= 0.0) throw Error("generate_omesh: degenerate face edge");
    f.nx = d.y() / f.area;
    f.ny = -d.x() / f.area;
    f.cx = 0.5 * (from.x() + to.x());
    f.cy = 0.5 * (from.y() + to.y());
    return f;
}

} // namespace

Mesh generate_omesh(const AirfoilShape& shape, int n_wrap, int n_radial,
                    double far_radius, double stretch) {
    shape.validate();
    if (n_wrap < 32 || n_wrap % 2 != 0)
        throw Error("generate_omesh: n_wrap must be even and >= 32");
    if (n_radial < 8) throw Error("generate_omesh: n_radial must be >= 8");
    if (far_radius < 10.0) throw Error("generate_omesh: far_radius must be >= 10 chords");
    if (stretch <= 0.0) throw Error("generate_omesh: stretch must be > 0");

    const double cx0 = 0.5, cy0 = 0.0; // mid-chord circle center

    // inner loop: CCW starting at the trailing edge, upper surface first
    std::vector<Eigen::Vector2d> inner(static_cast<std::size_t>(n_wrap));
    std::vector<Eigen::Vector2d> outer(static_cast<std::size_t>(n_wrap));
    for (int i = 0; i < n_wrap; ++i) {
        double angle = 2.0 * M_PI * i / n_wrap;
        double psi = 0.5 * (1.0 + std::cos(angle));
        bool upper = i <= n_wrap / 2;
        double y = upper ? interp_surface(shape.psi, shape.y_upper, psi)
                         : interp_surface(shape.psi, shape.y_lower, psi);
        inner[static_cast<std::size_t>(i)] = Eigen::Vector2d(psi, y);
        outer[static_cast<std::size_t>(i)] =
            Eigen::Vector2d(cx0 + far_radius * std::cos(angle), cy0 + far_radius * std::sin(angle));
    }

    // geometric radial distribution t_0=0 .. t_{n_radial}=1
    Eigen::VectorXd t(n_radial + 1);
    t(0) = 0.0;
    double d0 = (std::abs(stretch - 1.0) < 1e-14)
                    ? 1.0 / n_radial
                    : (stretch - 1.0) / (std::pow(stretch, n_radial) - 1.0);
    double step = d0, acc = 0.0;
    for (int j = 1; j <= n_radial; ++j) {
        acc += step;
        t(j) = acc;
        step *= stretch;
    }
    t(n_radial) = 1.0;

    auto node = [&](int i, int j) -> Eigen::Vector2d {
        const Eigen::Vector2d& a = inner[static_cast<std::size_t>(i % n_wrap)];
        const Eigen::Vector2d& b = outer[static_cast<std::size_t>(i % n_wrap)];
        return a + t(j) * (b - a);
    };

    Mesh mesh;
    const int nc = n_wrap * n_radial;
    mesh.cell_centers.resize(nc, 2);
    mesh.cell_volumes.resize(nc);
    mesh.patch_names = {"wall", "farfield"};
    const int wall = 0, farfield = 1;

    auto cell_id = [&](int i, int j) { return j * n_wrap + (i % n_wrap + n_wrap) % n_wrap; };

    for (int j = 0; j < n_radial; ++j) {
        for (int i = 0; i < n_wrap; ++i) {
            Eigen::Vector2d p00 = node(i, j), p10 = node(i + 1, j);
            Eigen::Vector2d p01 = node(i, j + 1), p11 = node(i + 1, j + 1);
            QuadGeom g = quad_geometry(p00, p01, p11, p10); // CCW ordering
            int id = cell_id(i, j);
            if (!(g.area > 0.0))
                throw Error("generate_omesh: self-intersecting cell at index " +
                            std::to_string(id) + " (area " + std::to_string(g.area) + ")");
            mesh.cell_volumes(id) = g.area;
            mesh.cell_centers(id, 0) = g.cx;
            mesh.cell_centers(id, 1) = g.cy;
        }
    }

    // ring faces: level j separates (i,j-1) from (i,j); j=0 wall, j=n_radial farfield
    for (int j = 0; j <= n_radial; ++j) {
        for (int i = 0; i < n_wrap; ++i) {
            if (j == 0) {
                mesh.faces.push_back(
                    make_face(node(i + 1, 0), node(i, 0), cell_id(i, 0), -1, wall));
            } else if (j == n_radial) {
                mesh.faces.push_back(make_face(node(i, n_radial), node(i + 1, n_radial),
                                               cell_id(i, n_radial - 1), -1, farfield));
            } else {
                mesh.faces.push_back(
                    make_face(node(i, j), node(i + 1, j), cell_id(i, j - 1), cell_id(i, j), -1));
            }
        }
    }
    // wrap faces: station i separates (i-1,j) from (i,j)
    for (int j = 0; j < n_radial; ++j)
        for (int i = 0; i < n_wrap; ++i)
            mesh.faces.push_back(
                make_face(node(i, j + 1), node(i, j), cell_id(i - 1, j), cell_id(i, j), -1));

    mesh.finalize();
    return mesh;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
    std::ofstream os = io::open_out(path, false);
    os << "liftrom-mesh v1 " << mesh.n_cells() << " " << mesh.n_faces() << "\n";
    for (int i = 0; i < mesh.n_cells(); ++i)
        os << io::fmt17(mesh.cell_centers(i, 0)) << " " << io::fmt17(mesh.cell_centers(i, 1))
           << " " << io::fmt17(mesh.cell_volumes(i)) << "\n";
    for (const Face& f : mesh.faces)
        os << f.owner << " " << f.neighbor << " " << io::fmt17(f.nx) << " " << io::fmt17(f.ny)
           << " " << io::fmt17(f.area) << " " << f.patch << "\n";
    os << "patches " << mesh.patch_names.size() << "\n";
    for (std::size_t p = 0; p < mesh.patch_names.size(); ++p)
        os << p << " " << mesh.patch_names[p] << "\n";
    os << "face-centers\n";
    for (const Face& f : mesh.faces) os << io::fmt17(f.cx) << " " << io::fmt17(f.cy) << "\n";
}

Mesh load_mesh(const std::string& path) {
    std::ifstream is = io::open_in(path, false);
    auto toks = io::expect_header(is, "liftrom-mesh v1", path);
    if (toks.size() != 2) throw Error(path + ": header must carry N_cells N_faces");
    int nc = std::stoi(toks[0]);
    int nf = std::stoi(toks[1]);
    if (nc <= 0 || nf <= 0) throw Error(path + ": bad mesh sizes in header");

    Mesh mesh;
    mesh.cell_centers.resize(nc, 2);
    mesh.cell_volumes.resize(nc);
    for (int i = 0; i < nc; ++i) {
        if (!(is >> mesh.cell_centers(i, 0) >> mesh.cell_centers(i, 1) >> mesh.cell_volumes(i)))
            throw Error(path + ": truncated cell records");
    }
    mesh.faces.resize(static_cast<std::size_t>(nf));
    for (int f = 0; f < nf; ++f) {
        Face& face = mesh.faces[static_cast<std::size_t>(f)];
        if (!(is >> face.owner >> face.neighbor >> face.nx >> face.ny >> face.area >> face.patch))
            throw Error(path + ": truncated face records");
    }
    std::string kw;
    std::size_t np = 0;
    if (!(is >> kw >> np) || kw != "patches") throw Error(path + ": missing patch table");
    mesh.patch_names.resize(np);
    for (std::size_t p = 0; p < np; ++p) {
        std::size_t id;
        std::string name;
        if (!(is >> id >> name) || id != p) throw Error(path + ": bad patch table entry");
        mesh.patch_names[p] = name;
    }
    if (!(is >> kw) || kw != "face-centers") throw Error(path + ": missing face-centers section");
    for (int f = 0; f < nf; ++f) {
        Face& face = mesh.faces[static_cast<std::size_t>(f)];
        if (!(is >> face.cx >> face.cy)) throw Error(path + ": truncated face centers");
    }
    mesh.finalize();
    return mesh;
}

} // namespace liftrom
