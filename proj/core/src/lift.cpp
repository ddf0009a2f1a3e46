#include "liftrom/lift.hpp"

#include <cmath>
#include <fstream>

#include "liftrom/io_util.hpp"

namespace liftrom {

namespace {

enum Dir { DX, DY };

struct BlockRef {
    int obs;
    Dir dir;
};

// lifted Euler block pattern:
//   row 0: Gx y1 + Gy y2
//   row 1: Gy y3 + Gx y4 + Gx y5
//   row 2: Gx y3 + Gy y4 + Gy y6
//   row 3: Gx y7 + Gy y8
const std::vector<std::vector<BlockRef>>& block_pattern() {
    static const std::vector<std::vector<BlockRef>> p = {
        {{0, DX}, {1, DY}},
        {{2, DY}, {3, DX}, {4, DX}},
        {{2, DX}, {3, DY}, {5, DY}},
        {{6, DX}, {7, DY}},
    };
    return p;
}

} // namespace

Eigen::VectorXd LiftedSystem::extract_rhs(const ObservableVector& y) const {
    if (y.n() != n) throw Error("extract_rhs: observable size mismatch");
    return A * y.stacked();
}

Eigen::VectorXd LiftedSystem::freestream_rhs(const Freestream& fs) const {
    Eigen::Matrix<double, 8, 1> yf = ObservableVector::freestream_values(fs);
    Eigen::VectorXd f = Eigen::VectorXd::Zero(4 * n);
    for (const FarfieldClosure& c : farfield) f(c.row) -= c.coeff * yf(c.obs);
    return f;
}

LiftedSystem assemble_lifted(const GradientOperators& ops, const Freestream& fs,
                             const Mesh& mesh) {
    fs.validate();
    const int n = ops.n();
    if (mesh.n_cells() != n) throw Error("assemble_lifted: mesh/operator size mismatch");

    LiftedSystem sys;
    sys.n = n;
    sys.cell_volumes = mesh.cell_volumes;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(ops.gx.nonZeros() + ops.gy.nonZeros()) * 4);

    const auto& pattern = block_pattern();
    for (int rb = 0; rb < 4; ++rb) {
        for (const BlockRef& ref : pattern[static_cast<std::size_t>(rb)]) {
            const Eigen::SparseMatrix<double>& G = (ref.dir == DX) ? ops.gx : ops.gy;
            for (int k = 0; k < G.outerSize(); ++k)
                for (Eigen::SparseMatrix<double>::InnerIterator it(G, k); it; ++it)
                    trip.emplace_back(rb * n + static_cast<int>(it.row()),
                                      ref.obs * n + static_cast<int>(it.col()), it.value());
        }
    }

    // boundary closure: wall faces fold into the diagonal (owner
    // extrapolation); farfield faces stay symbolic for RHS formation
    const int wall_id = mesh.patch_id("wall");
    for (int b = 0; b < mesh.n_boundary(); ++b) {
        const BoundaryCoeff& c = ops.closure[static_cast<std::size_t>(b)];
        const Face& face =
            mesh.faces[static_cast<std::size_t>(mesh.boundary_faces[static_cast<std::size_t>(b)])];
        for (int rb = 0; rb < 4; ++rb) {
            for (const BlockRef& ref : pattern[static_cast<std::size_t>(rb)]) {
                double coeff = (ref.dir == DX) ? c.coeff_x : c.coeff_y;
                if (coeff == 0.0) continue;
                if (face.patch == wall_id) {
                    trip.emplace_back(rb * n + c.cell, ref.obs * n + c.cell, coeff);
                } else {
                    sys.farfield.push_back({rb * n + c.cell, ref.obs, coeff});
                }
            }
        }
    }

    sys.A.resize(4 * n, 8 * n);
    sys.A.setFromTriplets(trip.begin(), trip.end());
    sys.A.makeCompressed();
    return sys;
}

std::array<Eigen::VectorXd, 4> constraints(const ObservableVector& y, const Freestream& fs,
                                           ConstraintForm form) {
    const int n = y.n();
    const double g = fs.gamma;
    std::array<Eigen::VectorXd, 4> h;
    for (auto& c : h) c.resize(n);

    if (form == ConstraintForm::quotient) {
        const ObservableScales sc = ObservableScales::from(fs);
        const double eps = 1e-8;
        for (int i = 0; i < n; ++i) {
            double y1 = y[0](i), y2 = y[1](i), y3 = y[2](i), y4 = y[3](i);
            if (std::abs(y1) < eps * sc.obs[0] || std::abs(y2) < eps * sc.obs[1] ||
                std::abs(y3) < eps * sc.obs[2])
                throw Error("constraints: quotient denominator below floor at cell " +
                            std::to_string(i) + "; use the cross-multiplied form");
            double u = y3 / y2, v = y3 / y1, rho = y1 * y2 / y3;
            double energy = 0.5 * (u * u + v * v) + y4 / ((g - 1.0) * rho);
            double total = energy + y4 * y3 / (y1 * y2); // E + p/rho
            h[0](i) = y[4](i) - y1 * y3 / y2;
            h[1](i) = y[5](i) - y2 * y3 / y1;
            h[2](i) = y[6](i) - y1 * total;
            h[3](i) = y[7](i) - y2 * total;
        }
        return h;
    }

    // cross-multiplied, freestream-scaled
    const ObservableScales sc = ObservableScales::from(fs);
    const double c_e = sc.v2_over_h;
    const double gg = g / (g - 1.0);
    for (int i = 0; i < n; ++i) {
        double a1 = y[0](i) / sc.obs[0], a2 = y[1](i) / sc.obs[1];
        double a3 = y[2](i) / sc.obs[2], a4 = y[3](i) / sc.obs[3];
        double a5 = y[4](i) / sc.obs[4], a6 = y[5](i) / sc.obs[5];
        double a7 = y[6](i) / sc.obs[6], a8 = y[7](i) / sc.obs[7];
        h[0](i) = a5 * a2 - a1 * a3;
        h[1](i) = a6 * a1 - a2 * a3;
        double bracket = 0.5 * a3 * a3 * (a1 * a1 + a2 * a2) + gg * a4 * a3 * a1 * a2;
        h[2](i) = a7 * a1 * a2 * a2 - c_e * bracket;
        h[3](i) = a8 * a2 * a1 * a1 - c_e * bracket;
    }
    return h;
}

void save_spmat(const std::string& path, const Eigen::SparseMatrix<double>& A,
                const Eigen::VectorXd& f) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> R = A;
    R.makeCompressed();
    std::ofstream os = io::open_out(path, true);
    os << "liftrom-spmat v1 " << R.rows() << " " << R.cols() << " " << R.nonZeros() << "\n";
    for (int i = 0; i <= R.rows(); ++i)
        io::write_u64(os, static_cast<std::uint64_t>(R.outerIndexPtr()[i]));
    for (int k = 0; k < R.nonZeros(); ++k)
        io::write_u64(os, static_cast<std::uint64_t>(R.innerIndexPtr()[k]));
    for (int k = 0; k < R.nonZeros(); ++k) io::write_f64(os, R.valuePtr()[k]);
    io::write_u64(os, static_cast<std::uint64_t>(f.size()));
    io::write_vec(os, f);
    if (!os) throw Error("save_spmat: write failure on " + path);
}

void load_spmat(const std::string& path, Eigen::SparseMatrix<double>& A, Eigen::VectorXd& f) {
    std::ifstream is = io::open_in(path, true);
    auto toks = io::expect_header(is, "liftrom-spmat v1", path);
    if (toks.size() != 3) throw Error(path + ": bad spmat header");
    const int rows = std::stoi(toks[0]);
    const int cols = std::stoi(toks[1]);
    const long nnz = std::stol(toks[2]);
    std::vector<std::uint64_t> rowptr(static_cast<std::size_t>(rows) + 1);
    for (auto& v : rowptr) v = io::read_u64(is, path + " rowptr");
    std::vector<std::uint64_t> colidx(static_cast<std::size_t>(nnz));
    for (auto& v : colidx) v = io::read_u64(is, path + " colidx");
    std::vector<double> vals(static_cast<std::size_t>(nnz));
    for (auto& v : vals) v = io::read_f64(is, path + " value");
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nnz));
    for (int r = 0; r < rows; ++r)
        for (std::uint64_t k = rowptr[static_cast<std::size_t>(r)];
             k < rowptr[static_cast<std::size_t>(r) + 1]; ++k)
            trip.emplace_back(r, static_cast<int>(colidx[static_cast<std::size_t>(k)]),
                              vals[static_cast<std::size_t>(k)]);
    A.resize(rows, cols);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    std::size_t flen = io::read_u64(is, path + " f size");
    f = io::read_vec(is, flen, path + " f");
}

} // namespace liftrom
