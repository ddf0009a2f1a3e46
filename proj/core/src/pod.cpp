#include "liftrom/pod.hpp"

#include <cmath>
#include <fstream>

#include "liftrom/io_util.hpp"

namespace liftrom {

PodSlice pod(const Eigen::MatrixXd& snapshots, double energy_target) {
    if (snapshots.cols() < 2) throw Error("pod: need at least 2 snapshot columns");
    if (energy_target <= 0.0 || energy_target > 1.0)
        throw Error("pod: energy_target must lie in (0, 1]");
    double max_abs = snapshots.cwiseAbs().maxCoeff();
    if (max_abs == 0.0) throw Error("pod: all-zero snapshot matrix");

    Eigen::BDCSVD<Eigen::MatrixXd> svd(snapshots, Eigen::ComputeThinU);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double floor = 1e-12 * sv(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > floor) ++rank;
    if (rank == 0) throw Error("pod: snapshot matrix has numerical rank 0");

    double total = sv.head(rank).sum();
    double acc = 0.0;
    int k = rank;
    for (int i = 0; i < rank; ++i) {
        acc += sv(i);
        if (acc >= energy_target * total) {
            k = i + 1;
            break;
        }
    }

    PodSlice out;
    out.k = k;
    out.singular_values = sv.head(rank);
    out.phi = svd.matrixU().leftCols(k);
    // deterministic sign: first above-noise entry of each mode positive
    for (int j = 0; j < k; ++j) {
        double colmax = out.phi.col(j).cwiseAbs().maxCoeff();
        for (Eigen::Index r = 0; r < out.phi.rows(); ++r) {
            if (std::abs(out.phi(r, j)) > 1e-12 * colmax) {
                if (out.phi(r, j) < 0.0) out.phi.col(j) *= -1.0;
                break;
            }
        }
    }
    return out;
}

Eigen::VectorXd BlockBasis::reduce(const ObservableVector& y) const {
    if (y.n() != n) throw Error("BlockBasis::reduce: size mismatch");
    Eigen::VectorXd out(total_k);
    for (int i = 0; i < 8; ++i) {
        const auto& s = slice[static_cast<std::size_t>(i)];
        out.segment(offset[static_cast<std::size_t>(i)], s.k) =
            s.phi.transpose() * (y[i] / scales[static_cast<std::size_t>(i)]);
    }
    return out;
}

ObservableVector BlockBasis::lift(const Eigen::VectorXd& reduced) const {
    if (reduced.size() != total_k) throw Error("BlockBasis::lift: size mismatch");
    ObservableVector y;
    for (int i = 0; i < 8; ++i) {
        const auto& s = slice[static_cast<std::size_t>(i)];
        y[i] = scales[static_cast<std::size_t>(i)] *
               (s.phi * reduced.segment(offset[static_cast<std::size_t>(i)], s.k));
    }
    return y;
}

BlockBasis assemble_block_basis(const std::array<PodSlice, 8>& slices,
                                const std::array<double, 8>& scales) {
    BlockBasis b;
    b.slice = slices;
    b.scales = scales;
    b.n = slices[0].n();
    int off = 0;
    for (int i = 0; i < 8; ++i) {
        const auto& s = slices[static_cast<std::size_t>(i)];
        if (s.k < 1 || s.phi.cols() != s.k)
            throw Error("assemble_block_basis: missing basis for observable " +
                        std::to_string(i + 1));
        if (s.n() != b.n)
            throw Error("assemble_block_basis: inconsistent N for observable " +
                        std::to_string(i + 1));
        if (scales[static_cast<std::size_t>(i)] <= 0.0)
            throw Error("assemble_block_basis: non-positive scale");
        b.offset[static_cast<std::size_t>(i)] = off;
        off += s.k;
    }
    b.total_k = off;
    return b;
}

void save_basis(const std::string& path, const BlockBasis& basis) {
    std::ofstream os = io::open_out(path, true);
    os << "liftrom-basis v1 " << basis.n;
    for (int i = 0; i < 8; ++i) os << " " << basis.k_of(i);
    os << "\n";
    for (int i = 0; i < 8; ++i) io::write_mat(os, basis.phi(i));
    for (int i = 0; i < 8; ++i) {
        const auto& s = basis.slice[static_cast<std::size_t>(i)];
        io::write_u64(os, static_cast<std::uint64_t>(s.singular_values.size()));
        io::write_vec(os, s.singular_values);
    }
    for (int i = 0; i < 8; ++i) io::write_f64(os, basis.scales[static_cast<std::size_t>(i)]);
    if (!os) throw Error("save_basis: write failure on " + path);
}

BlockBasis load_basis(const std::string& path) {
    std::ifstream is = io::open_in(path, true);
    auto toks = io::expect_header(is, "liftrom-basis v1", path);
    if (toks.size() != 9) throw Error(path + ": bad basis header");
    std::size_t n = std::stoul(toks[0]);
    std::array<PodSlice, 8> slices;
    for (int i = 0; i < 8; ++i) {
        int k = std::stoi(toks[static_cast<std::size_t>(i) + 1]);
        slices[static_cast<std::size_t>(i)].k = k;
    }
    for (int i = 0; i < 8; ++i) {
        auto& s = slices[static_cast<std::size_t>(i)];
        s.phi = io::read_mat(is, n, static_cast<std::size_t>(s.k), path + " phi");
    }
    for (int i = 0; i < 8; ++i) {
        auto& s = slices[static_cast<std::size_t>(i)];
        std::size_t nsv = io::read_u64(is, path + " sv count");
        s.singular_values = io::read_vec(is, nsv, path + " sv");
    }
    std::array<double, 8> scales{};
    for (int i = 0; i < 8; ++i) scales[static_cast<std::size_t>(i)] = io::read_f64(is, path + " scale");
    return assemble_block_basis(slices, scales);
}

} // namespace liftrom
