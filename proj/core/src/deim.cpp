#include "liftrom/deim.hpp"

#include <cmath>

namespace liftrom {

std::vector<int> deim_select(const Eigen::MatrixXd& X) {
    const Eigen::Index n = X.rows();
    const int q = static_cast<int>(X.cols());
    if (q < 1 || n < q) throw Error("deim_select: basis must be N x q with q in [1, N]");

    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(q));
    Eigen::Index first;
    X.col(0).cwiseAbs().maxCoeff(&first);
    idx.push_back(static_cast<int>(first));

    for (int j = 1; j < q; ++j) {
        // interpolate column j on the current points and pick the worst row
        Eigen::MatrixXd U = X.leftCols(j);
        Eigen::MatrixXd Up(j, j);
        Eigen::VectorXd xp(j);
        for (int r = 0; r < j; ++r) {
            Up.row(r) = U.row(idx[static_cast<std::size_t>(r)]);
            xp(r) = X(idx[static_cast<std::size_t>(r)], j);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(Up);
        if (!lu.isInvertible())
            throw Error("deim_select: singular interpolation system at step " +
                        std::to_string(j) + " (rank-deficient basis)");
        Eigen::VectorXd c = lu.solve(xp);
        Eigen::VectorXd r = X.col(j) - U * c;
        Eigen::Index pick;
        double rmax = r.cwiseAbs().maxCoeff(&pick);
        if (rmax <= 1e-13)
            throw Error("deim_select: vanishing residual at step " + std::to_string(j) +
                        " (rank-deficient basis)");
        for (int prev : idx)
            if (prev == static_cast<int>(pick))
                throw Error("deim_select: duplicate point at step " + std::to_string(j));
        idx.push_back(static_cast<int>(pick));
    }
    return idx;
}

int DeimData::m() const {
    int m = 0;
    for (int i = 4; i < 8; ++i) m += k[static_cast<std::size_t>(i)];
    return m;
}

DeimData build_deim(const BlockBasis& basis, const std::array<int, 4>& q,
                    ConstraintForm form, const Freestream& fs) {
    DeimData dd;
    dd.form = form;
    dd.gamma = fs.gamma;
    dd.v2_over_h = ObservableScales::from(fs).v2_over_h;
    for (int i = 0; i < 8; ++i) {
        dd.k[static_cast<std::size_t>(i)] = basis.k_of(i);
        dd.offset[static_cast<std::size_t>(i)] = basis.offset[static_cast<std::size_t>(i)];
    }
    dd.total_k = basis.total_k;

    for (int i = 0; i < 4; ++i) {
        int obs = 4 + i;
        int qi = q[static_cast<std::size_t>(i)];
        if (qi < 1 || qi > basis.k_of(obs))
            throw Error("build_deim: q must lie in [1, k] for constraint " + std::to_string(i + 1));
        Eigen::MatrixXd X = basis.phi(obs).leftCols(qi);
        DeimConstraint& c = dd.constraint[static_cast<std::size_t>(i)];
        c.indices = deim_select(X);

        Eigen::MatrixXd PtX(qi, qi);
        for (int r = 0; r < qi; ++r) PtX.row(r) = X.row(c.indices[static_cast<std::size_t>(r)]);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(PtX, Eigen::ComputeThinU | Eigen::ComputeThinV);
        double smin = svd.singularValues()(qi - 1);
        if (smin <= 0.0) throw Error("build_deim: singular P^T X for constraint " +
                                     std::to_string(i + 1));
        c.condition = svd.singularValues()(0) / smin;

        Eigen::FullPivLU<Eigen::MatrixXd> lu(PtX);
        c.projector = (basis.phi(obs).transpose() * X) * lu.inverse();

        auto sample_rows = [&](int j) {
            const Eigen::MatrixXd& phi = basis.phi(j);
            Eigen::MatrixXd s(qi, phi.cols());
            for (int r = 0; r < qi; ++r) s.row(r) = phi.row(c.indices[static_cast<std::size_t>(r)]);
            return s;
        };
        for (int j = 0; j < 4; ++j) c.sampled[static_cast<std::size_t>(j)] = sample_rows(j);
        c.sampled[static_cast<std::size_t>(obs)] = sample_rows(obs);
    }
    return dd;
}

namespace {

struct SampledValues {
    Eigen::VectorXd a[5]; // a1..a4 and a_{4+i} at the constraint's points
};

SampledValues sample(const DeimData& dd, int i, const Eigen::VectorXd& yr) {
    const DeimConstraint& c = dd.constraint[static_cast<std::size_t>(i)];
    SampledValues s;
    for (int j = 0; j < 4; ++j)
        s.a[j] = c.sampled[static_cast<std::size_t>(j)] *
                 yr.segment(dd.offset[static_cast<std::size_t>(j)], dd.k[static_cast<std::size_t>(j)]);
    int obs = 4 + i;
    s.a[4] = c.sampled[static_cast<std::size_t>(obs)] *
             yr.segment(dd.offset[static_cast<std::size_t>(obs)], dd.k[static_cast<std::size_t>(obs)]);
    return s;
}

constexpr double kGuard = 1e-8; // scaled observables are O(1)

bool quotient_guarded(int i, const SampledValues& s) {
    const Eigen::Index q = s.a[0].size();
    for (Eigen::Index p = 0; p < q; ++p) {
        double a1 = s.a[0](p), a2 = s.a[1](p);
        switch (i) {
            case 0: // a1 a3 / a2
                if (std::abs(a2) < kGuard) return true;
                break;
            case 1: // a2 a3 / a1
                if (std::abs(a1) < kGuard) return true;
                break;
            default: // kernels 3/4 divide by both
                if (std::abs(a1) < kGuard || std::abs(a2) < kGuard) return true;
                break;
        }
    }
    return false;
}

// pointwise kernels; `which` selects constraint 0..3
Eigen::VectorXd quotient_kernel(const DeimData& dd, int i, const SampledValues& s) {
    const double ce = dd.v2_over_h;
    const double gg = dd.gamma / (dd.gamma - 1.0);
    const Eigen::ArrayXd a1 = s.a[0].array(), a2 = s.a[1].array(), a3 = s.a[2].array(),
                         a4 = s.a[3].array();
    switch (i) {
        case 0: return (a1 * a3 / a2).matrix();
        case 1: return (a2 * a3 / a1).matrix();
        case 2:
            return (ce * (0.5 * (a1 * a3.square() / a2.square() + a3.square() / a1) +
                          gg * a4 * a3 / a2))
                .matrix();
        default:
            return (ce * (0.5 * (a2 * a3.square() / a1.square() + a3.square() / a2) +
                          gg * a4 * a3 / a1))
                .matrix();
    }
}

Eigen::VectorXd cross_residual(const DeimData& dd, int i, const SampledValues& s) {
    const double ce = dd.v2_over_h;
    const double gg = dd.gamma / (dd.gamma - 1.0);
    const Eigen::ArrayXd a1 = s.a[0].array(), a2 = s.a[1].array(), a3 = s.a[2].array(),
                         a4 = s.a[3].array(), ax = s.a[4].array();
    switch (i) {
        case 0: return (ax * a2 - a1 * a3).matrix();
        case 1: return (ax * a1 - a2 * a3).matrix();
        case 2:
            return (ax * a1 * a2.square() -
                    ce * (0.5 * a3.square() * (a1.square() + a2.square()) + gg * a4 * a3 * a1 * a2))
                .matrix();
        default:
            return (ax * a2 * a1.square() -
                    ce * (0.5 * a3.square() * (a1.square() + a2.square()) + gg * a4 * a3 * a1 * a2))
                .matrix();
    }
}

// d(kernel or residual)/d(a_j) as diagonal vectors; j = 0..4 (4 = a_{4+i})
void quotient_kernel_partials(const DeimData& dd, int i, const SampledValues& s,
                              Eigen::ArrayXd d[5]) {
    const double ce = dd.v2_over_h;
    const double gg = dd.gamma / (dd.gamma - 1.0);
    const Eigen::ArrayXd a1 = s.a[0].array(), a2 = s.a[1].array(), a3 = s.a[2].array(),
                         a4 = s.a[3].array();
    const Eigen::Index q = a1.size();
    for (int j = 0; j < 5; ++j) d[j] = Eigen::ArrayXd::Zero(q);
    switch (i) {
        case 0:
            d[0] = a3 / a2;
            d[1] = -a1 * a3 / a2.square();
            d[2] = a1 / a2;
            break;
        case 1:
            d[0] = -a2 * a3 / a1.square();
            d[1] = a3 / a1;
            d[2] = a2 / a1;
            break;
        case 2:
            d[0] = ce * 0.5 * (a3.square() / a2.square() - a3.square() / a1.square());
            d[1] = ce * (-a1 * a3.square() / a2.cube() - gg * a4 * a3 / a2.square());
            d[2] = ce * (a1 * a3 / a2.square() + a3 / a1 + gg * a4 / a2);
            d[3] = ce * gg * a3 / a2;
            break;
        default:
            d[0] = ce * (-a2 * a3.square() / a1.cube() - gg * a4 * a3 / a1.square());
            d[1] = ce * 0.5 * (a3.square() / a1.square() - a3.square() / a2.square());
            d[2] = ce * (a2 * a3 / a1.square() + a3 / a2 + gg * a4 / a1);
            d[3] = ce * gg * a3 / a1;
            break;
    }
}

void cross_residual_partials(const DeimData& dd, int i, const SampledValues& s,
                             Eigen::ArrayXd d[5]) {
    const double ce = dd.v2_over_h;
    const double gg = dd.gamma / (dd.gamma - 1.0);
    const Eigen::ArrayXd a1 = s.a[0].array(), a2 = s.a[1].array(), a3 = s.a[2].array(),
                         a4 = s.a[3].array(), ax = s.a[4].array();
    const Eigen::Index q = a1.size();
    for (int j = 0; j < 5; ++j) d[j] = Eigen::ArrayXd::Zero(q);
    switch (i) {
        case 0:
            d[0] = -a3;
            d[2] = -a1;
            d[1] = ax;
            d[4] = a2;
            break;
        case 1:
            d[1] = -a3;
            d[2] = -a2;
            d[0] = ax;
            d[4] = a1;
            break;
        case 2:
            d[0] = ax * a2.square() - ce * (a3.square() * a1 + gg * a4 * a3 * a2);
            d[1] = 2.0 * ax * a1 * a2 - ce * (a3.square() * a2 + gg * a4 * a3 * a1);
            d[2] = -ce * (a3 * (a1.square() + a2.square()) + gg * a4 * a1 * a2);
            d[3] = -ce * gg * a3 * a1 * a2;
            d[4] = a1 * a2.square();
            break;
        default:
            d[0] = 2.0 * ax * a1 * a2 - ce * (a3.square() * a1 + gg * a4 * a3 * a2);
            d[1] = ax * a1.square() - ce * (a3.square() * a2 + gg * a4 * a3 * a1);
            d[2] = -ce * (a3 * (a1.square() + a2.square()) + gg * a4 * a1 * a2);
            d[3] = -ce * gg * a3 * a1 * a2;
            d[4] = a2 * a1.square();
            break;
    }
}

} // namespace

Eigen::VectorXd deim_constraint(const DeimData& dd, const Eigen::VectorXd& y_reduced) {
    if (y_reduced.size() != dd.total_k) throw Error("deim_constraint: reduced size mismatch");
    Eigen::VectorXd h(dd.m());
    int row = 0;
    for (int i = 0; i < 4; ++i) {
        const DeimConstraint& c = dd.constraint[static_cast<std::size_t>(i)];
        SampledValues s = sample(dd, i, y_reduced);
        int obs = 4 + i;
        int ki = dd.k[static_cast<std::size_t>(obs)];
        bool use_cross = (dd.form == ConstraintForm::cross) || quotient_guarded(i, s);
        if (use_cross) {
            h.segment(row, ki) = c.projector * cross_residual(dd, i, s);
        } else {
            h.segment(row, ki) =
                y_reduced.segment(dd.offset[static_cast<std::size_t>(obs)], ki) -
                c.projector * quotient_kernel(dd, i, s);
        }
        row += ki;
    }
    return h;
}

Eigen::MatrixXd deim_constraint_jacobian(const DeimData& dd, const Eigen::VectorXd& y_reduced) {
    if (y_reduced.size() != dd.total_k)
        throw Error("deim_constraint_jacobian: reduced size mismatch");
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dd.m(), dd.total_k);
    int row = 0;
    for (int i = 0; i < 4; ++i) {
        const DeimConstraint& c = dd.constraint[static_cast<std::size_t>(i)];
        SampledValues s = sample(dd, i, y_reduced);
        int obs = 4 + i;
        int ki = dd.k[static_cast<std::size_t>(obs)];
        bool use_cross = (dd.form == ConstraintForm::cross) || quotient_guarded(i, s);
        Eigen::ArrayXd d[5];
        if (use_cross) {
            cross_residual_partials(dd, i, s, d);
            for (int j = 0; j < 4; ++j)
                J.block(row, dd.offset[static_cast<std::size_t>(j)], ki,
                        dd.k[static_cast<std::size_t>(j)]) +=
                    c.projector * d[j].matrix().asDiagonal() *
                    c.sampled[static_cast<std::size_t>(j)];
            J.block(row, dd.offset[static_cast<std::size_t>(obs)], ki, ki) +=
                c.projector * d[4].matrix().asDiagonal() *
                c.sampled[static_cast<std::size_t>(obs)];
        } else {
            quotient_kernel_partials(dd, i, s, d);
            for (int j = 0; j < 4; ++j)
                J.block(row, dd.offset[static_cast<std::size_t>(j)], ki,
                        dd.k[static_cast<std::size_t>(j)]) -=
                    c.projector * d[j].matrix().asDiagonal() *
                    c.sampled[static_cast<std::size_t>(j)];
            J.block(row, dd.offset[static_cast<std::size_t>(obs)], ki, ki) +=
                Eigen::MatrixXd::Identity(ki, ki);
        }
        row += ki;
    }
    return J;
}

} // namespace liftrom
