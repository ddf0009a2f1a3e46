#include "liftrom/kriging.hpp"

#include <cmath>
#include <fstream>

#include "liftrom/io_util.hpp"

namespace liftrom {

double se_kernel(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double ell) {
    if (ell <= 0.0) throw Error("se_kernel: length scale must be > 0");
    return std::exp(-(a - b).squaredNorm() / (2.0 * ell * ell));
}

namespace {

Eigen::MatrixXd correlation(const Eigen::MatrixXd& x, double ell, double nugget) {
    const int m = static_cast<int>(x.rows());
    Eigen::MatrixXd r(m, m);
    for (int i = 0; i < m; ++i) {
        r(i, i) = 1.0 + nugget;
        for (int j = i + 1; j < m; ++j) {
            double v = std::exp(-(x.row(i) - x.row(j)).squaredNorm() / (2.0 * ell * ell));
            r(i, j) = v;
            r(j, i) = v;
        }
    }
    return r;
}

struct LikelihoodEval {
    bool ok = false;
    double value = std::numeric_limits<double>::infinity(); // negative concentrated log-lik
    Eigen::LLT<Eigen::MatrixXd> llt;
    double sigma2 = 0.0;
};

LikelihoodEval eval_neg_loglik(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                               double ell, double nugget) {
    LikelihoodEval out;
    Eigen::MatrixXd r = correlation(x, ell, nugget);
    out.llt.compute(r);
    if (out.llt.info() != Eigen::Success) return out;
    const int m = static_cast<int>(y.size());
    Eigen::VectorXd alpha = out.llt.solve(y);
    double quad = y.dot(alpha);
    if (quad < 0.0) quad = 0.0;
    out.sigma2 = quad / m;
    double logdet = 0.0;
    for (int i = 0; i < m; ++i) logdet += 2.0 * std::log(out.llt.matrixL()(i, i));
    // profile likelihood: -2 log p = M log sigma2 + log|R| + const
    out.value = m * std::log(std::max(out.sigma2, 1e-300)) + logdet;
    out.ok = true;
    return out;
}

} // namespace

GpModel fit_gp(const Eigen::MatrixXd& inputs, const Eigen::VectorXd& values,
               double ell_lo, double ell_hi) {
    const int m = static_cast<int>(inputs.rows());
    if (m < 3) throw Error("fit_gp: need at least 3 training points");
    if (values.size() != m) throw Error("fit_gp: value/input count mismatch");
    if (!(ell_lo > 0.0) || !(ell_hi > ell_lo)) throw Error("fit_gp: bad length-scale bounds");
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j)
            if ((inputs.row(i) - inputs.row(j)).norm() == 0.0)
                throw Error("fit_gp: duplicate training inputs at rows " + std::to_string(i) +
                            "," + std::to_string(j));

    GpModel model;
    model.inputs = inputs;
    model.values = values;

    if (values.cwiseAbs().maxCoeff() == 0.0) {
        model.zero = true;
        model.sigma2 = 0.0;
        model.ell = std::sqrt(ell_lo * ell_hi);
        model.alpha = Eigen::VectorXd::Zero(m);
        return model;
    }

    // escalate the nugget only as far as conditioning requires
    double nugget = 1e-10;
    auto evaluate = [&](double log_ell) { return eval_neg_loglik(inputs, values, std::exp(log_ell), nugget); };
    for (;;) {
        if (evaluate(std::log(ell_lo)).ok && evaluate(std::log(ell_hi)).ok) break;
        nugget *= 10.0;
        if (nugget > 1e-6)
            throw Error("fit_gp: Cholesky failed even with nugget escalated to 1e-6");
    }

    // golden-section search on log(ell)
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = std::log(ell_lo), b = std::log(ell_hi);
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = evaluate(c).value;
    double fd = evaluate(d).value;
    for (int it = 0; it < 60 && (b - a) > 1e-6; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = evaluate(c).value;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = evaluate(d).value;
        }
    }
    double best_log_ell = (fc < fd) ? c : d;
    LikelihoodEval best = evaluate(best_log_ell);
    if (!best.ok) throw Error("fit_gp: likelihood evaluation failed at optimum");

    model.ell = std::exp(best_log_ell);
    model.nugget = nugget;
    model.sigma2 = best.sigma2;
    model.chol_L = best.llt.matrixL();
    model.alpha = best.llt.solve(values);
    return model;
}

GpPrediction gp_predict(const GpModel& model, const Eigen::VectorXd& x) {
    GpPrediction out;
    if (model.zero) return out;
    const int m = static_cast<int>(model.inputs.rows());
    Eigen::VectorXd r(m);
    for (int i = 0; i < m; ++i)
        r(i) = se_kernel(model.inputs.row(i).transpose(), x, model.ell);
    out.mean = r.dot(model.alpha);
    Eigen::VectorXd rinv_r = model.chol_L.triangularView<Eigen::Lower>().solve(r);
    rinv_r = model.chol_L.transpose().triangularView<Eigen::Upper>().solve(rinv_r);
    out.variance = model.sigma2 * (1.0 - r.dot(rinv_r));
    if (out.variance < 0.0) out.variance = 0.0;
    return out;
}

Eigen::VectorXd PodKrigSurrogate::predict_reduced(const Eigen::VectorXd& theta) const {
    Eigen::VectorXd x(theta.size());
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        double s = theta_std(j);
        x(j) = (s > 0.0) ? (theta(j) - theta_mean(j)) / s : 0.0;
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(models.size()));
    for (std::size_t i = 0; i < models.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = gp_predict(models[i], x).mean;
    return out;
}

PodKrigSurrogate fit_pod_krig(const RomDatabase& db, double ell_lo_frac, double ell_hi_frac) {
    db.validate();
    PodKrigSurrogate s;
    s.theta_mean = db.theta_mean;
    s.theta_std = db.theta_std;

    const int M = db.m();
    Eigen::MatrixXd x(M, db.d());
    for (int i = 0; i < M; ++i) x.row(i) = db.standardize(db.thetas.row(i).transpose()).transpose();

    double diam = 0.0;
    for (int i = 0; i < M; ++i)
        for (int j = i + 1; j < M; ++j) diam = std::max(diam, (x.row(i) - x.row(j)).norm());
    if (diam <= 0.0) diam = 1.0;

    s.models.reserve(static_cast<std::size_t>(db.k()));
    for (int c = 0; c < db.k(); ++c) {
        Eigen::VectorXd values = db.reduced_snapshots.row(c).transpose();
        s.models.push_back(fit_gp(x, values, ell_lo_frac * diam, ell_hi_frac * diam));
    }
    return s;
}

Prediction pod_krig_predict(const PodKrigSurrogate& surrogate, const RomDatabase& db,
                            const Eigen::VectorXd& theta, const Mesh& mesh) {
    return predict_full(db, surrogate.predict_reduced(theta), mesh);
}

void save_surrogate(const std::string& path, const PodKrigSurrogate& s) {
    if (s.models.empty()) throw Error("save_surrogate: no models");
    const int M = static_cast<int>(s.models[0].inputs.rows());
    const int d = static_cast<int>(s.models[0].inputs.cols());
    std::ofstream os = io::open_out(path, true);
    os << "liftrom-gp v1 " << s.models.size() << " " << M << " " << d << "\n";
    io::write_vec(os, s.theta_mean);
    io::write_vec(os, s.theta_std);
    io::write_mat(os, s.models[0].inputs);
    for (const GpModel& m : s.models) {
        io::write_f64(os, m.ell);
        io::write_f64(os, m.sigma2);
        io::write_f64(os, m.nugget);
        io::write_u64(os, m.zero ? 1 : 0);
        io::write_vec(os, m.values);
        io::write_vec(os, m.alpha);
        if (!m.zero) io::write_mat(os, m.chol_L);
    }
    if (!os) throw Error("save_surrogate: write failure on " + path);
}

PodKrigSurrogate load_surrogate(const std::string& path) {
    std::ifstream is = io::open_in(path, true);
    auto toks = io::expect_header(is, "liftrom-gp v1", path);
    if (toks.size() != 3) throw Error(path + ": bad surrogate header");
    std::size_t count = std::stoul(toks[0]);
    std::size_t M = std::stoul(toks[1]);
    std::size_t d = std::stoul(toks[2]);
    PodKrigSurrogate s;
    s.theta_mean = io::read_vec(is, d, path + " theta_mean");
    s.theta_std = io::read_vec(is, d, path + " theta_std");
    Eigen::MatrixXd inputs = io::read_mat(is, M, d, path + " inputs");
    s.models.resize(count);
    for (GpModel& m : s.models) {
        m.inputs = inputs;
        m.ell = io::read_f64(is, path + " ell");
        m.sigma2 = io::read_f64(is, path + " sigma2");
        m.nugget = io::read_f64(is, path + " nugget");
        m.zero = io::read_u64(is, path + " zero flag") == 1;
        m.values = io::read_vec(is, M, path + " values");
        m.alpha = io::read_vec(is, M, path + " alpha");
        if (!m.zero) m.chol_L = io::read_mat(is, M, M, path + " chol");
    }
    return s;
}

} // namespace liftrom
