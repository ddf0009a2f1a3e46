#include "liftrom/cst.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "liftrom/error.hpp"
#include "liftrom/io_util.hpp"
#include "liftrom/sampling.hpp"

namespace liftrom {

namespace {

double binomial(int n, int i) {
    double r = 1.0;
    for (int j = 1; j <= i; ++j) r = r * (n - i + j) / j;
    return r;
}

} // namespace

void CstAirfoil::validate() const {
    if (n1 <= 0.0 || n2 <= 0.0) throw Error("CstAirfoil: class exponents must be > 0");
    if (order < 1) throw Error("CstAirfoil: order must be >= 1");
    if (coeffs_upper.size() != order + 1 || coeffs_lower.size() != order + 1)
        throw Error("CstAirfoil: coefficient rows must have length order+1");
}

Eigen::VectorXd CstAirfoil::flatten() const {
    Eigen::VectorXd flat(2 * (order + 1));
    flat.head(order + 1) = coeffs_upper;
    flat.tail(order + 1) = coeffs_lower;
    return flat;
}

CstAirfoil CstAirfoil::from_flat(double n1, double n2, int order,
                                 const Eigen::VectorXd& flat) {
    if (flat.size() != 2 * (order + 1))
        throw Error("CstAirfoil::from_flat: flat vector has wrong length");
    CstAirfoil c;
    c.n1 = n1;
    c.n2 = n2;
    c.order = order;
    c.coeffs_upper = flat.head(order + 1);
    c.coeffs_lower = flat.tail(order + 1);
    return c;
}

CstAirfoil CstAirfoil::with_active(const std::vector<int>& active,
                                   const Eigen::VectorXd& theta) const {
    if (static_cast<int>(active.size()) != theta.size())
        throw Error("CstAirfoil::with_active: theta length != active set size");
    Eigen::VectorXd flat = flatten();
    for (std::size_t j = 0; j < active.size(); ++j) {
        int idx = active[j];
        if (idx < 0 || idx >= flat.size())
            throw Error("CstAirfoil::with_active: active index out of range");
        flat(idx) = theta(static_cast<Eigen::Index>(j));
    }
    return from_flat(n1, n2, order, flat);
}

CstAirfoil CstAirfoil::naca0012() {
    CstAirfoil c;
    c.n1 = 0.5;
    c.n2 = 1.0;
    c.order = 2;
    c.coeffs_upper = Eigen::Vector3d(0.1689, 0.2699, 0.1387);
    c.coeffs_lower = Eigen::Vector3d(-0.1689, -0.2699, -0.1387);
    return c;
}

CstAirfoil CstAirfoil::rae2822() {
    CstAirfoil c;
    c.n1 = 0.5;
    c.n2 = 1.0;
    c.order = 3;
    c.coeffs_upper = Eigen::Vector4d(0.1268, 0.4670, 0.5834, 0.2103);
    c.coeffs_lower = Eigen::Vector4d(-0.1268, -0.5425, -0.5096, 0.0581);
    return c;
}

void AirfoilShape::validate() const {
    Eigen::Index m = psi.size();
    if (m < 2 || y_upper.size() != m || y_lower.size() != m)
        throw Error("AirfoilShape: inconsistent sample counts");
    if (psi(0) != 0.0 || psi(m - 1) != 1.0)
        throw Error("AirfoilShape: psi must span [0,1]");
    for (Eigen::Index i = 1; i < m; ++i)
        if (psi(i) <= psi(i - 1)) throw Error("AirfoilShape: psi must be strictly increasing");
}

double class_fn(double psi, double n1, double n2) {
    if (psi < 0.0 || psi > 1.0)
        throw Error("class_fn: psi=" + std::to_string(psi) + " outside [0,1]");
    if (n1 <= 0.0 || n2 <= 0.0) throw Error("class_fn: exponents must be > 0");
    return std::pow(psi, n1) * std::pow(1.0 - psi, n2);
}

double shape_fn(double psi, const Eigen::VectorXd& coeffs) {
    if (coeffs.size() == 0) throw Error("shape_fn: empty coefficient vector");
    int n = static_cast<int>(coeffs.size()) - 1;
    double s = 0.0;
    for (int i = 0; i <= n; ++i)
        s += coeffs(i) * binomial(n, i) * std::pow(psi, i) * std::pow(1.0 - psi, n - i);
    return s;
}

Eigen::VectorXd cosine_psi(int m) {
    if (m < 2) throw Error("cosine_psi: need at least 2 samples");
    Eigen::VectorXd psi(m);
    for (int j = 0; j < m; ++j)
        psi(j) = 0.5 * (1.0 - std::cos(M_PI * j / (m - 1)));
    psi(0) = 0.0;
    psi(m - 1) = 1.0;
    return psi;
}

AirfoilShape evaluate_airfoil(const CstAirfoil& cst, int m) {
    cst.validate();
    if (m < 2) throw Error("evaluate_airfoil: need m >= 2 samples");
    AirfoilShape s;
    s.psi = cosine_psi(m);
    s.y_upper.resize(m);
    s.y_lower.resize(m);
    for (int j = 0; j < m; ++j) {
        double c = class_fn(s.psi(j), cst.n1, cst.n2);
        s.y_upper(j) = c * shape_fn(s.psi(j), cst.coeffs_upper);
        s.y_lower(j) = c * shape_fn(s.psi(j), cst.coeffs_lower);
    }
    return s;
}

namespace {

Eigen::VectorXd fit_surface(const Eigen::VectorXd& psi, const Eigen::VectorXd& y,
                            int order, double n1, double n2, const char* surface) {
    int n = order;
    Eigen::MatrixXd design(psi.size(), n + 1);
    for (Eigen::Index r = 0; r < psi.size(); ++r) {
        double c = class_fn(psi(r), n1, n2);
        for (int i = 0; i <= n; ++i)
            design(r, i) =
                c * binomial(n, i) * std::pow(psi(r), i) * std::pow(1.0 - psi(r), n - i);
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < n + 1)
        throw Error(std::string("fit_cst: rank-deficient design matrix on ") + surface +
                    " surface");
    return qr.solve(y);
}

} // namespace

CstAirfoil fit_cst(const AirfoilShape& points, int order, double n1, double n2) {
    points.validate();
    if (order < 1) throw Error("fit_cst: order must be >= 1");
    if (points.psi.size() < order + 1)
        throw Error("fit_cst: need at least order+1 samples per surface");
    CstAirfoil c;
    c.n1 = n1;
    c.n2 = n2;
    c.order = order;
    c.coeffs_upper = fit_surface(points.psi, points.y_upper, order, n1, n2, "upper");
    c.coeffs_lower = fit_surface(points.psi, points.y_lower, order, n1, n2, "lower");
    return c;
}

void perturb_box(const CstAirfoil& base, double fraction, const std::vector<int>& active,
                 Eigen::VectorXd& lower, Eigen::VectorXd& upper) {
    if (active.empty()) throw Error("perturb_family: empty active coefficient set");
    if (fraction < 0.0 || fraction >= 1.0)
        throw Error("perturb_family: fraction must be in [0,1)");
    Eigen::VectorXd flat = base.flatten();
    Eigen::Index d = static_cast<Eigen::Index>(active.size());
    lower.resize(d);
    upper.resize(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        int idx = active[static_cast<std::size_t>(j)];
        if (idx < 0 || idx >= flat.size())
            throw Error("perturb_family: active index out of range");
        double a = flat(idx) * (1.0 - fraction);
        double b = flat(idx) * (1.0 + fraction);
        lower(j) = std::min(a, b);
        upper(j) = std::max(a, b);
    }
}

std::vector<Eigen::VectorXd> perturb_family(const CstAirfoil& base, double fraction,
                                            int count, const std::vector<int>& active,
                                            std::uint64_t seed) {
    base.validate();
    if (count < 1) throw Error("perturb_family: count must be >= 1");
    Eigen::VectorXd lower, upper;
    perturb_box(base, fraction, active, lower, upper);
    Eigen::MatrixXd unit = latin_hypercube(count, static_cast<int>(active.size()), seed);
    std::vector<Eigen::VectorXd> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Eigen::VectorXd theta =
            lower.array() + unit.row(i).transpose().array() * (upper - lower).array();
        out.push_back(theta);
    }
    return out;
}

void save_surface_points(const std::string& path, const Eigen::VectorXd& psi,
                         const Eigen::VectorXd& y) {
    if (psi.size() != y.size()) throw Error("save_surface_points: length mismatch");
    std::ofstream os = io::open_out(path, false);
    for (Eigen::Index i = 0; i < psi.size(); ++i)
        os << io::fmt17(psi(i)) << " " << io::fmt17(y(i)) << "\n";
}

void load_surface_points(const std::string& path, Eigen::VectorXd& psi,
                         Eigen::VectorXd& y) {
    std::ifstream is = io::open_in(path, false);
    std::vector<double> ps, ys;
    double a, b;
    while (is >> a >> b) {
        ps.push_back(a);
        ys.push_back(b);
    }
    if (ps.empty()) throw Error("load_surface_points: no samples in " + path);
    psi = Eigen::Map<Eigen::VectorXd>(ps.data(), static_cast<Eigen::Index>(ps.size()));
    y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
}

void save_family_csv(const std::string& path, const std::vector<int>& active,
                     const std::vector<Eigen::VectorXd>& thetas) {
    std::vector<std::string> header;
    header.reserve(active.size());
    for (int idx : active) header.push_back("coeff_" + std::to_string(idx));
    io::CsvWriter csv(path, header);
    for (const auto& t : thetas) {
        std::vector<double> row(t.data(), t.data() + t.size());
        csv.row(row);
    }
}

std::vector<Eigen::VectorXd> load_family_csv(const std::string& path,
                                             std::vector<int>& active) {
    std::ifstream is = io::open_in(path, false);
    std::string line;
    if (!std::getline(is, line)) throw Error("load_family_csv: empty file " + path);
    active.clear();
    {
        std::istringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const std::string prefix = "coeff_";
            if (tok.rfind(prefix, 0) != 0)
                throw Error("load_family_csv: bad header column '" + tok + "'");
            active.push_back(std::stoi(tok.substr(prefix.size())));
        }
    }
    std::vector<Eigen::VectorXd> out;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        if (vals.size() != active.size())
            throw Error("load_family_csv: row width mismatch in " + path);
        out.emplace_back(
            Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size())));
    }
    return out;
}

} // namespace liftrom
