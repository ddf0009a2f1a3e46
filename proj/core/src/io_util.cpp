#include "liftrom/io_util.hpp"

#include <cstdio>
#include <cstring>
#include <sstream>

namespace liftrom::io {

void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::uint64_t read_u64(std::istream& is, const std::string& what) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw Error("truncated read of " + what);
    return v;
}

void write_f64(std::ostream& os, double v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

double read_f64(std::istream& is, const std::string& what) {
    double v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw Error("truncated read of " + what);
    return v;
}

void write_vec(std::ostream& os, const Eigen::VectorXd& v) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(sizeof(double) * v.size()));
}

Eigen::VectorXd read_vec(std::istream& is, std::size_t n, const std::string& what) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    is.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * n));
    if (!is) throw Error("truncated read of " + what);
    return v;
}

void write_mat(std::ostream& os, const Eigen::MatrixXd& m) {
    os.write(reinterpret_cast<const char*>(m.data()),
             static_cast<std::streamsize>(sizeof(double) * m.size()));
}

Eigen::MatrixXd read_mat(std::istream& is, std::size_t rows, std::size_t cols,
                         const std::string& what) {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    is.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * rows * cols));
    if (!is) throw Error("truncated read of " + what);
    return m;
}

void write_ints(std::ostream& os, const std::vector<int>& v) {
    for (int x : v) {
        std::int64_t w = x;
        os.write(reinterpret_cast<const char*>(&w), sizeof(w));
    }
}

std::vector<int> read_ints(std::istream& is, std::size_t n, const std::string& what) {
    std::vector<int> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::int64_t w = 0;
        is.read(reinterpret_cast<char*>(&w), sizeof(w));
        if (!is) throw Error("truncated read of " + what);
        v[i] = static_cast<int>(w);
    }
    return v;
}

std::vector<std::string> expect_header(std::istream& is, const std::string& magic,
                                       const std::string& path) {
    std::string line;
    if (!std::getline(is, line)) throw Error(path + ": missing header");
    std::istringstream ss(line);
    std::string tok;
    std::vector<std::string> toks;
    while (ss >> tok) toks.push_back(tok);
    // magic may span several tokens ("liftrom-db v1")
    std::istringstream ms(magic);
    std::string mtok;
    std::size_t i = 0;
    while (ms >> mtok) {
        if (i >= toks.size() || toks[i] != mtok)
            throw Error(path + ": bad header, expected '" + magic + "', got '" + line + "'");
        ++i;
    }
    return {toks.begin() + static_cast<std::ptrdiff_t>(i), toks.end()};
}

std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream os(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!os) throw Error("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path, bool binary) {
    std::ifstream is(path, binary ? std::ios::binary : std::ios::in);
    if (!is) throw Error("cannot open for reading: " + path);
    return is;
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : os_(open_out(path, false)), cols_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i)
        os_ << header[i] << (i + 1 < header.size() ? "," : "");
    os_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != cols_) throw Error("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        os_ << fmt17(values[i]) << (i + 1 < values.size() ? "," : "");
    os_ << "\n";
}

void CsvWriter::row_mixed(const std::vector<std::string>& values) {
    if (values.size() != cols_) throw Error("csv row width mismatch");
    for (std::size_t i = 0; i < values.size(); ++i)
        os_ << values[i] << (i + 1 < values.size() ? "," : "");
    os_ << "\n";
}

CsvWriter::~CsvWriter() = default;

} // namespace liftrom::io
