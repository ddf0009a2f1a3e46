#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "liftrom/error.hpp"

namespace liftrom::io {

// Binary payloads are little-endian float64/int64 after an ASCII header
// line. All readers throw liftrom::Error on truncation or header mismatch.

void write_u64(std::ostream& os, std::uint64_t v);
std::uint64_t read_u64(std::istream& is, const std::string& what);

void write_f64(std::ostream& os, double v);
double read_f64(std::istream& is, const std::string& what);

void write_vec(std::ostream& os, const Eigen::VectorXd& v);
Eigen::VectorXd read_vec(std::istream& is, std::size_t n, const std::string& what);

/// Column-major dense block.
void write_mat(std::ostream& os, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_mat(std::istream& is, std::size_t rows, std::size_t cols,
                         const std::string& what);

void write_ints(std::ostream& os, const std::vector<int>& v);
std::vector<int> read_ints(std::istream& is, std::size_t n, const std::string& what);

/// Reads one header line (up to '\n') and checks it starts with `magic`.
/// Returns the remaining whitespace-separated tokens.
std::vector<std::string> expect_header(std::istream& is, const std::string& magic,
                                       const std::string& path);

std::ofstream open_out(const std::string& path, bool binary);
std::ifstream open_in(const std::string& path, bool binary);

/// Formats a double as decimal text with 17 significant digits.
std::string fmt17(double v);

/// Minimal CSV writer: header row then data rows, UTF-8, '\n' endings.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row_mixed(const std::vector<std::string>& values);
    ~CsvWriter();

private:
    std::ofstream os_;
    std::size_t cols_;
};

} // namespace liftrom::io
