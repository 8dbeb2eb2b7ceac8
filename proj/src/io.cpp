#include "mdrl/io.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace mdrl {

std::string fmt_fixed8(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.8f", v);
    // Normalize "-0.00000000" so reruns and platforms agree byte-for-byte.
    std::string s(buf);
    if (s == "-0.00000000") s = "0.00000000";
    return s;
}

std::string fmt_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path, std::ios::binary), n_columns_(columns.size()) {
    if (!out_) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out_ << ',';
        out_ << columns[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != n_columns_)
        throw std::invalid_argument("CsvWriter::row: column count mismatch");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& head, const std::vector<double>& values) {
    std::vector<std::string> cells = head;
    for (double v : values) cells.push_back(fmt_fixed8(v));
    row(cells);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_file: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_file: cannot open " + path);
    out << content;
}

} // namespace mdrl
