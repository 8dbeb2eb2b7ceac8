#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace mdrl {

// Fixed 8-decimal form used by every CSV the project writes.
std::string fmt_fixed8(double v);

// Shortest exact round-trip form, used by the MDP file format so that row-sum
// invariants survive save/load.
std::string fmt_exact(double v);

// Minimal CSV emitter: fixed column order, 8-decimal reals, LF line endings.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& cells);
    // Convenience: leading string cells followed by numeric cells.
    void row(const std::vector<std::string>& head, const std::vector<double>& values);

    void flush() { out_.flush(); }

private:
    std::ofstream out_;
    std::size_t n_columns_;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace mdrl
