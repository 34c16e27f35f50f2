#include "jwkbfit/csv.hpp"

#include <cmath>
#include <cstdio>

namespace jwkbfit {

CsvWriter::CsvWriter(const std::filesystem::path& path) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw DomainError("CsvWriter: cannot open " + path.string());
}

void CsvWriter::row(std::span<const std::string> cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
        if (i) out_ << ',';
        out_ << cells[i];
    }
    out_ << '\n';
}

void CsvWriter::row(std::initializer_list<std::string> cells) {
    row(std::span<const std::string>(cells.begin(), cells.size()));
}

std::string CsvWriter::num(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string CsvWriter::num(int v) { return std::to_string(v); }

}  // namespace jwkbfit
