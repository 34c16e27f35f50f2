#pragma once

#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "jwkbfit/types.hpp"

namespace jwkbfit {

// Deterministic CSV emission: full double precision (17 significant digits),
// header row, '\n' line endings.
class CsvWriter {
public:
    explicit CsvWriter(const std::filesystem::path& path);

    void row(std::span<const std::string> cells);
    void row(std::initializer_list<std::string> cells);

    static std::string num(double v);
    static std::string num(int v);

private:
    std::ofstream out_;
};

}  // namespace jwkbfit
