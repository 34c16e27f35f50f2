#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "jwkbfit/pipeline.hpp"

namespace jwkbfit {

struct RowStatus {
    int m = 0;
    bool ok = true;
    std::string message;  // failure diagnostic when !ok
};

struct EmitResult {
    std::vector<std::filesystem::path> files;
    std::vector<RowStatus> rows;
    bool all_ok() const {
        for (const auto& r : rows)
            if (!r.ok) return false;
        return true;
    }
};

// Default index list for one of the six result tables.
std::vector<int> default_m_for_table(int table_id, PotentialKind kind);

// Runs the pipeline stages a table needs and writes table<N>.csv into
// output_dir. A failing index is marked in its status column; the other rows
// are unaffected.
EmitResult run_table(int table_id, Pipeline& pipe, const std::filesystem::path& output_dir);
EmitResult run_table(int table_id, const RunConfig& cfg);

// Figure data: 1 potential comparison; 2 the potential curve in the complex
// plane with the scaled eigenvalues; 3 eigenfunction samples; 4 |f| and the
// fit residual |d|.
EmitResult emit_figure_data(int figure_id, Pipeline& pipe,
                            const std::filesystem::path& output_dir);
EmitResult emit_figure_data(int figure_id, const RunConfig& cfg);

// Eigenvalue list, center list, one mode, one fit (the CLI surfaces).
EmitResult emit_eigenvalues(Pipeline& pipe, const std::filesystem::path& output_dir,
                            bool with_functions);
EmitResult emit_centers(Pipeline& pipe, const std::filesystem::path& output_dir);
EmitResult emit_mode(Pipeline& pipe, int m, int mode_index,
                     const std::filesystem::path& output_dir);
EmitResult emit_fit(Pipeline& pipe, int m, const std::filesystem::path& output_dir);

}  // namespace jwkbfit
