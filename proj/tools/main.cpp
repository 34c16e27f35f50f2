// jwkbfit command line: eigenvalues, JWKB centers, modes, fits, and the bulk
// table/figure CSV emitters for the three complex potential families.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jwkbfit/config.hpp"
#include "jwkbfit/pipeline.hpp"
#include "jwkbfit/tables.hpp"

namespace {

using namespace jwkbfit;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::vector<int> m_values;
    std::string output_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "configuration file (sectioned key = value)");
    cmd->add_option("--set", args.overrides,
                    "override a config key, e.g. --set run.grid_points=6001");
    cmd->add_option("--m", args.m_values, "eigenvalue indices (overrides run.m_values)");
    cmd->add_option("--output-dir", args.output_dir, "directory for CSV artifacts");
}

RunConfig make_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) {
        cfg = load_config(args.config_path);
    } else {
        cfg.op = PotentialSpec::gaussian_bump(10.0, std::polar(1.0, kPi / 8.0));
    }
    for (const auto& o : args.overrides) apply_override(cfg, o);
    if (!args.m_values.empty()) cfg.m_values = args.m_values;
    if (!args.output_dir.empty()) cfg.output_dir = args.output_dir;
    return cfg;
}

int report(const EmitResult& result) {
    for (const auto& f : result.files) std::printf("wrote %s\n", f.string().c_str());
    int failures = 0;
    for (const auto& r : result.rows)
        if (!r.ok) {
            ++failures;
            std::fprintf(stderr, "m=%d failed: %s\n", r.m, r.message.c_str());
        }
    return failures == 0 ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenvalues and JWKB eigenfunction approximations for 1D"
                 " non-self-adjoint Schrodinger operators"};
    app.require_subcommand(1);

    CommonArgs eigen_args, centers_args, mode_args, fit_args, table_args, figure_args;
    bool with_functions = false;
    int mode_m = 0, mode_k = 1, fit_m = 0, table_id = 0, figure_id = 0;

    auto* eigen_cmd = app.add_subcommand("eigen", "compute eigenvalues");
    add_common(eigen_cmd, eigen_args);
    eigen_cmd->add_flag("--functions", with_functions, "also write sampled eigenfunctions");

    auto* centers_cmd = app.add_subcommand("centers", "mode-center equation roots");
    add_common(centers_cmd, centers_args);

    auto* mode_cmd = app.add_subcommand("mode", "sample one JWKB mode");
    add_common(mode_cmd, mode_args);
    mode_cmd->add_option("--index", mode_m, "eigenvalue index m")->required();
    mode_cmd->add_option("--mode-index", mode_k, "which root of the center equation (1-based)");

    auto* fit_cmd = app.add_subcommand("fit", "least-squares mode fit at one m");
    add_common(fit_cmd, fit_args);
    fit_cmd->add_option("--index", fit_m, "eigenvalue index m")->required();

    auto* table_cmd = app.add_subcommand("table", "emit one result table (1..6)");
    table_cmd->add_option("id", table_id, "table id")->required()->check(CLI::Range(1, 6));
    add_common(table_cmd, table_args);

    auto* figure_cmd = app.add_subcommand("figure", "emit figure data (1..4)");
    figure_cmd->add_option("id", figure_id, "figure id")->required()->check(CLI::Range(1, 4));
    add_common(figure_cmd, figure_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (eigen_cmd->parsed()) {
            RunConfig cfg = make_config(eigen_args);
            if (cfg.m_values.empty()) cfg.m_values = {0, 2, 4, 6, 8, 10};
            Pipeline pipe(cfg);
            return report(emit_eigenvalues(pipe, cfg.output_dir, with_functions));
        }
        if (centers_cmd->parsed()) {
            RunConfig cfg = make_config(centers_args);
            if (cfg.m_values.empty()) cfg.m_values = {20, 30, 40, 50};
            Pipeline pipe(cfg);
            return report(emit_centers(pipe, cfg.output_dir));
        }
        if (mode_cmd->parsed()) {
            RunConfig cfg = make_config(mode_args);
            cfg.m_values = {mode_m};
            Pipeline pipe(cfg);
            return report(emit_mode(pipe, mode_m, mode_k - 1, cfg.output_dir));
        }
        if (fit_cmd->parsed()) {
            RunConfig cfg = make_config(fit_args);
            cfg.m_values = {fit_m};
            Pipeline pipe(cfg);
            return report(emit_fit(pipe, fit_m, cfg.output_dir));
        }
        if (table_cmd->parsed()) {
            RunConfig cfg = make_config(table_args);
            return report(run_table(table_id, cfg));
        }
        if (figure_cmd->parsed()) {
            RunConfig cfg = make_config(figure_args);
            return report(emit_figure_data(figure_id, cfg));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
