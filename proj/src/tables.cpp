#include "jwkbfit/tables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jwkbfit/csv.hpp"
#include "jwkbfit/numerics.hpp"

namespace jwkbfit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_kind(int table_id, PotentialKind kind, std::initializer_list<PotentialKind> wanted) {
    for (auto k : wanted)
        if (k == kind) return;
    throw DomainError("run_table: table " + std::to_string(table_id) +
                      " does not apply to operator kind " + kind_name(kind));
}

std::vector<int> evens(int lo, int hi) {
    std::vector<int> out;
    for (int m = lo; m <= hi; m += 2) out.push_back(m);
    return out;
}

}  // namespace

std::vector<int> default_m_for_table(int table_id, PotentialKind kind) {
    const bool bump = kind == PotentialKind::GaussianBump;
    switch (table_id) {
        case 1:
        case 2: {
            std::vector<int> out;
            for (int m = 10; m <= 100; m += 10) out.push_back(m);
            return out;
        }
        case 3:
            return evens(0, 52);
        case 4: {
            std::vector<int> out = {20};
            for (int m = 26; m <= (bump ? 50 : 52); m += 2) out.push_back(m);
            return out;
        }
        case 5:
            return evens(28, bump ? 50 : 52);
        case 6:
            return evens(10, bump ? 50 : 52);
        default:
            throw DomainError("run_table: table id must be 1..6");
    }
}

EmitResult run_table(int table_id, Pipeline& pipe, const std::filesystem::path& output_dir) {
    const PotentialKind kind = pipe.spec().kind;
    switch (table_id) {
        case 1: require_kind(table_id, kind, {PotentialKind::HarmonicComplex}); break;
        case 2: require_kind(table_id, kind, {PotentialKind::GaussianBump}); break;
        case 3: require_kind(table_id, kind, {PotentialKind::DoubleGaussian}); break;
        case 4:
        case 5:
        case 6:
            require_kind(table_id, kind,
                         {PotentialKind::GaussianBump, PotentialKind::DoubleGaussian});
            break;
        default:
            throw DomainError("run_table: table id must be 1..6");
    }

    EmitResult result;
    const auto path = output_dir / ("table" + std::to_string(table_id) + ".csv");
    CsvWriter csv(path);
    result.files.push_back(path);

    switch (table_id) {
        case 1: csv.row({"m", "a1", "a2", "argmax_abs_f", "tau1", "tau2", "status"}); break;
        case 2: csv.row({"m", "a2", "argmax_abs_f", "tau2", "status"}); break;
        case 3: csv.row({"m", "re_lambda", "im_lambda", "status"}); break;
        case 4: csv.row({"m", "a1", "eta1", "a2", "eta2", "status"}); break;
        case 5: csv.row({"m", "abs_c2_over_c1", "status"}); break;
        case 6: csv.row({"m", "delta", "status"}); break;
        default: break;
    }

    for (int m : pipe.config().m_values) {
        RowStatus row{m, true, ""};
        std::vector<std::string> cells{CsvWriter::num(m)};
        try {
            switch (table_id) {
                case 1: {
                    const auto& cs = pipe.centers(m);
                    const auto& rs = pipe.refined_centers(m);
                    if (cs.empty()) throw RootError("no center-equation root");
                    const double a1 = cs.front().a;
                    const double a2 = rs.front().center.a;
                    const double am = argmax_abs(pipe.eigenpair(m));
                    for (double v : {a1, a2, am, am - a1, am - a2})
                        cells.push_back(CsvWriter::num(v));
                    break;
                }
                case 2: {
                    const auto& rs = pipe.refined_centers(m);
                    if (rs.empty()) throw RootError("no center-equation root");
                    const double a2 = rs.front().center.a;
                    const double am = argmax_abs(pipe.eigenpair(m));
                    for (double v : {a2, am, am - a2}) cells.push_back(CsvWriter::num(v));
                    break;
                }
                case 3: {
                    const cplx lam = pipe.eigenvalue(m);
                    cells.push_back(CsvWriter::num(lam.real()));
                    cells.push_back(CsvWriter::num(lam.imag()));
                    break;
                }
                case 4: {
                    const auto& cs = pipe.centers(m);
                    if (cs.empty()) throw RootError("no center-equation root");
                    cells.push_back(CsvWriter::num(cs[0].a));
                    cells.push_back(CsvWriter::num(cs[0].eta));
                    cells.push_back(CsvWriter::num(cs.size() > 1 ? cs[1].a : kNaN));
                    cells.push_back(CsvWriter::num(cs.size() > 1 ? cs[1].eta : kNaN));
                    break;
                }
                case 5: {
                    const auto& fr = pipe.fit(m);
                    cells.push_back(
                        CsvWriter::num(fr.coefficient_ratio ? *fr.coefficient_ratio : kNaN));
                    break;
                }
                case 6: {
                    cells.push_back(CsvWriter::num(pipe.fit(m).delta));
                    break;
                }
                default:
                    break;
            }
            cells.push_back("ok");
        } catch (const Error& e) {
            row.ok = false;
            row.message = e.what();
            const size_t want = (table_id == 1) ? 6 : (table_id == 2) ? 4
                                : (table_id == 4) ? 5
                                                  : 3;
            while (cells.size() < want) cells.push_back("nan");
            cells.push_back(std::string("error: ") + e.what());
        }
        csv.row(cells);
        result.rows.push_back(std::move(row));
    }
    return result;
}

EmitResult run_table(int table_id, const RunConfig& cfg) {
    RunConfig c = cfg;
    if (c.m_values.empty()) c.m_values = default_m_for_table(table_id, c.op.kind);
    Pipeline pipe(c);
    return run_table(table_id, pipe, c.output_dir);
}

namespace {

void write_eigenfunction_csv(const std::filesystem::path& path, const EigenPair& pair) {
    CsvWriter csv(path);
    csv.row({"x", "re_f", "im_f", "abs_f"});
    for (size_t i = 0; i < pair.grid.size(); ++i)
        csv.row({CsvWriter::num(pair.grid[i]), CsvWriter::num(pair.f[i].real()),
                 CsvWriter::num(pair.f[i].imag()), CsvWriter::num(std::abs(pair.f[i]))});
}

}  // namespace

EmitResult emit_figure_data(int figure_id, Pipeline& pipe,
                            const std::filesystem::path& output_dir) {
    EmitResult result;
    const RunConfig& cfg = pipe.config();
    switch (figure_id) {
        case 1: {
            // undilated potential comparison on [-20, 20]
            const cplx c = cfg.op.c;
            const PotentialSpec v = (cfg.op.kind == PotentialKind::GaussianBump)
                                        ? cfg.op
                                        : PotentialSpec::gaussian_bump(10.0, c);
            const PotentialSpec vt = (cfg.op.kind == PotentialKind::DoubleGaussian)
                                         ? cfg.op
                                         : PotentialSpec::double_gaussian(100.0 / std::exp(1.0),
                                                                          10.0, 0.03, c);
            const auto path = output_dir / "figure1.csv";
            CsvWriter csv(path);
            result.files.push_back(path);
            csv.row({"x", "v", "v_tilde", "difference"});
            for (double x : uniform_grid(-20.0, 20.0, 1601)) {
                const double va = eval_potential(v, x).real();
                const double vb = eval_potential(vt, x).real();
                csv.row({CsvWriter::num(x), CsvWriter::num(va), CsvWriter::num(vb),
                         CsvWriter::num(va - vb)});
            }
            result.rows.push_back({0, true, ""});
            break;
        }
        case 2: {
            const int m_ref = cfg.m_values.back();
            const WorkingProblem p = pipe.problem_for(m_ref);
            const auto curve_path = output_dir / "figure2_potential.csv";
            {
                CsvWriter csv(curve_path);
                csv.row({"x", "re_w", "im_w"});
                for (double x : uniform_grid(0.0, p.truncation_radius, cfg.grid_points)) {
                    const cplx w = p.potential_eval(x);
                    csv.row({CsvWriter::num(x), CsvWriter::num(w.real()),
                             CsvWriter::num(w.imag())});
                }
            }
            result.files.push_back(curve_path);
            const auto eig_path = output_dir / "figure2_eigenvalues.csv";
            CsvWriter csv(eig_path);
            result.files.push_back(eig_path);
            csv.row({"m", "re_z", "im_z", "status"});
            for (int m : cfg.m_values) {
                RowStatus row{m, true, ""};
                try {
                    const cplx z = pipe.eigenvalue(m) * p.eigen_scale;
                    csv.row({CsvWriter::num(m), CsvWriter::num(z.real()),
                             CsvWriter::num(z.imag()), "ok"});
                } catch (const Error& e) {
                    row.ok = false;
                    row.message = e.what();
                    csv.row({CsvWriter::num(m), "nan", "nan", std::string("error: ") + e.what()});
                }
                result.rows.push_back(std::move(row));
            }
            break;
        }
        case 3: {
            for (int m : cfg.m_values) {
                if (m < 28 || m > 38) continue;
                RowStatus row{m, true, ""};
                try {
                    const auto path =
                        output_dir / ("figure3_m" + std::to_string(m) + ".csv");
                    write_eigenfunction_csv(path, pipe.eigenpair(m));
                    result.files.push_back(path);
                } catch (const Error& e) {
                    row.ok = false;
                    row.message = e.what();
                }
                result.rows.push_back(std::move(row));
            }
            break;
        }
        case 4: {
            for (int m : cfg.m_values) {
                if (m != 28 && m != 32) continue;
                RowStatus row{m, true, ""};
                try {
                    const auto& pair = pipe.eigenpair(m);
                    const auto& fr = pipe.fit(m);
                    std::vector<CutoffMode> cuts;
                    const auto& ms = pipe.modes(m);
                    for (size_t k = 0; k < ms.size(); ++k)
                        cuts.push_back(
                            apply_cutoff(ms[k], fr.cutoffs[k].first, fr.cutoffs[k].second));
                    const auto phi = combination_samples(pair, cuts, fr.coefficients);
                    const auto path =
                        output_dir / ("figure4_m" + std::to_string(m) + ".csv");
                    CsvWriter csv(path);
                    csv.row({"x", "abs_f", "abs_d"});
                    for (size_t i = 0; i < pair.grid.size(); ++i)
                        csv.row({CsvWriter::num(pair.grid[i]),
                                 CsvWriter::num(std::abs(pair.f[i])),
                                 CsvWriter::num(std::abs(pair.f[i] - phi[i]))});
                    result.files.push_back(path);
                } catch (const Error& e) {
                    row.ok = false;
                    row.message = e.what();
                }
                result.rows.push_back(std::move(row));
            }
            break;
        }
        default:
            throw DomainError("emit_figure_data: figure id must be 1..4");
    }
    return result;
}

EmitResult emit_figure_data(int figure_id, const RunConfig& cfg) {
    RunConfig c = cfg;
    if (c.m_values.empty()) {
        if (figure_id == 3) c.m_values = evens(28, 38);
        else if (figure_id == 4) c.m_values = {28, 32};
        else c.m_values = evens(0, c.op.kind == PotentialKind::GaussianBump ? 50 : 52);
    }
    Pipeline pipe(c);
    return emit_figure_data(figure_id, pipe, c.output_dir);
}

EmitResult emit_eigenvalues(Pipeline& pipe, const std::filesystem::path& output_dir,
                            bool with_functions) {
    EmitResult result;
    const auto path = output_dir / "eigenvalues.csv";
    CsvWriter csv(path);
    result.files.push_back(path);
    csv.row({"m", "parity", "re_lambda", "im_lambda", "re_z", "im_z", "status"});
    for (int m : pipe.config().m_values) {
        RowStatus row{m, true, ""};
        try {
            const cplx lam = pipe.eigenvalue(m);
            const cplx z = lam * pipe.problem_for(m).eigen_scale;
            csv.row({CsvWriter::num(m), m % 2 == 0 ? "even" : "odd", CsvWriter::num(lam.real()),
                     CsvWriter::num(lam.imag()), CsvWriter::num(z.real()),
                     CsvWriter::num(z.imag()), "ok"});
            if (with_functions) {
                const auto fpath =
                    output_dir / ("eigenfunction_m" + std::to_string(m) + ".csv");
                write_eigenfunction_csv(fpath, pipe.eigenpair(m));
                result.files.push_back(fpath);
            }
        } catch (const Error& e) {
            row.ok = false;
            row.message = e.what();
            csv.row({CsvWriter::num(m), m % 2 == 0 ? "even" : "odd", "nan", "nan", "nan", "nan",
                     std::string("error: ") + e.what()});
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

EmitResult emit_centers(Pipeline& pipe, const std::filesystem::path& output_dir) {
    EmitResult result;
    const auto path = output_dir / "centers.csv";
    CsvWriter csv(path);
    result.files.push_back(path);
    csv.row({"m", "k", "a", "eta", "a_refined", "eta_refined", "newton_converged", "status"});
    for (int m : pipe.config().m_values) {
        RowStatus row{m, true, ""};
        try {
            const auto& cs = pipe.centers(m);
            const auto& rs = pipe.refined_centers(m);
            for (size_t k = 0; k < cs.size(); ++k)
                csv.row({CsvWriter::num(m), CsvWriter::num(static_cast<int>(k) + 1),
                         CsvWriter::num(cs[k].a), CsvWriter::num(cs[k].eta),
                         CsvWriter::num(rs[k].center.a), CsvWriter::num(rs[k].center.eta),
                         rs[k].newton_converged ? "1" : "0", "ok"});
            if (cs.empty())
                csv.row({CsvWriter::num(m), "0", "nan", "nan", "nan", "nan", "nan",
                         "ok (no admissible root)"});
        } catch (const Error& e) {
            row.ok = false;
            row.message = e.what();
            csv.row({CsvWriter::num(m), "0", "nan", "nan", "nan", "nan", "nan",
                     std::string("error: ") + e.what()});
        }
        result.rows.push_back(std::move(row));
    }
    return result;
}

EmitResult emit_mode(Pipeline& pipe, int m, int mode_index,
                     const std::filesystem::path& output_dir) {
    EmitResult result;
    const auto& ms = pipe.modes(m);
    if (mode_index < 0 || mode_index >= static_cast<int>(ms.size()))
        throw DomainError("emit_mode: mode index out of range (" + std::to_string(ms.size()) +
                          " mode(s) at this m)");
    const auto& mode = ms[static_cast<size_t>(mode_index)];
    const auto path = output_dir / ("mode_m" + std::to_string(m) + "_k" +
                                    std::to_string(mode_index + 1) + ".csv");
    CsvWriter csv(path);
    result.files.push_back(path);
    csv.row({"s", "x", "re_y", "im_y", "abs_y", "re_logderiv", "im_logderiv"});
    for (size_t i = 0; i < mode.grid.size(); ++i) {
        const double s = mode.grid[i];
        csv.row({CsvWriter::num(s), CsvWriter::num(mode.center.a + s),
                 CsvWriter::num(mode.y[i].real()), CsvWriter::num(mode.y[i].imag()),
                 CsvWriter::num(std::abs(mode.y[i])),
                 CsvWriter::num(mode.log_derivative[i].real()),
                 CsvWriter::num(mode.log_derivative[i].imag())});
    }
    result.rows.push_back({m, true, ""});
    return result;
}

EmitResult emit_fit(Pipeline& pipe, int m, const std::filesystem::path& output_dir) {
    EmitResult result;
    const auto path = output_dir / ("fit_m" + std::to_string(m) + ".csv");
    CsvWriter csv(path);
    result.files.push_back(path);
    csv.row({"m", "n", "re_c1", "im_c1", "re_c2", "im_c2", "abs_c2_over_c1", "delta", "s1_1",
             "s2_1", "s1_2", "s2_2", "status"});
    RowStatus row{m, true, ""};
    try {
        const auto& fr = pipe.fit(m);
        const int n = static_cast<int>(fr.coefficients.size());
        const cplx c1 = fr.coefficients[0];
        const cplx c2 = n > 1 ? fr.coefficients[1] : cplx(kNaN, kNaN);
        csv.row({CsvWriter::num(m), CsvWriter::num(n), CsvWriter::num(c1.real()),
                 CsvWriter::num(c1.imag()), CsvWriter::num(c2.real()), CsvWriter::num(c2.imag()),
                 CsvWriter::num(fr.coefficient_ratio ? *fr.coefficient_ratio : kNaN),
                 CsvWriter::num(fr.delta), CsvWriter::num(fr.cutoffs[0].first),
                 CsvWriter::num(fr.cutoffs[0].second),
                 CsvWriter::num(n > 1 ? fr.cutoffs[1].first : kNaN),
                 CsvWriter::num(n > 1 ? fr.cutoffs[1].second : kNaN), "ok"});
    } catch (const Error& e) {
        row.ok = false;
        row.message = e.what();
        std::vector<std::string> cells{CsvWriter::num(m)};
        while (cells.size() < 12) cells.push_back("nan");
        cells.push_back(std::string("error: ") + e.what());
        csv.row(cells);
    }
    result.rows.push_back(std::move(row));
    return result;
}

}  // namespace jwkbfit
