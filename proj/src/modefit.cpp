#include "jwkbfit/modefit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jwkbfit/numerics.hpp"

namespace jwkbfit {

namespace {

double grid_spacing(const std::vector<double>& grid) {
    const int n = static_cast<int>(grid.size());
    if (n < 2) throw DomainError("modefit: grid too small");
    const double h = (grid.back() - grid.front()) / (n - 1);
    for (int i = 1; i < n; ++i)
        if (std::abs(grid[i] - grid[i - 1] - h) > 1e-6 * h)
            throw DomainError("modefit: eigenfunction grid must be uniform");
    return h;
}

// Mode samples at the eigenfunction's x-nodes. The cut mode carries its
// physical samples on the same x-grid in the common case (exact extraction);
// grids that differ are bridged by cubic interpolation.
std::vector<cplx> resample_onto(const std::vector<double>& xgrid, const CutoffMode& m) {
    const size_t n = xgrid.size();
    std::vector<cplx> out(n);
    const double span = m.x_grid.back() - m.x_grid.front();
    const double tol = 1e-9 * (span + 1.0);
    size_t j = 0;
    for (size_t i = 0; i < n; ++i) {
        const double x = xgrid[i];
        if (x < m.x_grid.front() - tol || x > m.x_grid.back() + tol)
            throw FitError("inner_products: grids are incompatible (mode does not cover f)");
        while (j + 1 < m.x_grid.size() && m.x_grid[j] < x - tol) ++j;
        if (std::abs(m.x_grid[j] - x) <= tol) {
            out[i] = m.y_x[j];
        } else if (j + 1 < m.x_grid.size() && std::abs(m.x_grid[j + 1] - x) <= tol) {
            out[i] = m.y_x[j + 1];
        } else {
            out[i] = cubic_interp(m.x_grid, m.y_x, x);
        }
    }
    return out;
}

struct FitWork {
    const EigenPair* f = nullptr;
    double h = 0.0;
    std::vector<std::vector<cplx>> mode_samples;  // resampled on f->grid

    GramSystem gram() const {
        const int n = static_cast<int>(mode_samples.size());
        const size_t np = f->f.size();
        GramSystem sys;
        sys.n = n;
        sys.a.assign(static_cast<size_t>(n) * n, cplx(0.0, 0.0));
        sys.u.assign(n, cplx(0.0, 0.0));
        std::vector<cplx> prod(np);
        for (int k = 0; k < n; ++k) {
            for (size_t i = 0; i < np; ++i) prod[i] = f->f[i] * std::conj(mode_samples[k][i]);
            sys.u[k] = simpson_uniform(std::span<const cplx>(prod), h);
            for (int jj = 0; jj <= k; ++jj) {
                for (size_t i = 0; i < np; ++i)
                    prod[i] = mode_samples[k][i] * std::conj(mode_samples[jj][i]);
                const cplx a_jk = simpson_uniform(std::span<const cplx>(prod), h);
                sys.a[static_cast<size_t>(jj) * n + k] = a_jk;
                sys.a[static_cast<size_t>(k) * n + jj] = std::conj(a_jk);
            }
        }
        return sys;
    }

    double delta_form(const GramSystem& sys, std::span<const cplx> c) const {
        const int n = sys.n;
        cplx lin = 0.0, quad = 0.0;
        for (int k = 0; k < n; ++k) {
            lin += c[k] * std::conj(sys.u[k]);
            for (int jj = 0; jj < n; ++jj)
                quad += sys.a[static_cast<size_t>(jj) * n + k] * c[k] * std::conj(c[jj]);
        }
        const double d2 = 1.0 - 2.0 * lin.real() + quad.real();
        return std::sqrt(std::max(0.0, d2));
    }

    double delta_direct(std::span<const cplx> c) const {
        const size_t np = f->f.size();
        std::vector<double> mod2(np);
        for (size_t i = 0; i < np; ++i) {
            cplx d = f->f[i];
            for (size_t k = 0; k < mode_samples.size(); ++k) d -= c[k] * mode_samples[k][i];
            mod2[i] = std::norm(d);
        }
        return std::sqrt(std::max(0.0, simpson_uniform(std::span<const double>(mod2), h)));
    }
};

std::vector<cplx> solve_dense(int n, std::vector<cplx> a, std::vector<cplx> rhs) {
    // Gaussian elimination with partial pivoting; a is row-major n x n.
    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int col = 0; col < n; ++col) {
        int best = col;
        double mag = std::abs(a[static_cast<size_t>(col) * n + col]);
        for (int r = col + 1; r < n; ++r) {
            const double m = std::abs(a[static_cast<size_t>(r) * n + col]);
            if (m > mag) {
                mag = m;
                best = r;
            }
        }
        if (mag == 0.0) throw FitError("gram_solve: singular matrix");
        if (best != col) {
            for (int k = 0; k < n; ++k)
                std::swap(a[static_cast<size_t>(best) * n + k], a[static_cast<size_t>(col) * n + k]);
            std::swap(rhs[best], rhs[col]);
        }
        const cplx d = a[static_cast<size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const cplx m = a[static_cast<size_t>(r) * n + col] / d;
            if (m == cplx(0.0, 0.0)) continue;
            for (int k = col; k < n; ++k)
                a[static_cast<size_t>(r) * n + k] -= m * a[static_cast<size_t>(col) * n + k];
            rhs[r] -= m * rhs[col];
        }
    }
    std::vector<cplx> x(n);
    for (int r = n - 1; r >= 0; --r) {
        cplx s = rhs[r];
        for (int k = r + 1; k < n; ++k) s -= a[static_cast<size_t>(r) * n + k] * x[k];
        x[r] = s / a[static_cast<size_t>(r) * n + r];
    }
    return x;
}

double norm1(int n, const std::vector<cplx>& a) {
    double best = 0.0;
    for (int k = 0; k < n; ++k) {
        double col = 0.0;
        for (int j = 0; j < n; ++j) col += std::abs(a[static_cast<size_t>(j) * n + k]);
        best = std::max(best, col);
    }
    return best;
}

}  // namespace

std::pair<double, double> default_cutoffs(const JwkbMode& mode) {
    const int n = static_cast<int>(mode.grid.size());
    double s1 = mode.grid.back();
    double s2 = mode.grid.front();
    double best1 = -1.0, best2 = -1.0;
    for (int i = 0; i < n; ++i) {
        const double s = mode.grid[i];
        const double re = mode.log_derivative[i].real();
        // candidates on the physical window 0 < x = a + s < X
        if (s + mode.center.a < 1e-9) continue;
        if (s > 1e-12 && re < 0.0 && -re > best1) {
            best1 = -re;
            s1 = s;
        }
        if (s < -1e-12 && re > 0.0 && re > best2) {
            best2 = re;
            s2 = s;
        }
    }
    return {s1, s2};
}

CutoffMode apply_cutoff(const JwkbMode& mode, double s1, double s2) {
    const double s_min = mode.grid.front();
    const double s_max = mode.grid.back();
    const double span = s_max - s_min;
    const double end_tol = 1e-12 * (std::abs(span) + 1.0);
    if (!(s2 < 0.0 && s1 > 0.0) || s1 > s_max + end_tol || s2 < s_min - end_tol)
        throw DomainError("apply_cutoff: need s2 < 0 < s1 inside the grid span");

    CutoffMode cut;
    cut.a = mode.center.a;
    cut.grid = mode.grid;
    cut.anchor_index = mode.anchor_index;
    cut.anchor_inserted = mode.anchor_inserted;
    cut.s1 = std::min(s1, s_max);
    cut.s2 = std::max(s2, s_min);

    const bool freeze_right = cut.s1 < s_max - end_tol;
    const bool freeze_left = cut.s2 > s_min + end_tol;

    cplx y1, y2;
    if (freeze_right) {
        cut.ld1 = mode.log_derivative_at(cut.s1);
        if (!(cut.ld1.real() < 0.0))
            throw FitError("apply_cutoff: frozen log-derivative at s1 does not decay");
        y1 = mode.value_at(cut.s1);
    } else {
        cut.ld1 = mode.log_derivative.back();
    }
    if (freeze_left) {
        cut.ld2 = mode.log_derivative_at(cut.s2);
        if (!(cut.ld2.real() > 0.0))
            throw FitError("apply_cutoff: frozen log-derivative at s2 does not decay");
        y2 = mode.value_at(cut.s2);
    } else {
        cut.ld2 = mode.log_derivative.front();
    }

    const int n = static_cast<int>(mode.grid.size());
    cut.y.resize(n);
    int i_left = 0, i_right = n;  // [i_left, i_right) is the untouched window
    if (freeze_left)
        while (i_left < n && mode.grid[i_left] < cut.s2) ++i_left;
    if (freeze_right)
        while (i_right > 0 && mode.grid[i_right - 1] > cut.s1) --i_right;
    for (int i = i_left; i < i_right; ++i) cut.y[i] = mode.y[i];
    // frozen tails by incremental multiplication (one exp per uniform step;
    // the anchor cell is the only irregular spacing)
    double h_typ = 0.0;
    for (int k = 1; k < n; ++k) h_typ = std::max(h_typ, mode.grid[k] - mode.grid[k - 1]);
    if (freeze_right && i_right < n) {
        const cplx step = std::exp(cut.ld1 * h_typ);
        cplx v = y1 * std::exp(cut.ld1 * (mode.grid[i_right] - cut.s1));
        cut.y[i_right] = v;
        for (int i = i_right + 1; i < n; ++i) {
            const double d = mode.grid[i] - mode.grid[i - 1];
            v *= (std::abs(d - h_typ) < 1e-12 * h_typ) ? step : std::exp(cut.ld1 * d);
            cut.y[i] = v;
        }
    }
    if (freeze_left && i_left > 0) {
        const cplx step = std::exp(-cut.ld2 * h_typ);
        cplx v = y2 * std::exp(cut.ld2 * (mode.grid[i_left - 1] - cut.s2));
        cut.y[i_left - 1] = v;
        for (int i = i_left - 2; i >= 0; --i) {
            const double d = mode.grid[i + 1] - mode.grid[i];
            v *= (std::abs(d - h_typ) < 1e-12 * h_typ) ? step : std::exp(-cut.ld2 * d);
            cut.y[i] = v;
        }
    }

    // Physical samples on [0, X]: the mode plus its reflected partner at -a.
    // The mirror-extended grid holds all +-x nodes, so both arms are exact
    // node lookups.
    const double a = mode.center.a;
    const double hx = h_typ;
    const double x_span = mode.grid.back() + a;  // = X
    const double tol = 1e-9 * (x_span + 1.0);
    auto node_at = [&](double s) -> int {
        auto it = std::lower_bound(mode.grid.begin(), mode.grid.end(), s - tol);
        const int i = static_cast<int>(it - mode.grid.begin());
        if (i >= n || std::abs(mode.grid[i] - s) > tol)
            throw FitError("apply_cutoff: mirror node missing from the mode grid");
        return i;
    };
    cut.x_grid.clear();
    cut.y_x.clear();
    for (int i = 0; i < n; ++i) {
        if (cut.anchor_inserted && i == cut.anchor_index) continue;
        const double x = mode.grid[i] + a;
        if (x < -tol) continue;
        cut.x_grid.push_back(std::max(x, 0.0));
        cut.y_x.push_back(cut.y[i] + mode.reflection_sign * cut.y[node_at(-x - a)]);
    }

    std::vector<double> mod2(cut.y_x.size());
    for (size_t i = 0; i < cut.y_x.size(); ++i) mod2[i] = std::norm(cut.y_x[i]);
    const double nrm2 = simpson_uniform(std::span<const double>(mod2), hx);
    if (!(nrm2 > 0.0)) throw FitError("apply_cutoff: mode has zero norm");
    cut.norm_factor = std::sqrt(nrm2);
    for (auto& v : cut.y) v /= cut.norm_factor;
    for (auto& v : cut.y_x) v /= cut.norm_factor;
    return cut;
}

GramSystem inner_products(const EigenPair& f, const std::vector<CutoffMode>& modes) {
    FitWork w;
    w.f = &f;
    w.h = grid_spacing(f.grid);
    for (const auto& m : modes) w.mode_samples.push_back(resample_onto(f.grid, m));
    return w.gram();
}

std::vector<cplx> gram_solve(const GramSystem& sys) {
    const int n = sys.n;
    if (n < 1 || sys.a.size() != static_cast<size_t>(n) * n || sys.u.size() != static_cast<size_t>(n))
        throw DomainError("gram_solve: malformed system");
    if (n == 1) {
        if (sys.a[0] == cplx(0.0, 0.0)) throw FitError("gram_solve: singular matrix");
        return {sys.u[0] / sys.a[0]};
    }
    // condition estimate via the explicit inverse (n is small)
    std::vector<cplx> inv(static_cast<size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
        std::vector<cplx> e(n, cplx(0.0, 0.0));
        e[k] = 1.0;
        const auto col = solve_dense(n, sys.a, std::move(e));
        for (int j = 0; j < n; ++j) inv[static_cast<size_t>(j) * n + k] = col[j];
    }
    const double cond = norm1(n, sys.a) * norm1(n, inv);
    if (!(cond < 1e8)) throw FitError("gram_solve: Gram matrix is ill-conditioned");
    return solve_dense(n, sys.a, sys.u);
}

double coefficient_ratio(const GramSystem& sys, std::span<const cplx> coeff) {
    if (sys.n < 2 || coeff.size() < 2) throw DomainError("coefficient_ratio: need two modes");
    const double n1 = std::sqrt(std::abs(sys.a[0]));
    const double n2 = std::sqrt(std::abs(sys.a[static_cast<size_t>(sys.n) + 1]));
    const double c1 = std::abs(coeff[0]) * n1;
    if (c1 == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(coeff[1]) * n2 / c1;
}

double compute_delta(const EigenPair& f, const std::vector<CutoffMode>& modes,
                     std::span<const cplx> coeff) {
    if (coeff.size() != modes.size()) throw DomainError("compute_delta: coefficient count");
    FitWork w;
    w.f = &f;
    w.h = grid_spacing(f.grid);
    for (const auto& m : modes) w.mode_samples.push_back(resample_onto(f.grid, m));
    const double form = w.delta_form(w.gram(), coeff);
    const double direct = w.delta_direct(coeff);
    // The forms agree to 1e-8 in delta; at delta ~ 0 the quadratic form sits
    // on its cancellation floor, so the comparison falls back to delta^2.
    if (std::abs(form - direct) > 1e-8 * (1.0 + form) &&
        std::abs(form * form - direct * direct) > 1e-12)
        throw FitError("compute_delta: quadratic form and direct quadrature disagree");
    return form;
}

std::vector<cplx> combination_samples(const EigenPair& f, const std::vector<CutoffMode>& modes,
                                      std::span<const cplx> coeff) {
    if (coeff.size() != modes.size()) throw DomainError("combination_samples: coefficient count");
    std::vector<cplx> phi(f.f.size(), cplx(0.0, 0.0));
    for (size_t k = 0; k < modes.size(); ++k) {
        const auto samples = resample_onto(f.grid, modes[k]);
        for (size_t i = 0; i < phi.size(); ++i) phi[i] += coeff[k] * samples[i];
    }
    return phi;
}

namespace {

struct EvalOutcome {
    bool valid = false;
    bool conditioning_failure = false;
    double delta = std::numeric_limits<double>::infinity();
    double delta_direct = std::numeric_limits<double>::infinity();
    double ratio = std::numeric_limits<double>::quiet_NaN();
    std::vector<cplx> coeff;
};

EvalOutcome evaluate_cutoffs(const EigenPair& f, const std::vector<JwkbMode>& modes,
                             const std::vector<double>& p, double h) {
    EvalOutcome out;
    try {
        FitWork w;
        w.f = &f;
        w.h = h;
        std::vector<CutoffMode> cuts;
        for (size_t k = 0; k < modes.size(); ++k) {
            cuts.push_back(apply_cutoff(modes[k], p[2 * k], p[2 * k + 1]));
            w.mode_samples.push_back(resample_onto(f.grid, cuts.back()));
        }
        const GramSystem sys = w.gram();
        out.coeff = gram_solve(sys);
        out.delta = w.delta_form(sys, out.coeff);
        out.delta_direct = w.delta_direct(out.coeff);
        if (modes.size() >= 2) out.ratio = coefficient_ratio(sys, out.coeff);
        out.valid = true;
    } catch (const FitError& e) {
        const std::string what = e.what();
        out.conditioning_failure = what.find("ill-conditioned") != std::string::npos;
    } catch (const DomainError&) {
    }
    return out;
}

}  // namespace

// Local minima of |y| nearest the center on either side, the alternative
// initialization for the cut-off points.
std::pair<double, double> abs_min_cutoffs(const JwkbMode& mode) {
    const int n = static_cast<int>(mode.grid.size());
    double s1 = mode.grid.back(), s2 = mode.grid.front();
    for (int i = mode.anchor_index + 1; i + 1 < n; ++i) {
        if (mode.grid[i] + mode.center.a <= 1e-9) continue;
        const double v = std::abs(mode.y[i]);
        if (v < std::abs(mode.y[i - 1]) && v <= std::abs(mode.y[i + 1])) {
            s1 = mode.grid[i];
            break;
        }
    }
    for (int i = mode.anchor_index - 1; i > 0; --i) {
        if (mode.grid[i] + mode.center.a <= 1e-9) continue;
        const double v = std::abs(mode.y[i]);
        if (v < std::abs(mode.y[i + 1]) && v <= std::abs(mode.y[i - 1])) {
            s2 = mode.grid[i];
            break;
        }
    }
    return {s1, s2};
}

FitResult optimize_fit(const EigenPair& f, const std::vector<JwkbMode>& modes) {
    if (modes.empty()) throw DomainError("optimize_fit: need at least one mode");
    const double h = grid_spacing(f.grid);
    const size_t nm = modes.size();

    std::vector<double> lo(2 * nm), hi(2 * nm);
    for (size_t k = 0; k < nm; ++k) {
        const double eps = 2.0 * h;
        hi[2 * k] = modes[k].grid.back();
        lo[2 * k] = eps;
        hi[2 * k + 1] = -eps;
        lo[2 * k + 1] = modes[k].grid.front();
    }

    // The argmax |Re y'/y| initialization keeps each mode truncated near its
    // own center, which is the decomposition the tabulated coefficients
    // presume. (A free multi-start minimization can do slightly better on
    // delta by letting one bare mode cover everything, at the price of a
    // meaningless coefficient ratio.)
    std::vector<std::vector<double>> starts(1, std::vector<double>(2 * nm));
    for (size_t k = 0; k < nm; ++k) {
        const auto [d1, d2] = default_cutoffs(modes[k]);
        starts[0][2 * k] = d1;
        starts[0][2 * k + 1] = d2;
    }

    auto compass = [&](std::vector<double> p, EvalOutcome seed) {
        std::vector<double> step(2 * nm);
        for (size_t k = 0; k < 2 * nm; ++k) step[k] = std::min(0.5, 0.25 * (hi[k] - lo[k]));
        EvalOutcome best = std::move(seed);
        const int max_sweeps = 240;
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            const double before = best.delta;
            bool moved = false;
            for (size_t k = 0; k < 2 * nm; ++k) {
                for (double dir : {+1.0, -1.0}) {
                    const double trial_v = std::clamp(p[k] + dir * step[k], lo[k], hi[k]);
                    if (trial_v == p[k]) continue;
                    std::vector<double> q = p;
                    q[k] = trial_v;
                    EvalOutcome e = evaluate_cutoffs(f, modes, q, h);
                    if (e.valid && e.delta < best.delta) {
                        best = std::move(e);
                        p = std::move(q);
                        moved = true;
                        break;
                    }
                }
            }
            double max_step = 0.0;
            for (double sv : step) max_step = std::max(max_step, sv);
            if (!moved) {
                bool all_small = true;
                for (auto& sv : step) {
                    sv *= 0.5;
                    if (sv > 1e-4) all_small = false;
                }
                if (all_small) break;
            } else if (before - best.delta < 1e-6 && max_step < 0.05) {
                break;  // fine steps no longer improve delta meaningfully
            }
        }
        return std::pair<std::vector<double>, EvalOutcome>(std::move(p), std::move(best));
    };

    bool have = false;
    std::vector<double> p_best;
    EvalOutcome best;
    bool conditioning_seen = false;
    for (auto& p0 : starts) {
        EvalOutcome e0 = evaluate_cutoffs(f, modes, p0, h);
        conditioning_seen = conditioning_seen || e0.conditioning_failure;
        if (!e0.valid) continue;
        auto [pr, er] = compass(p0, std::move(e0));
        if (!have || er.delta < best.delta) {
            have = true;
            best = std::move(er);
            p_best = std::move(pr);
        }
    }
    // conditioning failures at the starts are retried from perturbed cut-offs
    for (int attempt = 1; attempt <= 3 && !have && conditioning_seen; ++attempt) {
        std::vector<double> q = starts[0];
        for (size_t k = 0; k < q.size(); ++k) {
            const double room = hi[k] - lo[k];
            q[k] = std::clamp(q[k] + 0.03 * attempt * room * ((k % 2) ? -1.0 : 1.0), lo[k], hi[k]);
        }
        EvalOutcome e0 = evaluate_cutoffs(f, modes, q, h);
        if (e0.valid) {
            auto [pr, er] = compass(q, std::move(e0));
            have = true;
            best = std::move(er);
            p_best = std::move(pr);
        }
    }
    if (!have) throw FitError("optimize_fit: no valid starting cut-offs");

    FitResult res;
    res.coefficients = best.coeff;
    if (nm >= 2) res.coefficient_ratio = best.ratio;
    res.delta = best.delta;
    res.delta_quadrature = best.delta_direct;
    for (size_t k = 0; k < nm; ++k) res.cutoffs.emplace_back(p_best[2 * k], p_best[2 * k + 1]);
    return res;
}

}  // namespace jwkbfit
