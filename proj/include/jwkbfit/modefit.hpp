#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "jwkbfit/jwkb.hpp"
#include "jwkbfit/shooting.hpp"

namespace jwkbfit {

// A JWKB mode with the log-derivative frozen beyond [s2, s1] (decaying
// exponentials there). The fit samples y_x on [0, X] combine the mode with
// its reflected partner at -a (the eigenfunctions have definite parity on the
// whole line, and near the origin the mirror arm carries half the value);
// they are normalized to unit L2 norm on [0, X].
struct CutoffMode {
    double a = 0.0;            // center; x = a + s
    std::vector<double> grid;  // s samples (copied from the base mode)
    int anchor_index = 0;
    bool anchor_inserted = false;
    double s1 = 0.0, s2 = 0.0;
    cplx ld1, ld2;          // frozen log-derivatives at s1 and s2
    std::vector<cplx> y;    // modified samples on the base grid, scaled by 1/norm_factor
    double norm_factor = 1.0;
    std::vector<double> x_grid;  // physical sample abscissae on [0, X]
    std::vector<cplx> y_x;       // y(x) + sign * y(-x), unit L2 norm on [0, X]
};

// Initial cut-offs: on each side, the grid point maximizing |Re y'/y| among
// points with the decaying sign (Re y'/y < 0 for s > 0, > 0 for s < 0); a
// side with no admissible point keeps the domain end (no truncation).
std::pair<double, double> default_cutoffs(const JwkbMode& mode);

// Alternative initialization: the local minima of |y| nearest the center.
std::pair<double, double> abs_min_cutoffs(const JwkbMode& mode);

// Freezes the log-derivative beyond the cut-offs (C^1 by construction) and
// normalizes. Rejects cut-off points whose frozen log-derivative has the
// wrong decay sign.
CutoffMode apply_cutoff(const JwkbMode& mode, double s1, double s2);

struct GramSystem {
    int n = 0;
    std::vector<cplx> a;  // row-major; a[j*n + k] = Integral y_k conj(y_j) dx
    std::vector<cplx> u;  // u[k] = Integral f conj(y_k) dx
};

// Composite-Simpson inner products on f's grid; modes are resampled onto it
// (exact node extraction when the grids share their x-nodes, cubic
// interpolation otherwise).
GramSystem inner_products(const EigenPair& f, const std::vector<CutoffMode>& modes);

// Solves A C = U. Throws FitError when cond_1(A) exceeds 1e8.
std::vector<cplx> gram_solve(const GramSystem& sys);

// |c2| ||y2|| / (|c1| ||y1||) with the mode norms taken from the Gram
// diagonal; for unit-normalized modes this is |c2/c1|, and it is invariant
// under rescaling any mode.
double coefficient_ratio(const GramSystem& sys, std::span<const cplx> coeff);

// Relative fit error ||f - sum c_k y_k|| / ||f|| from the quadratic form,
// cross-checked against direct quadrature (1e-8 agreement).
double compute_delta(const EigenPair& f, const std::vector<CutoffMode>& modes,
                     std::span<const cplx> coeff);

// sum c_k y_k resampled on f's grid.
std::vector<cplx> combination_samples(const EigenPair& f, const std::vector<CutoffMode>& modes,
                                      std::span<const cplx> coeff);

struct FitResult {
    std::vector<cplx> coefficients;
    std::optional<double> coefficient_ratio;  // |c2/c1| when n >= 2
    double delta = 0.0;
    double delta_quadrature = 0.0;
    std::vector<std::pair<double, double>> cutoffs;  // optimized (s1, s2) per mode
};

// Nested minimization: coefficients by gram_solve (exact inner minimizer),
// cut-offs by compass search from default_cutoffs, monotone in the best delta,
// converged when an iteration improves delta by less than 1e-6.
FitResult optimize_fit(const EigenPair& f, const std::vector<JwkbMode>& modes);

}  // namespace jwkbfit
