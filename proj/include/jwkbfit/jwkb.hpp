#pragma once

#include <functional>
#include <span>
#include <vector>

#include "jwkbfit/potentials.hpp"

namespace jwkbfit {

// One real solution (a, eta) of the center equation z = eta^2 + W(a), with
// eta's sign fixed by Re psi > 0 at the first positive grid step so the mode
// decays away from its center.
struct CenterPair {
    double a = 0.0;
    double eta = 0.0;
};

struct CenterOptions {
    double scan_step = 1e-3;
    double probe_eps = 0.0;  // 0 selects truncation_radius / 4500
};

// Splits z = eta^2 + W(a) into Im z = Im W(a) (dense scan + bisection in a)
// and eta^2 = Re z - Re W(a) kept only when positive; the sign rule and the
// two-sided local-decay filter select admissible pairs. Returns pairs sorted
// by increasing a; an empty list is a valid outcome.
std::vector<CenterPair> solve_center_equation(const WorkingProblem& problem, cplx lambda,
                                              const CenterOptions& opts = {});

struct RefinedCenter {
    CenterPair center;
    bool newton_converged = true;
};

// Damped Newton iteration on z + i W'(a)/(2 eta) - eta^2 - W(a) = 0 seeded
// from one unrefined pair; falls back to the seed with a warning flag when
// Newton stalls.
RefinedCenter refine_center(const WorkingProblem& problem, cplx lambda, const CenterPair& seed);
std::vector<RefinedCenter> solve_refined_center(const WorkingProblem& problem, cplx lambda,
                                                const CenterOptions& opts = {});

// Phase integral psi(s) = i eta Integral_0^s sqrt(1 - (W(a+t) - W(a))/eta^2) dt
// with the square-root branch continued from +1 at t = 0 (nearest-root
// continuation, never more than a pi/2 argument jump between samples).
// The grid must contain s = 0.
std::vector<cplx> build_phase(const WorkingProblem& problem, const CenterPair& center,
                              std::span<const double> s_grid);

struct JwkbMode {
    CenterPair center;
    double h = 1.0;
    cplx z;  // eta^2 + W(a)
    // Sign of the mirror mode centered at -a in the whole-line combination:
    // +1 approximates even eigenfunctions, -1 odd ones.
    double reflection_sign = 1.0;

    std::vector<double> grid;  // s samples, containing s = 0 at anchor_index
    int anchor_index = 0;
    bool anchor_inserted = false;  // true when s = 0 was added to a shifted x-grid

    std::vector<cplx> xi0;             // amplitude phi^(-1/4), continuous branch
    std::vector<cplx> psi;             // phase integral, psi(0) = 0
    std::vector<cplx> y;               // xi0 * exp(-psi/h)
    std::vector<cplx> log_derivative;  // xi0'/xi0 - i eta sqrt(phi)/h (analytic)
    std::vector<cplx> sqrt_phi;        // tracked branch of sqrt(phi) at the nodes
    std::vector<cplx> root4;           // tracked branch of phi^(1/4) at the nodes

    std::function<cplx(double)> w, w1, w2;  // W and derivatives at x = a + s

    cplx value_at(double s) const;
    cplx log_derivative_at(double s) const;
};

// Mode grid on [0, X] for a center at a: the uniform x-grid shifted by -a,
// with s = 0 inserted when a is not a grid point. The uniform x-nodes are the
// quadrature subset; the anchor only pins the normalization point.
std::vector<double> make_mode_grid(double a, double X, int n_points);

JwkbMode build_mode(const WorkingProblem& problem, const CenterPair& center, double h,
                    std::span<const double> s_grid);

// Closed-form Gaussian simplification
// (1 - W'(a) s / (2 eta^2))^(-1/2) exp(-i eta s + i W'(a) s^2 / (4 eta)).
// Throws BranchError when the square-root argument lands on the principal cut.
cplx gaussian_mode(const WorkingProblem& problem, const CenterPair& center, double s);

// sup over window grid points of |(-h^2 y'' + (W - z) y) / y| with y'' from
// the analytic amplitude/phase forms.
double jwkb_residual(const WorkingProblem& problem, const JwkbMode& mode, double s_lo,
                     double s_hi);

}  // namespace jwkbfit
