#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "jwkbfit/potentials.hpp"

namespace jwkbfit {

enum class Parity { Even, Odd };
enum class Direction { Outward, Inward };

inline Parity parity_of_index(int m) { return (m % 2 == 0) ? Parity::Even : Parity::Odd; }

// Samples of (f, f') along a grid. True values are f[i] * exp(log_scale[i]);
// the pair is renormalized on the fly so the stored components stay inside
// the double range even when |f| spans hundreds of orders of magnitude.
struct ShootingSamples {
    std::vector<cplx> f;
    std::vector<cplx> fprime;
    std::vector<double> log_scale;
};

struct IntegratorOptions {
    double rel_tol = 1e-10;
    double max_step = 0.25;
    // Branch hint for the inward start slope -sqrt(W(X) - z): the root nearer
    // the hint is taken. Without a hint the positive-real-part root is
    // required and its absence is an error.
    std::optional<cplx> inward_slope_hint;
};

ShootingSamples integrate_schrodinger(const WorkingProblem& problem, cplx z, Parity parity,
                                      Direction direction, std::span<const double> grid,
                                      const IntegratorOptions& opts = {});

// (f'/f)_outward(x_match) - (f'/f)_inward(x_match); vanishes exactly at
// eigenvalues. Throws MatchPointError when f(x_match) ~ 0 in either direction.
cplx miss_distance(const WorkingProblem& problem, cplx z, Parity parity, double x_match,
                   const IntegratorOptions& opts = {});

struct RootOptions {
    double x_match = 0.0;  // <= 0 selects X/2
    double trust_radius = 1e300;
    int max_iterations = 60;
    IntegratorOptions integrator{};
};

// Complex secant iteration on the miss distance. Converged when
// |dz| < 1e-10 (1 + |z|) and |miss| < 1e-8.
cplx find_eigenvalue(const WorkingProblem& problem, cplx z_seed, Parity parity,
                     const RootOptions& opts = {});

struct EigenPair {
    int index = 0;
    Parity parity = Parity::Even;
    cplx z;       // working eigenvalue, z = sigma * lambda
    cplx lambda;  // physical eigenvalue
    std::vector<double> grid;
    std::vector<cplx> f;               // unit L2 norm, real positive at max |f|
    std::vector<cplx> log_derivative;  // f'/f (NaN where f is numerically zero)
};

// Glues the outward and inward solutions at a well-conditioned node near
// x_match, normalizes, and fixes the phase.
EigenPair extract_eigenpair(const WorkingProblem& problem, cplx z, Parity parity, int index,
                            std::span<const double> grid, const RootOptions& opts = {});

// Grid abscissa of max |f|, refined through the neighboring samples.
double argmax_abs(const EigenPair& pair);

// Match-point heuristic: 0.8 of the largest admissible mode center for this z,
// else X/2.
double choose_x_match(const WorkingProblem& problem, cplx z);

// ---------------------------------------------------------------------------
// Continuation
// ---------------------------------------------------------------------------

struct TrackedRoot {
    int index = 0;
    Parity parity = Parity::Even;
    cplx z;
    std::optional<cplx> inward_slope;  // tracked boundary branch
    double x_match = 0.0;
};

struct ContinuationOptions {
    double dt_initial = 0.02;
    double dt_min = 1e-5;
    double dt_max = 0.05;
    double collision_tol = 1e-6;
    IntegratorOptions integrator{};
    // Observer invoked after every committed step (diagnostics / progress).
    std::function<void(double t, const std::vector<TrackedRoot>&)> on_step;
};

// Tracks every root from t = 0 to t = 1 through the problem family, halving
// the step on failures and reseeding the secant solver at each step. Signals
// a collision when two tracked roots approach within collision_tol.
void continue_family(const std::function<WorkingProblem(double)>& family,
                     std::vector<TrackedRoot>& roots, const ContinuationOptions& opts = {});

struct SelfAdjointLevel {
    int index = 0;  // overall index m; even m <-> even parity
    double lambda = 0.0;
};

// Real levels of a self-adjoint working problem on [0, X], found by a
// Wronskian sign scan and labeled by node count. lambda_max must stay below
// W(X) so the decaying boundary condition is valid.
std::vector<SelfAdjointLevel> selfadjoint_levels(const WorkingProblem& problem, double lambda_min,
                                                 double lambda_max, int m_max);

struct AngleContinuationOptions {
    int grid_points = 4501;
    double truncation_radius = 0.0;  // 0 selects the family default
    ContinuationOptions continuation{};
};

// Continuation in arg c from the self-adjoint case c = 1: computes the real
// levels at angle zero, then tracks them through increments of arg c of at
// most 0.02 rad. Returns eigenpairs at the requested angle for every index
// m <= m_max that is visible at angle zero (for the bounded families that is
// the set of levels below the potential barrier).
std::vector<EigenPair> continue_in_angle(const PotentialSpec& spec, int m_max,
                                         const AngleContinuationOptions& opts = {});

// Default truncation radius: 18 for the Gaussian families, a + 12/sqrt(a)
// (capped at 25) for HarmonicComplex with a the center of the largest mode.
double default_truncation(const PotentialSpec& spec, int m_max);

}  // namespace jwkbfit
