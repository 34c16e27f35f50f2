#pragma once

#include <functional>

#include "jwkbfit/types.hpp"

namespace jwkbfit {

enum class PotentialKind { HarmonicComplex, GaussianBump, DoubleGaussian };

// One of the three complex potential families (undilated form):
//   HarmonicComplex  V(x) = (c x)^2
//   GaussianBump     V(x) = x^2 exp(-x^2/b^2)
//   DoubleGaussian   V(x) = alpha (exp(-gamma (x-beta)^2) + exp(-gamma (x+beta)^2))
// All are even in x. c enters the Gaussian families through the dilation
// x -> sqrt(c) x of the working problem, not the undilated potential.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::HarmonicComplex;
    cplx c{1.0, 0.0};
    double b = 10.0;
    double alpha = 36.787944117144233;  // 100/e
    double beta = 10.0;
    double gamma = 0.03;

    static PotentialSpec harmonic_complex(cplx c);
    static PotentialSpec gaussian_bump(double b, cplx c);
    static PotentialSpec double_gaussian(double alpha, double beta, double gamma, cplx c);

    void validate() const;  // throws DomainError on c = 0, Re c <= 0, nonpositive widths
};

cplx eval_potential(const PotentialSpec& spec, cplx x);
cplx eval_potential(const PotentialSpec& spec, double x);
cplx potential_derivative(const PotentialSpec& spec, cplx x);
cplx potential_second_derivative(const PotentialSpec& spec, cplx x);

// Normalized operator -d^2/dx^2 + W(x) on [0, X] with eigenvalue map z = sigma * lambda.
struct WorkingProblem {
    std::function<cplx(double)> potential_eval;
    std::function<cplx(double)> potential_deriv;
    std::function<cplx(double)> potential_deriv2;
    cplx eigen_scale{1.0, 0.0};
    double truncation_radius = 0.0;
};

// Dilated working form: W(x) = c V(sqrt(c) x), sigma = c for the Gaussian
// families; W(x) = (c x)^2, sigma = 1 for HarmonicComplex. Principal branch
// of sqrt(c).
WorkingProblem to_working_problem(const PotentialSpec& spec, double X);

// Homotopy from the dilated harmonic oscillator to a Gaussian-family target:
// V_t(y) = (1-t) y^2 + t V(y), dilated as usual. At t = 0 the spectrum is
// exactly z_m = c (2m+1), which seeds eigenvalue continuation.
WorkingProblem blend_working_problem(const PotentialSpec& target, double t, double X);

// L2-norm quotient ||V_a - V_b|| / ||V_a|| over [-R, R], adaptive quadrature
// with relative tolerance 1e-8.
double potential_distance(const PotentialSpec& a, const PotentialSpec& b, double domain_radius);
double potential_distance(const std::function<double(double)>& va,
                          const std::function<double(double)>& vb, double domain_radius);

}  // namespace jwkbfit
