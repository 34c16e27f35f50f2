#pragma once

#include <functional>
#include <span>
#include <vector>

#include "jwkbfit/types.hpp"

namespace jwkbfit {

std::vector<double> uniform_grid(double a, double b, int n_points);

// Composite Simpson on a uniform grid. An even sample count is handled by a
// 3/8 rule on the trailing three cells.
double simpson_uniform(std::span<const double> y, double h);
cplx simpson_uniform(std::span<const cplx> y, double h);

// Adaptive Simpson with a relative tolerance measured against the integral of
// |f|-scale over the whole interval. Throws QuadratureError at the depth cap.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol);

// Four-point Lagrange interpolation on a sorted (possibly non-uniform) grid.
cplx cubic_interp(std::span<const double> xs, std::span<const cplx> ys, double x);

// Abscissa of the parabola vertex through three points; returns x1 for
// degenerate (collinear) input.
double parabola_peak(double x0, double y0, double x1, double y1, double x2, double y2);

}  // namespace jwkbfit
