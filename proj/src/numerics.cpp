#include "jwkbfit/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace jwkbfit {

std::vector<double> uniform_grid(double a, double b, int n_points) {
    if (n_points < 2 || !(b > a)) throw DomainError("uniform_grid: need n_points >= 2 and b > a");
    std::vector<double> g(static_cast<size_t>(n_points));
    const double h = (b - a) / (n_points - 1);
    for (int i = 0; i < n_points; ++i) g[static_cast<size_t>(i)] = a + h * i;
    g.back() = b;
    return g;
}

namespace {

template <class T>
T simpson_impl(std::span<const T> y, double h) {
    const int n = static_cast<int>(y.size());
    if (n < 2) throw DomainError("simpson_uniform: need at least two samples");
    if (n == 2) return (h * 0.5) * (y[0] + y[1]);
    if (n == 4) return (h * 3.0 / 8.0) * (y[0] + 3.0 * y[1] + 3.0 * y[2] + y[3]);

    int m = n;       // number of points covered by the plain Simpson part
    T tail{};
    if (n % 2 == 0) {  // odd cell count: close with a 3/8 rule
        tail = (h * 3.0 / 8.0) * (y[n - 4] + 3.0 * y[n - 3] + 3.0 * y[n - 2] + y[n - 1]);
        m = n - 3;
    }
    T s = y[0] + y[m - 1];
    for (int i = 1; i < m - 1; i += 2) s += 4.0 * y[i];
    for (int i = 2; i < m - 1; i += 2) s += 2.0 * y[i];
    return tail + s * (h / 3.0);
}

struct AdaptiveSimpson {
    const std::function<double(double)>& f;
    double span;

    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double tol, int depth) const {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        const double flm = f(lm), frm = f(rm);
        const double h12 = (b - a) / 12.0;
        const double left = h12 * (fa + 4.0 * flm + fm);
        const double right = h12 * (fm + 4.0 * frm + fb);
        const double err = left + right - whole;
        if (std::abs(err) <= 15.0 * tol || (b - a) <= 1e-13 * span)
            return left + right + err / 15.0;
        if (depth <= 0) throw QuadratureError("adaptive_simpson: recursion depth exhausted");
        return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    }
};

}  // namespace

double simpson_uniform(std::span<const double> y, double h) { return simpson_impl(y, h); }
cplx simpson_uniform(std::span<const cplx> y, double h) { return simpson_impl(y, h); }

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol) {
    if (!(b > a)) throw DomainError("adaptive_simpson: need b > a");
    if (!(rel_tol > 0)) throw DomainError("adaptive_simpson: need rel_tol > 0");

    // Pre-split into panels so narrow features cannot fool a single estimate,
    // and to set an absolute tolerance from the |integral| scale.
    const int panels = 32;
    const double hp = (b - a) / panels;
    std::vector<double> fa(panels), fm(panels), fb(panels), s0(panels);
    double scale = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double x0 = a + p * hp, x1 = x0 + hp;
        fa[p] = f(x0);
        fm[p] = f(0.5 * (x0 + x1));
        fb[p] = f(x1);
        s0[p] = hp / 6.0 * (fa[p] + 4.0 * fm[p] + fb[p]);
        scale += std::abs(s0[p]);
    }
    if (scale == 0.0) scale = 1e-300;
    const double abs_tol = rel_tol * scale;

    AdaptiveSimpson ctx{f, b - a};
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double x0 = a + p * hp, x1 = x0 + hp;
        total += ctx.recurse(x0, x1, fa[p], fm[p], fb[p], s0[p], abs_tol / panels, 48);
    }
    return total;
}

cplx cubic_interp(std::span<const double> xs, std::span<const cplx> ys, double x) {
    const int n = static_cast<int>(xs.size());
    if (n < 2 || ys.size() != xs.size()) throw DomainError("cubic_interp: bad inputs");
    const double slack = 1e-9 * (std::abs(xs.front()) + std::abs(xs.back()) + 1.0);
    if (x < xs.front() - slack || x > xs.back() + slack)
        throw DomainError("cubic_interp: abscissa outside the grid");

    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    int i = static_cast<int>(it - xs.begin()) - 1;
    i = std::clamp(i, 0, n - 2);

    if (n < 4) {  // linear fallback for tiny grids
        const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return (1.0 - t) * ys[i] + t * ys[i + 1];
    }
    const int lo = std::clamp(i - 1, 0, n - 4);
    cplx acc = 0.0;
    for (int j = lo; j < lo + 4; ++j) {
        double w = 1.0;
        for (int k = lo; k < lo + 4; ++k)
            if (k != j) w *= (x - xs[k]) / (xs[j] - xs[k]);
        acc += w * ys[j];
    }
    return acc;
}

double parabola_peak(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d1 = (y1 - y0) / (x1 - x0);
    const double d2 = (y2 - y1) / (x2 - x1);
    const double curv = (d2 - d1) / (x2 - x0);
    if (curv == 0.0) return x1;
    const double peak = 0.5 * (x0 + x1 - d1 / curv);
    if (peak < std::min({x0, x1, x2}) || peak > std::max({x0, x1, x2})) return x1;
    return peak;
}

}  // namespace jwkbfit
