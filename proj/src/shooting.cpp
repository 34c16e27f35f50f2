#include "jwkbfit/shooting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "jwkbfit/numerics.hpp"

namespace jwkbfit {

namespace {

struct OdeState {
    cplx f, fp;
};

// Dormand-Prince 5(4) coefficients.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0, kA53 = 64448.0 / 6561.0,
                 kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

constexpr double kRenormHigh = 1e100;
constexpr double kRenormLow = 1e-100;

// Adaptive embedded Runge-Kutta for -f'' + W f = z f, i.e. (f, f')' = (f', (W - z) f).
// The state pair is renormalized whenever its magnitude leaves [1e-100, 1e100];
// the accumulated logarithmic scale is tracked separately.
class Shooter {
public:
    Shooter(const WorkingProblem& problem, cplx z, const IntegratorOptions& opts)
        : w_(problem.potential_eval), z_(z), rtol_(opts.rel_tol), hmax_(opts.max_step) {
        if (!(rtol_ > 0) || !(hmax_ > 0)) throw DomainError("integrator: bad tolerances");
    }

    void advance(double x0, double x1, OdeState& y, double& log_scale) const {
        if (x0 == x1) return;
        const double dir = (x1 > x0) ? 1.0 : -1.0;
        const double hmin = 1e-14 * (1.0 + std::abs(x0) + std::abs(x1));

        double x = x0;
        cplx wc = w_(x);
        const double k_local = std::sqrt(std::abs(wc - z_)) + 1.0;
        double h = dir * std::min({hmax_, std::abs(x1 - x0), 0.5 / k_local});

        OdeState k1{y.fp, (wc - z_) * y.f};
        long steps = 0;
        bool done = false;
        while (!done) {
            if (dir * (x1 - x) <= 0.0) break;  // landed on the boundary by rounding
            bool last = false;
            if (dir * (x + h) >= dir * x1) {
                h = x1 - x;
                last = true;
            }

            const cplx q2 = w_(x + h * 0.2) - z_;
            OdeState y2{y.f + h * (kA21 * k1.f), y.fp + h * (kA21 * k1.fp)};
            OdeState k2{y2.fp, q2 * y2.f};

            const cplx q3 = w_(x + h * 0.3) - z_;
            OdeState y3{y.f + h * (kA31 * k1.f + kA32 * k2.f),
                        y.fp + h * (kA31 * k1.fp + kA32 * k2.fp)};
            OdeState k3{y3.fp, q3 * y3.f};

            const cplx q4 = w_(x + h * 0.8) - z_;
            OdeState y4{y.f + h * (kA41 * k1.f + kA42 * k2.f + kA43 * k3.f),
                        y.fp + h * (kA41 * k1.fp + kA42 * k2.fp + kA43 * k3.fp)};
            OdeState k4{y4.fp, q4 * y4.f};

            const cplx q5 = w_(x + h * (8.0 / 9.0)) - z_;
            OdeState y5s{y.f + h * (kA51 * k1.f + kA52 * k2.f + kA53 * k3.f + kA54 * k4.f),
                         y.fp + h * (kA51 * k1.fp + kA52 * k2.fp + kA53 * k3.fp + kA54 * k4.fp)};
            OdeState k5{y5s.fp, q5 * y5s.f};

            const cplx wq6 = w_(x + h);
            const cplx q6 = wq6 - z_;
            OdeState y6{y.f + h * (kA61 * k1.f + kA62 * k2.f + kA63 * k3.f + kA64 * k4.f +
                                   kA65 * k5.f),
                        y.fp + h * (kA61 * k1.fp + kA62 * k2.fp + kA63 * k3.fp + kA64 * k4.fp +
                                    kA65 * k5.fp)};
            OdeState k6{y6.fp, q6 * y6.f};

            OdeState ynew{y.f + h * (kB1 * k1.f + kB3 * k3.f + kB4 * k4.f + kB5 * k5.f +
                                     kB6 * k6.f),
                          y.fp + h * (kB1 * k1.fp + kB3 * k3.fp + kB4 * k4.fp + kB5 * k5.fp +
                                      kB6 * k6.fp)};
            OdeState k7{ynew.fp, q6 * ynew.f};

            const cplx ef = h * (kE1 * k1.f + kE3 * k3.f + kE4 * k4.f + kE5 * k5.f + kE6 * k6.f +
                                 kE7 * k7.f);
            const cplx efp = h * (kE1 * k1.fp + kE3 * k3.fp + kE4 * k4.fp + kE5 * k5.fp +
                                  kE6 * k6.fp + kE7 * k7.fp);

            // Error measured against the solution envelope: f' is weighed by the
            // local wavenumber so isolated zeros of f do not stall the step.
            const double qn = std::sqrt(std::abs(wc - z_)) + 1e-8;
            const double env = std::max(std::max(std::abs(y.f), std::abs(ynew.f)),
                                        std::max(std::abs(y.fp), std::abs(ynew.fp)) / qn) +
                               1e-290;
            const double err =
                std::max(std::abs(ef), std::abs(efp) / qn) / (rtol_ * env);

            if (err <= 1.0) {
                x += h;
                y = ynew;
                k1 = k7;
                wc = wq6;
                const double mag = std::max(std::abs(y.f), std::abs(y.fp));
                if (mag > kRenormHigh || (mag > 0.0 && mag < kRenormLow)) {
                    y.f /= mag;
                    y.fp /= mag;
                    k1.f /= mag;
                    k1.fp /= mag;
                    log_scale += std::log(mag);
                }
                if (last) done = true;
                const double fac = std::clamp(0.9 * std::pow(std::max(err, 1e-30), -0.2), 1.0, 5.0);
                h = dir * std::min(hmax_, std::abs(h) * fac);
            } else {
                const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
                h *= fac;
            }
            if (!done && std::abs(h) < hmin)
                throw IntegrationError("integrate: step size underflow");
            if (++steps > 20000000L) throw IntegrationError("integrate: step budget exhausted");
        }
    }

private:
    const std::function<cplx(double)>& w_;
    cplx z_;
    double rtol_, hmax_;
};

OdeState parity_start(Parity parity) {
    return parity == Parity::Even ? OdeState{cplx(1.0, 0.0), cplx(0.0, 0.0)}
                                  : OdeState{cplx(0.0, 0.0), cplx(1.0, 0.0)};
}

// Start slope at X for the inward integration: -sqrt(W(X) - z), taking the
// root nearer the hint when one is supplied, otherwise requiring decay.
cplx inward_start_slope(const WorkingProblem& problem, cplx z, const IntegratorOptions& opts) {
    const cplx v = std::sqrt(problem.potential_eval(problem.truncation_radius) - z);
    if (opts.inward_slope_hint) {
        const cplx hint = *opts.inward_slope_hint;
        return (std::abs(-v - hint) <= std::abs(v - hint)) ? -v : v;
    }
    if (!(v.real() > 0.0))
        throw IntegrationError("integrate: non-decaying branch at X (Re sqrt(W(X)-z) <= 0)");
    return -v;
}

void check_match_point(const OdeState& s, cplx z) {
    if (std::abs(s.f) * (1.0 + std::sqrt(1.0 + std::abs(z))) < 1e-10 * std::abs(s.fp))
        throw MatchPointError("miss_distance: f vanished at the matching point");
}

std::vector<cplx> sample_potential(const WorkingProblem& problem,
                                   const std::vector<double>& xs) {
    std::vector<cplx> ws(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) ws[i] = problem.potential_eval(xs[i]);
    return ws;
}

double x_match_from_samples(const std::vector<double>& xs, const std::vector<cplx>& ws, cplx z,
                            double X) {
    // Momentum-weighted centroid of the admissible centers (Im W = Im z
    // crossings with eta^2 = Re z - Re W > 0). Crossings beyond the first
    // classical blocking point Re W > Re z are barrier or tail artifacts the
    // state never reaches; the weighting keeps shallow crossings from
    // dragging the match point away from the dominant mode.
    double x_block = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < xs.size(); ++i)
        if (ws[i].real() > z.real()) {
            x_block = xs[i];
            break;
        }
    double acc_a = 0.0, acc_w = 0.0;
    for (size_t i = 1; i < xs.size(); ++i) {
        const double g0 = ws[i - 1].imag() - z.imag();
        const double g1 = ws[i].imag() - z.imag();
        if (g0 == 0.0 || g0 * g1 < 0.0) {
            const double frac = (g0 == g1) ? 0.0 : g0 / (g0 - g1);
            const double a = xs[i - 1] + frac * (xs[i] - xs[i - 1]);
            if (a > 1.25 * x_block) continue;
            const double wre = ws[i - 1].real() + frac * (ws[i].real() - ws[i - 1].real());
            const double eta2 = z.real() - wre;
            if (eta2 > 1e-12) {
                acc_a += eta2 * a;
                acc_w += eta2;
            }
        }
    }
    // The two JWKB branches coexist only near the centers (their weights
    // split exponentially away from them), so the match point sits on the
    // momentum-weighted centroid where the miss keeps full sensitivity.
    if (acc_w > 0.0) return std::clamp(acc_a / acc_w, 0.04 * X, 0.9 * X);
    // No admissible center: place the match point inside the classically
    // allowed bulk. The inner turning point bounds the well around the
    // origin; the outer barrier exit of a bounded potential is useless here.
    double x_turn = -1.0;
    for (size_t i = 0; i < xs.size(); ++i) {
        if (ws[i].real() > z.real()) break;
        x_turn = xs[i];
    }
    if (x_turn > 0.0) return std::clamp(0.7 * x_turn, 0.04 * X, 0.9 * X);
    return 0.5 * X;
}

}  // namespace

ShootingSamples integrate_schrodinger(const WorkingProblem& problem, cplx z, Parity parity,
                                      Direction direction, std::span<const double> grid,
                                      const IntegratorOptions& opts) {
    const int n = static_cast<int>(grid.size());
    if (n < 1) throw DomainError("integrate_schrodinger: empty grid");
    const double X = problem.truncation_radius;
    for (int i = 1; i < n; ++i)
        if (!(grid[i] > grid[i - 1]))
            throw DomainError("integrate_schrodinger: grid must be strictly increasing");
    if (grid.front() < -1e-12 || grid.back() > X * (1.0 + 1e-12))
        throw DomainError("integrate_schrodinger: grid outside [0, X]");

    ShootingSamples out;
    out.f.resize(n);
    out.fprime.resize(n);
    out.log_scale.resize(n);

    Shooter sh(problem, z, opts);
    if (direction == Direction::Outward) {
        OdeState s = parity_start(parity);
        double lsc = 0.0;
        sh.advance(0.0, grid[0], s, lsc);
        out.f[0] = s.f;
        out.fprime[0] = s.fp;
        out.log_scale[0] = lsc;
        for (int i = 1; i < n; ++i) {
            sh.advance(grid[i - 1], grid[i], s, lsc);
            out.f[i] = s.f;
            out.fprime[i] = s.fp;
            out.log_scale[i] = lsc;
        }
    } else {
        OdeState s{cplx(1.0, 0.0), inward_start_slope(problem, z, opts)};
        double lsc = 0.0;
        sh.advance(X, grid[n - 1], s, lsc);
        out.f[n - 1] = s.f;
        out.fprime[n - 1] = s.fp;
        out.log_scale[n - 1] = lsc;
        for (int i = n - 2; i >= 0; --i) {
            sh.advance(grid[i + 1], grid[i], s, lsc);
            out.f[i] = s.f;
            out.fprime[i] = s.fp;
            out.log_scale[i] = lsc;
        }
    }
    return out;
}

cplx miss_distance(const WorkingProblem& problem, cplx z, Parity parity, double x_match,
                   const IntegratorOptions& opts) {
    const double X = problem.truncation_radius;
    if (!(x_match > 0.0 && x_match < X))
        throw DomainError("miss_distance: need 0 < x_match < X");

    Shooter sh(problem, z, opts);
    OdeState so = parity_start(parity);
    double lo = 0.0;
    sh.advance(0.0, x_match, so, lo);
    check_match_point(so, z);

    OdeState si{cplx(1.0, 0.0), inward_start_slope(problem, z, opts)};
    double li = 0.0;
    sh.advance(X, x_match, si, li);
    check_match_point(si, z);

    return so.fp / so.f - si.fp / si.f;
}

namespace {

// A converged root must also be sensitive: when the inward pass crosses a
// long classically forbidden stretch, roundoff amplified along the dominant
// exponential erases the boundary information and the miss degenerates to
// zero at every z. Such "roots" are rejected.
void require_sensitivity(const std::function<cplx(cplx)>& miss, cplx z, cplx g_at_root) {
    const cplx delta = 1e-3 * (1.0 + std::abs(z)) * cplx(0.8, 0.6);
    const cplx g_near = miss(z + delta);
    if (std::abs(g_near) < 50.0 * (std::abs(g_at_root) + 1e-12))
        throw RootError("find_eigenvalue: degenerate matching (boundary information lost)");
}

cplx secant_solve(const WorkingProblem& problem, cplx seed, Parity parity, double x_match,
                  const RootOptions& opts) {
    auto miss = [&](cplx z) { return miss_distance(problem, z, parity, x_match, opts.integrator); };

    cplx z0 = seed;
    cplx g0 = miss(z0);
    if (std::abs(g0) < 1e-12) {
        require_sensitivity(miss, z0, g0);
        return z0;
    }
    cplx z1 = z0 + 1e-5 * (1.0 + std::abs(z0));
    cplx g1 = miss(z1);

    for (int it = 0; it < opts.max_iterations; ++it) {
        cplx den = g1 - g0;
        if (std::abs(den) == 0.0) {
            z1 += 1e-7 * (1.0 + std::abs(z1));
            g1 = miss(z1);
            continue;
        }
        const cplx dz = -g1 * (z1 - z0) / den;
        const cplx z2 = z1 + dz;
        if (std::abs(z2 - seed) > opts.trust_radius)
            throw RootError("find_eigenvalue: iterate left the trust region");
        const cplx g2 = miss(z2);
        if (std::abs(dz) < 1e-10 * (1.0 + std::abs(z2)) && std::abs(g2) < 1e-8) {
            require_sensitivity(miss, z2, g2);
            return z2;
        }
        z0 = z1;
        g0 = g1;
        z1 = z2;
        g1 = g2;
    }
    throw RootError("find_eigenvalue: secant iteration did not converge");
}

}  // namespace

cplx find_eigenvalue(const WorkingProblem& problem, cplx z_seed, Parity parity,
                     const RootOptions& opts) {
    const double X = problem.truncation_radius;
    const double xm0 = (opts.x_match > 0.0) ? opts.x_match : 0.5 * X;
    const double quarter_wave = kPi / (2.0 * std::sqrt(1.0 + std::abs(z_seed)));
    // Node collisions are healed by quarter-wave shifts; an insensitive match
    // point (secant stall, wild excursion, or a degenerate-matching rejection)
    // by moving it outright, ending with fixed fractions of the domain.
    const double bases[] = {xm0,        0.8 * xm0,  1.2 * xm0, 0.6 * xm0,
                            0.25 * X,   0.45 * X,   0.65 * X};
    const double offsets[] = {0.0, 0.9, -0.9, 1.7, -1.7, 2.6};

    std::string last_error = "find_eigenvalue: no matching point attempted";
    for (double b : bases) {
        for (double o : offsets) {
            const double xm = std::clamp(b + o * quarter_wave, 0.02 * X, 0.98 * X);
            try {
                return secant_solve(problem, z_seed, parity, xm, opts);
            } catch (const MatchPointError& e) {
                last_error = e.what();
                continue;  // f had a node here; shift within this scale
            } catch (const RootError& e) {
                last_error = e.what();
                break;  // stalled or escaped; try the next match-point scale
            }
        }
    }
    throw RootError(last_error);
}

EigenPair extract_eigenpair(const WorkingProblem& problem, cplx z, Parity parity, int index,
                            std::span<const double> grid, const RootOptions& opts) {
    const int n = static_cast<int>(grid.size());
    if (n < 16) throw DomainError("extract_eigenpair: need a denser grid");
    const double X = problem.truncation_radius;
    const double xm = (opts.x_match > 0.0) ? opts.x_match : choose_x_match(problem, z);

    // uniform-grid check: the normalization quadrature relies on it
    const double h = (grid.back() - grid.front()) / (n - 1);
    for (int i = 1; i < n; ++i)
        if (std::abs(grid[i] - grid[i - 1] - h) > 1e-6 * h)
            throw DomainError("extract_eigenpair: grid must be uniform");
    if (std::abs(grid.front()) > 1e-12 || std::abs(grid.back() - X) > 1e-9 * X)
        throw DomainError("extract_eigenpair: grid must span [0, X]");

    int im = static_cast<int>(std::lround((xm - grid.front()) / h));
    im = std::clamp(im, 2, n - 3);
    const int jlo = std::max(1, im - 40);
    const int jhi = std::min(n - 2, im + 40);

    auto out = integrate_schrodinger(problem, z, parity, Direction::Outward,
                                     grid.subspan(0, static_cast<size_t>(jhi) + 1),
                                     opts.integrator);
    auto inw = integrate_schrodinger(problem, z, parity, Direction::Inward,
                                     grid.subspan(static_cast<size_t>(jlo)), opts.integrator);

    // glue where both branches are well conditioned
    int jbest = jlo;
    double best = -1.0;
    for (int j = jlo; j <= jhi; ++j) {
        const double score = std::abs(out.f[j]) * std::abs(inw.f[j - jlo]);
        if (score > best) {
            best = score;
            jbest = j;
        }
    }
    if (!(best > 0.0)) throw RootError("extract_eigenpair: degenerate glue region");

    const cplx ratio_u = out.f[jbest] / inw.f[jbest - jlo];
    const double ratio_g = out.log_scale[jbest] - inw.log_scale[jbest - jlo];

    std::vector<cplx> u(n), ld(n);
    std::vector<double> g(n);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int i = 0; i < n; ++i) {
        cplx fv, fpv;
        if (i <= jbest) {
            fv = out.f[i];
            fpv = out.fprime[i];
            g[i] = out.log_scale[i];
        } else {
            fv = inw.f[i - jlo] * ratio_u;
            fpv = inw.fprime[i - jlo] * ratio_u;
            g[i] = inw.log_scale[i - jlo] + ratio_g;
        }
        u[i] = fv;
        ld[i] = (std::abs(fv) > 1e-14 * (std::abs(fv) + std::abs(fpv))) ? fpv / fv
                                                                        : cplx(nan, nan);
    }

    double m_log = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        if (u[i] != cplx(0.0, 0.0)) m_log = std::max(m_log, std::log(std::abs(u[i])) + g[i]);
    if (!std::isfinite(m_log)) throw RootError("extract_eigenpair: zero eigenfunction");

    std::vector<cplx> f(n);
    for (int i = 0; i < n; ++i) {
        const double e = g[i] - m_log;
        f[i] = (u[i] == cplx(0.0, 0.0) || e < -700.0) ? cplx(0.0, 0.0) : u[i] * std::exp(e);
    }

    std::vector<double> mod2(n);
    for (int i = 0; i < n; ++i) mod2[i] = std::norm(f[i]);
    const double nrm = std::sqrt(simpson_uniform(std::span<const double>(mod2), h));
    if (!(nrm > 0.0)) throw RootError("extract_eigenpair: zero norm");
    for (auto& v : f) v /= nrm;

    int imax = 0;
    double amax = 0.0;
    for (int i = 0; i < n; ++i)
        if (std::abs(f[i]) > amax) {
            amax = std::abs(f[i]);
            imax = i;
        }
    const cplx phase = f[imax] / std::abs(f[imax]);
    const cplx rot = std::conj(phase);
    for (auto& v : f) v *= rot;

    EigenPair pair;
    pair.index = index;
    pair.parity = parity;
    pair.z = z;
    pair.lambda = z / problem.eigen_scale;
    pair.grid.assign(grid.begin(), grid.end());
    pair.f = std::move(f);
    pair.log_derivative = std::move(ld);
    return pair;
}

double argmax_abs(const EigenPair& pair) {
    const int n = static_cast<int>(pair.f.size());
    int imax = 0;
    double amax = -1.0;
    for (int i = 0; i < n; ++i) {
        const double a = std::abs(pair.f[i]);
        if (a > amax) {
            amax = a;
            imax = i;
        }
    }
    if (imax == 0 || imax == n - 1) return pair.grid[imax];
    return parabola_peak(pair.grid[imax - 1], std::abs(pair.f[imax - 1]), pair.grid[imax],
                         std::abs(pair.f[imax]), pair.grid[imax + 1], std::abs(pair.f[imax + 1]));
}

double choose_x_match(const WorkingProblem& problem, cplx z) {
    const double X = problem.truncation_radius;
    const auto xs = uniform_grid(1e-4 * X, X, 1201);
    const auto ws = sample_potential(problem, xs);
    return x_match_from_samples(xs, ws, z, X);
}

void continue_family(const std::function<WorkingProblem(double)>& family,
                     std::vector<TrackedRoot>& roots, const ContinuationOptions& opts) {
    if (roots.empty()) return;

    {
        // Prime match points and boundary branches at t = 0 (best effort: the
        // decaying branch may be degenerate exactly at the start).
        const WorkingProblem p0 = family(0.0);
        const double X = p0.truncation_radius;
        const auto xs = uniform_grid(1e-4 * X, X, 1201);
        const auto ws = sample_potential(p0, xs);
        for (auto& r : roots) {
            if (r.x_match <= 0.0) r.x_match = x_match_from_samples(xs, ws, r.z, X);
            if (!r.inward_slope) {
                const cplx v = std::sqrt(p0.potential_eval(X) - r.z);
                if (v.real() > 0.0) r.inward_slope = -v;
            }
        }
    }

    double t = 0.0;
    double dt = std::min(opts.dt_initial, opts.dt_max);
    double dt_last = 0.0;
    std::vector<cplx> z_prev;  // committed z of the step before last
    int streak = 0;

    while (t < 1.0 - 1e-12) {
        const double step = std::min(dt, 1.0 - t);
        std::vector<TrackedRoot> next = roots;
        bool ok = true;
        std::string why;
        try {
            const WorkingProblem p = family(t + step);
            const double X = p.truncation_radius;
            const auto xs = uniform_grid(1e-4 * X, X, 1201);
            const auto ws = sample_potential(p, xs);

            for (size_t k = 0; k < next.size(); ++k) {
                TrackedRoot& r = next[k];
                double gap = std::numeric_limits<double>::infinity();
                for (size_t j = 0; j < roots.size(); ++j)
                    if (j != k) gap = std::min(gap, std::abs(roots[k].z - roots[j].z));
                const double trust = std::clamp(0.45 * gap, 0.75, 2.5);

                cplx zp = r.z;
                if (dt_last > 0.0 && k < z_prev.size())
                    zp += (r.z - z_prev[k]) * (step / dt_last);

                r.x_match = x_match_from_samples(xs, ws, zp, X);
                const cplx v = std::sqrt(p.potential_eval(X) - zp);
                if (r.inward_slope) {
                    const cplx hint = *r.inward_slope;
                    r.inward_slope = (std::abs(-v - hint) <= std::abs(v - hint)) ? -v : v;
                } else if (v.real() > 0.0) {
                    r.inward_slope = -v;
                }

                RootOptions ro;
                ro.x_match = r.x_match;
                ro.trust_radius = trust;
                ro.integrator = opts.integrator;
                ro.integrator.inward_slope_hint = r.inward_slope;
                try {
                    r.z = find_eigenvalue(p, zp, r.parity, ro);
                } catch (const Error& e) {
                    std::ostringstream msg;
                    msg << "index " << r.index << " (z_pred = " << zp.real() << (zp.imag() < 0 ? " - " : " + ")
                        << std::abs(zp.imag()) << "i, x_match = " << r.x_match << "): " << e.what();
                    throw RootError(msg.str());
                }

                if (r.inward_slope) {
                    const cplx vc = std::sqrt(p.potential_eval(X) - r.z);
                    const cplx hint = *r.inward_slope;
                    r.inward_slope = (std::abs(-vc - hint) <= std::abs(vc - hint)) ? -vc : vc;
                }
            }
            for (size_t i = 0; i < next.size(); ++i)
                for (size_t j = i + 1; j < next.size(); ++j)
                    if (std::abs(next[i].z - next[j].z) < opts.collision_tol)
                        throw RootError("continuation: tracked eigenvalues collided");
        } catch (const Error& e) {
            ok = false;
            why = e.what();
        }

        if (ok) {
            z_prev.resize(roots.size());
            for (size_t k = 0; k < roots.size(); ++k) z_prev[k] = roots[k].z;
            roots = std::move(next);
            t += step;
            dt_last = step;
            if (opts.on_step) opts.on_step(t, roots);
            if (++streak >= 2) {
                dt = std::min(dt * 1.3, opts.dt_max);
                streak = 0;
            }
        } else {
            if (step <= opts.dt_min * 1.000001) {
                std::ostringstream msg;
                msg << "continuation stalled at t = " << t << " (step " << step << "): " << why;
                throw RootError(msg.str());
            }
            dt = std::max(0.5 * step, opts.dt_min);
            streak = 0;
        }
    }
}

std::vector<SelfAdjointLevel> selfadjoint_levels(const WorkingProblem& problem, double lambda_min,
                                                 double lambda_max, int m_max) {
    if (!(lambda_max > lambda_min)) throw DomainError("selfadjoint_levels: empty energy window");
    const double X = problem.truncation_radius;

    const auto xs = uniform_grid(1e-5 * X, X, 2001);
    std::vector<double> wre(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) wre[i] = problem.potential_eval(xs[i]).real();

    auto turning_point = [&](double lam) {
        for (int i = static_cast<int>(xs.size()) - 1; i >= 0; --i)
            if (wre[static_cast<size_t>(i)] <= lam) return xs[static_cast<size_t>(i)];
        return xs[0];
    };
    auto match_for = [&](double lam) {
        return std::clamp(0.7 * turning_point(lam), std::max(0.3, 0.02 * X), 0.9 * X);
    };

    IntegratorOptions iopt;
    auto wron = [&](double lam, Parity par) {
        const double xm = match_for(lam);
        Shooter sh(problem, cplx(lam, 0.0), iopt);
        OdeState so = parity_start(par);
        double lo = 0.0;
        sh.advance(0.0, xm, so, lo);
        const cplx v = std::sqrt(problem.potential_eval(X) - lam);
        if (!(v.real() > 0.0))
            throw IntegrationError("selfadjoint_levels: level above the boundary barrier");
        OdeState si{cplx(1.0, 0.0), -v};
        double li = 0.0;
        sh.advance(X, xm, si, li);
        return (so.fp * si.f - si.fp * so.f).real();
    };

    std::vector<SelfAdjointLevel> out;
    for (Parity par : {Parity::Even, Parity::Odd}) {
        std::vector<double> roots;
        const double span = lambda_max - lambda_min;
        const double step = std::min(0.35, span / 64.0);
        double prev_l = lambda_min;
        double prev_w = wron(prev_l, par);
        for (double l = lambda_min + step; l < lambda_max + 0.5 * step; l += step) {
            const double lam = std::min(l, lambda_max);
            const double wv = wron(lam, par);
            if (prev_w == 0.0 || prev_w * wv < 0.0) {
                double a = prev_l, b = lam, fa = prev_w;
                for (int it = 0; it < 64 && (b - a) > 1e-13 * (1.0 + std::abs(b)); ++it) {
                    const double mid = 0.5 * (a + b);
                    const double fm = wron(mid, par);
                    if (fa * fm <= 0.0) {
                        b = mid;
                    } else {
                        a = mid;
                        fa = fm;
                    }
                }
                roots.push_back(0.5 * (a + b));
            }
            prev_l = lam;
            prev_w = wv;
        }
        // The scan starts at the spectrum bottom and Sturm interlacing keeps
        // the roots simple, so the rank within the parity class is the label.
        std::sort(roots.begin(), roots.end());
        for (size_t k = 0; k < roots.size(); ++k) {
            const int m = (par == Parity::Even) ? 2 * static_cast<int>(k)
                                                : 2 * static_cast<int>(k) + 1;
            if (m <= m_max) out.push_back({m, roots[k]});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const SelfAdjointLevel& a, const SelfAdjointLevel& b) { return a.index < b.index; });
    return out;
}

double default_truncation(const PotentialSpec& spec, int m_max) {
    if (spec.kind == PotentialKind::HarmonicComplex) {
        // Radius of the largest state along the whole continuation path; at
        // c = 1 the turning point sqrt(2m+1) dominates the rotated center.
        const double t = std::sqrt((2.0 * m_max + 1.0) / spec.c.real());
        return std::min(25.0, t + 12.0 / std::sqrt(std::max(t, 1.0)));
    }
    // Bound-state-like regime (the potential still rises at the turning
    // radius): a tight domain keeps the inward pass's forbidden stretch short
    // enough that the boundary information survives the double-precision
    // range. Resonance regime: the weakly decaying high states need room
    // (they move by ~1e-2 between X = 18 and X = 26).
    const double x_turn = std::sqrt(2.0 * m_max + 1.0) + 4.0;
    double x_peak = spec.beta;
    if (spec.kind == PotentialKind::GaussianBump) x_peak = spec.b;
    if (x_turn < x_peak) return x_turn;
    return 26.0;
}

std::vector<EigenPair> continue_in_angle(const PotentialSpec& spec, int m_max,
                                         const AngleContinuationOptions& opts) {
    spec.validate();
    const double theta = std::arg(spec.c);
    if (!(theta > 0.0 && theta <= kPi / 4.0 + 1e-12))
        throw DomainError("continue_in_angle: need arg c in (0, pi/4]");
    if (std::abs(std::abs(spec.c) - 1.0) > 1e-9)
        throw DomainError("continue_in_angle: need |c| = 1");
    if (m_max < 0) throw DomainError("continue_in_angle: need m_max >= 0");

    const double x_full = (opts.truncation_radius > 0.0) ? opts.truncation_radius
                                                         : default_truncation(spec, m_max);
    PotentialSpec spec0 = spec;
    spec0.c = cplx(1.0, 0.0);

    // theta = 0 stage. Bounded families are truncated at the barrier top where
    // the decaying boundary condition is valid for every quasi-bound level.
    double x0 = x_full;
    double lam_hi;
    if (spec.kind == PotentialKind::HarmonicComplex) {
        lam_hi = 2.0 * m_max + 3.0;
    } else {
        const auto xs = uniform_grid(1e-3, x_full, 4001);
        double best = -std::numeric_limits<double>::infinity();
        double xstar = xs[0];
        for (double x : xs) {
            const double v = eval_potential(spec0, x).real();
            if (v > best) {
                best = v;
                xstar = x;
            }
        }
        x0 = xstar;
        lam_hi = 0.997 * best;
    }
    const WorkingProblem p0 = to_working_problem(spec0, x0);
    double lam_lo = std::numeric_limits<double>::infinity();
    for (double x : uniform_grid(1e-5, x0, 801))
        lam_lo = std::min(lam_lo, p0.potential_eval(x).real());
    lam_lo += 1e-6 * (1.0 + std::abs(lam_lo));

    const auto levels = selfadjoint_levels(p0, lam_lo, lam_hi, m_max);
    if (levels.empty()) throw RootError("continue_in_angle: no self-adjoint levels found");

    std::vector<TrackedRoot> roots;
    for (const auto& lv : levels)
        roots.push_back({lv.index, parity_of_index(lv.index), cplx(lv.lambda, 0.0), std::nullopt,
                         0.0});

    const int n_steps = std::max(1, static_cast<int>(std::ceil(theta / 0.02 - 1e-12)));
    ContinuationOptions copt = opts.continuation;
    copt.dt_initial = copt.dt_max = 1.0 / n_steps;

    auto family = [spec, theta, x_full](double t) {
        PotentialSpec st = spec;
        st.c = std::polar(1.0, theta * t);
        return to_working_problem(st, x_full);
    };
    continue_family(family, roots, copt);

    const WorkingProblem pf = to_working_problem(spec, x_full);
    const auto grid = uniform_grid(0.0, x_full, opts.grid_points);
    std::vector<EigenPair> out;
    for (const auto& r : roots) {
        RootOptions ro;
        ro.x_match = r.x_match;
        ro.integrator = copt.integrator;
        ro.integrator.inward_slope_hint = r.inward_slope;
        out.push_back(extract_eigenpair(pf, r.z, r.parity, r.index, grid, ro));
    }
    std::sort(out.begin(), out.end(),
              [](const EigenPair& a, const EigenPair& b) { return a.index < b.index; });
    return out;
}

}  // namespace jwkbfit
