#include "jwkbfit/jwkb.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "jwkbfit/numerics.hpp"

namespace jwkbfit {

namespace {

constexpr double kPhiFloor = 1e-12;

// Square root continued toward a reference value; the two roots differ by a
// sign, so the nearer one keeps the branch continuous.
cplx tracked_sqrt(cplx phi, cplx ref) {
    if (std::abs(phi) < kPhiFloor)
        throw BranchError("phase integrand nearly vanished: square-root branch is ambiguous");
    const cplx r = std::sqrt(phi);
    return (std::abs(r - ref) <= std::abs(-r - ref)) ? r : -r;
}

struct PhaseIntegrand {
    const WorkingProblem* problem;
    double a;
    double eta2;
    cplx wa;

    cplx phi(double s) const { return 1.0 - (problem->potential_eval(a + s) - wa) / eta2; }
};

// Integral of the tracked sqrt(phi) over [0, s_end] (signed), by fine
// composite Simpson with the branch carried through every sub-node. Used for
// the eta sign rule and the local-decay probe near s = 0.
cplx phase_probe(const PhaseIntegrand& pi, double s_end, int panels = 8) {
    cplx q0 = 1.0;
    cplx acc = 0.0;
    const double hstep = s_end / panels;
    double s = 0.0;
    for (int k = 0; k < panels; ++k) {
        const cplx qm = tracked_sqrt(pi.phi(s + 0.5 * hstep), q0);
        const cplx q1 = tracked_sqrt(pi.phi(s + hstep), qm);
        acc += (hstep / 6.0) * (q0 + 4.0 * qm + q1);
        q0 = q1;
        s += hstep;
    }
    return acc;
}

}  // namespace

std::vector<CenterPair> solve_center_equation(const WorkingProblem& problem, cplx lambda,
                                              const CenterOptions& opts) {
    const double X = problem.truncation_radius;
    const cplx z = problem.eigen_scale * lambda;
    const double eps = (opts.probe_eps > 0.0) ? opts.probe_eps : X / 4500.0;
    if (!(opts.scan_step > 0.0)) throw DomainError("solve_center_equation: bad scan step");

    // Dense scan of Im W(a) - Im z for sign changes.
    const int nscan = static_cast<int>(std::floor(X / opts.scan_step));
    auto g = [&](double x) { return problem.potential_eval(x).imag() - z.imag(); };

    double prev_x = opts.scan_step;
    double prev_g = g(prev_x);
    double gmax = std::abs(prev_g);
    std::vector<double> roots_a;
    for (int i = 2; i <= nscan; ++i) {
        const double x = i * opts.scan_step;
        const double gv = g(x);
        gmax = std::max(gmax, std::abs(gv));
        if (prev_g == 0.0) {
            roots_a.push_back(prev_x);
        } else if (prev_g * gv < 0.0) {
            double lo = prev_x, hi = x, flo = prev_g;
            while (hi - lo > 1e-12) {
                const double mid = 0.5 * (lo + hi);
                const double fm = g(mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots_a.push_back(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_g = gv;
    }
    // Degenerate (self-adjoint) case: Im W - Im z vanishes identically.
    if (gmax < 1e-13 * (1.0 + std::abs(z))) return {};

    std::vector<CenterPair> out;
    for (double a : roots_a) {
        const cplx wa = problem.potential_eval(a);
        const double eta2 = z.real() - wa.real();
        if (!(eta2 > 0.0)) continue;
        const double eta_abs = std::sqrt(eta2);

        PhaseIntegrand pi{&problem, a, eta2, wa};
        const double er = std::min(eps, 0.45 * (X - a));
        const double el = std::min(eps, 0.45 * a);
        if (!(er > 0.0 && el > 0.0)) continue;

        const cplx ir = phase_probe(pi, er);   // integral over [0, +er]
        const cplx il = phase_probe(pi, -el);  // signed integral over [0, -el]

        // Re psi(s) = Re(i eta I(s)) = -eta Im I(s); pick the sign of eta that
        // decays to the right, then require decay on the left as well.
        double eta;
        if (-eta_abs * ir.imag() > 0.0) {
            eta = eta_abs;
        } else if (eta_abs * ir.imag() > 0.0) {
            eta = -eta_abs;
        } else {
            continue;  // degenerate: no decaying sign
        }
        if (!(-eta * il.imag() > 0.0)) continue;  // grows on the left side

        out.push_back({a, eta});
    }
    std::sort(out.begin(), out.end(),
              [](const CenterPair& p, const CenterPair& q) { return p.a < q.a; });
    return out;
}

RefinedCenter refine_center(const WorkingProblem& problem, cplx lambda, const CenterPair& seed) {
    const cplx z = problem.eigen_scale * lambda;
    const cplx i_unit(0.0, 1.0);
    auto residual = [&](double a, double eta) {
        return z + i_unit * problem.potential_deriv(a) / (2.0 * eta) - eta * eta -
               problem.potential_eval(a);
    };

    double a = seed.a, eta = seed.eta;
    cplx F = residual(a, eta);
    const double tol = 1e-11 * (1.0 + std::abs(z));
    bool converged = false;
    for (int it = 0; it < 50; ++it) {
        if (std::abs(F) < tol) {
            converged = true;
            break;
        }
        const cplx w1 = problem.potential_deriv(a);
        const cplx w2 = problem.potential_deriv2(a);
        const cplx dFa = i_unit * w2 / (2.0 * eta) - w1;
        const cplx dFe = -i_unit * w1 / (2.0 * eta * eta) - 2.0 * eta;

        // 2x2 real Newton system
        const double j00 = dFa.real(), j01 = dFe.real();
        const double j10 = dFa.imag(), j11 = dFe.imag();
        const double det = j00 * j11 - j01 * j10;
        if (det == 0.0) break;
        const double da = (-F.real() * j11 + F.imag() * j01) / det;
        const double de = (-j00 * F.imag() + j10 * F.real()) / det;

        double damp = 1.0;
        bool improved = false;
        for (int k = 0; k < 6; ++k) {
            const double an = a + damp * da;
            const double en = eta + damp * de;
            if (an > 0.0 && en != 0.0) {
                const cplx Fn = residual(an, en);
                if (std::abs(Fn) < std::abs(F)) {
                    a = an;
                    eta = en;
                    F = Fn;
                    improved = true;
                    break;
                }
            }
            damp *= 0.5;
        }
        if (!improved) break;
    }
    if (!converged && std::abs(F) < tol) converged = true;
    if (!converged) return {seed, false};
    return {CenterPair{a, eta}, true};
}

std::vector<RefinedCenter> solve_refined_center(const WorkingProblem& problem, cplx lambda,
                                                const CenterOptions& opts) {
    std::vector<RefinedCenter> out;
    for (const auto& seed : solve_center_equation(problem, lambda, opts))
        out.push_back(refine_center(problem, lambda, seed));
    return out;
}

std::vector<double> make_mode_grid(double a, double X, int n_points) {
    if (!(a > 0.0 && a < X)) throw DomainError("make_mode_grid: center outside (0, X)");
    const auto xs = uniform_grid(-X, X, 2 * n_points - 1);
    std::vector<double> s;
    s.reserve(xs.size() + 1);
    const double tol = 1e-12 * X;
    bool inserted = false;
    for (double x : xs) {
        const double sv = x - a;
        if (!inserted && sv > tol) {
            s.push_back(0.0);
            inserted = true;
        }
        if (std::abs(sv) <= tol) {
            s.push_back(0.0);
            inserted = true;
        } else {
            s.push_back(sv);
        }
    }
    return s;
}

namespace {

struct PhaseBuild {
    std::vector<cplx> psi, q, r4;
    int anchor = -1;
};

PhaseBuild build_phase_data(const WorkingProblem& problem, const CenterPair& center,
                            std::span<const double> s_grid) {
    const int n = static_cast<int>(s_grid.size());
    if (n < 3) throw DomainError("build_phase: grid too small");
    int anchor = -1;
    for (int i = 0; i < n; ++i) {
        if (std::abs(s_grid[i]) < 1e-11) {
            anchor = i;
            break;
        }
        if (i > 0 && !(s_grid[i] > s_grid[i - 1]))
            throw DomainError("build_phase: grid must be strictly increasing");
    }
    if (anchor < 0) throw DomainError("build_phase: grid must contain s = 0");

    const double eta2 = center.eta * center.eta;
    if (!(eta2 > 0.0)) throw DomainError("build_phase: eta must be nonzero");
    PhaseIntegrand pi{&problem, center.a, eta2, problem.potential_eval(center.a)};
    const cplx ieta(0.0, center.eta);

    PhaseBuild out;
    out.anchor = anchor;
    out.psi.assign(n, cplx(0.0, 0.0));
    out.q.assign(n, cplx(0.0, 0.0));
    out.r4.assign(n, cplx(0.0, 0.0));
    out.q[anchor] = 1.0;
    out.r4[anchor] = 1.0;

    // rightward sweep
    for (int i = anchor + 1; i < n; ++i) {
        const double s0 = s_grid[i - 1], s1 = s_grid[i];
        const cplx qm = tracked_sqrt(pi.phi(0.5 * (s0 + s1)), out.q[i - 1]);
        out.q[i] = tracked_sqrt(pi.phi(s1), qm);
        out.psi[i] = out.psi[i - 1] + ieta * ((s1 - s0) / 6.0) * (out.q[i - 1] + 4.0 * qm + out.q[i]);
        const cplx r4m = tracked_sqrt(qm, out.r4[i - 1]);
        out.r4[i] = tracked_sqrt(out.q[i], r4m);
    }
    // leftward sweep
    for (int i = anchor - 1; i >= 0; --i) {
        const double s0 = s_grid[i + 1], s1 = s_grid[i];
        const cplx qm = tracked_sqrt(pi.phi(0.5 * (s0 + s1)), out.q[i + 1]);
        out.q[i] = tracked_sqrt(pi.phi(s1), qm);
        out.psi[i] = out.psi[i + 1] + ieta * ((s1 - s0) / 6.0) * (out.q[i + 1] + 4.0 * qm + out.q[i]);
        const cplx r4m = tracked_sqrt(qm, out.r4[i + 1]);
        out.r4[i] = tracked_sqrt(out.q[i], r4m);
    }
    return out;
}

cplx exp_clamped(cplx arg) {
    if (arg.real() > 700.0) arg = cplx(700.0, arg.imag());
    return std::exp(arg);
}

}  // namespace

std::vector<cplx> build_phase(const WorkingProblem& problem, const CenterPair& center,
                              std::span<const double> s_grid) {
    return build_phase_data(problem, center, s_grid).psi;
}

JwkbMode build_mode(const WorkingProblem& problem, const CenterPair& center, double h,
                    std::span<const double> s_grid) {
    if (!(h > 0.0)) throw DomainError("build_mode: need h > 0");
    auto pb = build_phase_data(problem, center, s_grid);
    const int n = static_cast<int>(s_grid.size());

    JwkbMode mode;
    mode.center = center;
    mode.h = h;
    mode.grid.assign(s_grid.begin(), s_grid.end());
    mode.anchor_index = pb.anchor;
    mode.anchor_inserted = false;
    {
        // The inserted anchor splits one uniform cell: its two neighbor cells
        // together span a single step of the underlying x-grid.
        const int i = pb.anchor;
        if (i > 0 && i + 1 < n) {
            double h_typ = 0.0;
            for (int k = 1; k < n; ++k) h_typ = std::max(h_typ, mode.grid[k] - mode.grid[k - 1]);
            const double left = mode.grid[i] - mode.grid[i - 1];
            const double right = mode.grid[i + 1] - mode.grid[i];
            mode.anchor_inserted = (left + right) < 1.5 * h_typ;
        }
    }
    mode.z = center.eta * center.eta + problem.potential_eval(center.a);

    const double a = center.a;
    const double eta = center.eta;
    const double eta2 = eta * eta;
    auto weval = problem.potential_eval;
    auto wder = problem.potential_deriv;
    auto wder2 = problem.potential_deriv2;
    mode.w = [weval, a](double s) { return weval(a + s); };
    mode.w1 = [wder, a](double s) { return wder(a + s); };
    mode.w2 = [wder2, a](double s) { return wder2(a + s); };

    mode.psi = std::move(pb.psi);
    mode.sqrt_phi = std::move(pb.q);
    mode.root4 = std::move(pb.r4);
    mode.xi0.resize(n);
    mode.y.resize(n);
    mode.log_derivative.resize(n);
    const cplx ieta(0.0, eta);
    for (int i = 0; i < n; ++i) {
        mode.xi0[i] = 1.0 / mode.root4[i];
        mode.y[i] = mode.xi0[i] * exp_clamped(-mode.psi[i] / h);
        const cplx phi = mode.sqrt_phi[i] * mode.sqrt_phi[i];
        const cplx phi1 = -mode.w1(mode.grid[i]) / eta2;
        mode.log_derivative[i] = -phi1 / (4.0 * phi) - ieta * mode.sqrt_phi[i] / h;
    }
    return mode;
}

namespace {

// Branch-tracked local data at an arbitrary s, continued from the nearest
// grid node of the mode.
struct LocalEval {
    cplx psi, q, r4;
};

LocalEval local_from_node(const JwkbMode& mode, double s) {
    const auto& gs = mode.grid;
    const int n = static_cast<int>(gs.size());
    auto it = std::lower_bound(gs.begin(), gs.end(), s);
    int i = static_cast<int>(it - gs.begin());
    if (i >= n) i = n - 1;
    if (i > 0 && (i == n || std::abs(gs[i - 1] - s) < std::abs(gs[i] - s))) i = i - 1;

    const double s0 = gs[i];
    const double eta2 = mode.center.eta * mode.center.eta;
    const cplx wa = mode.w(0.0);
    auto phi = [&](double t) { return 1.0 - (mode.w(t) - wa) / eta2; };

    LocalEval lv{mode.psi[i], mode.sqrt_phi[i], mode.root4[i]};
    const double d = s - s0;
    if (d == 0.0) return lv;
    const int panels = 4;
    const double hstep = d / panels;
    const cplx ieta(0.0, mode.center.eta);
    double t = s0;
    for (int k = 0; k < panels; ++k) {
        const cplx qm = tracked_sqrt(phi(t + 0.5 * hstep), lv.q);
        const cplx q1 = tracked_sqrt(phi(t + hstep), qm);
        lv.psi += ieta * (hstep / 6.0) * (lv.q + 4.0 * qm + q1);
        const cplx r4m = tracked_sqrt(qm, lv.r4);
        lv.r4 = tracked_sqrt(q1, r4m);
        lv.q = q1;
        t += hstep;
    }
    return lv;
}

}  // namespace

cplx JwkbMode::value_at(double s) const {
    const LocalEval lv = local_from_node(*this, s);
    return (1.0 / lv.r4) * exp_clamped(-lv.psi / h);
}

cplx JwkbMode::log_derivative_at(double s) const {
    const LocalEval lv = local_from_node(*this, s);
    const double eta2 = center.eta * center.eta;
    const cplx phi = lv.q * lv.q;
    const cplx phi1 = -w1(s) / eta2;
    return -phi1 / (4.0 * phi) - cplx(0.0, center.eta) * lv.q / h;
}

cplx gaussian_mode(const WorkingProblem& problem, const CenterPair& center, double s) {
    const double eta = center.eta;
    if (eta == 0.0) throw DomainError("gaussian_mode: eta must be nonzero");
    const cplx w1a = problem.potential_deriv(center.a);
    const cplx arg = 1.0 - w1a * s / (2.0 * eta * eta);
    if (arg.imag() == 0.0 && arg.real() <= 0.0)
        throw BranchError("gaussian_mode: argument crossed the principal square-root cut");
    const cplx i_unit(0.0, 1.0);
    return std::exp(-i_unit * eta * s + i_unit * w1a * s * s / (4.0 * eta)) / std::sqrt(arg);
}

double jwkb_residual(const WorkingProblem& problem, const JwkbMode& mode, double s_lo,
                     double s_hi) {
    (void)problem;  // W enters through the mode's shifted evaluators
    if (!(s_hi > s_lo)) throw DomainError("jwkb_residual: empty window");
    const double eta2 = mode.center.eta * mode.center.eta;
    const double h = mode.h;
    const cplx ieta(0.0, mode.center.eta);

    double sup = 0.0;
    for (size_t i = 0; i < mode.grid.size(); ++i) {
        const double s = mode.grid[i];
        if (s < s_lo || s > s_hi) continue;
        const cplx q = mode.sqrt_phi[i];
        const cplx phi = q * q;
        const cplx phi1 = -mode.w1(s) / eta2;
        const cplx phi2 = -mode.w2(s) / eta2;
        const cplx ld = mode.log_derivative[i];
        const cplx ld_prime =
            -(phi2 * phi - phi1 * phi1) / (4.0 * phi * phi) - ieta * phi1 / (2.0 * q) / h;
        const cplx resid = -h * h * (ld * ld + ld_prime) + (mode.w(s) - mode.z);
        sup = std::max(sup, std::abs(resid));
    }
    return sup;
}

}  // namespace jwkbfit
