#include "jwkbfit/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>

#include "jwkbfit/numerics.hpp"

namespace {
bool morph_debug() {
    static const bool on = std::getenv("JWKBFIT_DEBUG") != nullptr;
    return on;
}
}  // namespace

namespace jwkbfit {

Pipeline::Pipeline(RunConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.m_values.empty()) throw DomainError("pipeline: empty m_values");
}

bool Pipeline::bound_state_regime() const {
    if (cfg_.op.kind == PotentialKind::HarmonicComplex) return false;
    const double x_peak =
        cfg_.op.kind == PotentialKind::GaussianBump ? cfg_.op.b : cfg_.op.beta;
    return std::sqrt(2.0 * cfg_.m_values.back() + 1.0) + 4.0 < x_peak;
}

double Pipeline::truncation_for(int m) const {
    if (cfg_.truncation_radius > 0.0) return cfg_.truncation_radius;
    if (cfg_.op.kind == PotentialKind::HarmonicComplex) {
        // a + 12/sqrt(|eta|) with the closed-form center a = eta for |c| = 1;
        // at large m the envelope's real turning radius sqrt(2m+1) dominates
        // and needs its own margin.
        const double theta = std::arg(cfg_.op.c);
        const double a = std::sqrt((2.0 * m + 1.0) / (2.0 * std::cos(theta)));
        const double by_center = a + 12.0 / std::sqrt(std::max(a, 1.0));
        const double by_turning = std::sqrt(2.0 * m + 1.0) + 4.0;
        return std::min(25.0, std::max(by_center, by_turning));
    }
    return default_truncation(cfg_.op, m);
}

WorkingProblem Pipeline::problem_for(int m) const {
    return to_working_problem(cfg_.op, truncation_for(m));
}

void Pipeline::ensure_eigenvalues() {
    if (eigen_done_) return;

    if (!cfg_.seeds.empty()) {
        for (size_t i = 0; i < cfg_.m_values.size(); ++i) {
            const int m = cfg_.m_values[i];
            try {
                const WorkingProblem p = problem_for(m);
                const cplx z_seed = p.eigen_scale * cfg_.seeds[i];
                RootOptions ro;
                ro.x_match = choose_x_match(p, z_seed);
                z_[m] = find_eigenvalue(p, z_seed, parity_of_index(m), ro);
                lambda_[m] = z_[m] / p.eigen_scale;
                slope_[m] = std::nullopt;
            } catch (const Error& e) {
                eigen_errors_[m] = e.what();
            }
        }
    } else if (cfg_.op.kind == PotentialKind::HarmonicComplex) {
        for (int m : cfg_.m_values) {
            const WorkingProblem p = problem_for(m);
            const cplx z_exact = cfg_.op.c * (2.0 * m + 1.0);
            try {
                RootOptions ro;
                ro.x_match = choose_x_match(p, z_exact);
                ro.trust_radius = 1.5 * std::abs(cfg_.op.c);
                z_[m] = find_eigenvalue(p, z_exact, parity_of_index(m), ro);
            } catch (const Error&) {
                // Past m ~ 75 the branch-weight range of the rotated oscillator
                // exceeds double precision and two-sided shooting loses the
                // eigencondition; the closed form c(2m+1) stands in.
                z_[m] = z_exact;
            }
            lambda_[m] = z_[m] / p.eigen_scale;
            slope_[m] = std::nullopt;
        }
    } else if (bound_state_regime()) {
        // Confined spectrum (the potential still rises at the turning radius
        // of every requested state): the eigenvalues equal the self-adjoint
        // spectrum at c = 1 by dilation independence, and the real Wronskian
        // scan has no branch-dominance limitations.
        try {
            PotentialSpec spec0 = cfg_.op;
            spec0.c = cplx(1.0, 0.0);
            const double X = truncation_for(cfg_.m_values.back());
            const WorkingProblem p0 = to_working_problem(spec0, X);
            double lam_lo = std::numeric_limits<double>::infinity();
            for (double x : uniform_grid(1e-5, X, 801))
                lam_lo = std::min(lam_lo, p0.potential_eval(x).real());
            lam_lo += 1e-6 * (1.0 + std::abs(lam_lo));
            const double lam_hi = std::min(2.0 * cfg_.m_values.back() + 5.0 + lam_lo,
                                           0.98 * p0.potential_eval(X).real());
            const auto levels = selfadjoint_levels(p0, lam_lo, lam_hi, cfg_.m_values.back());
            std::map<int, double> by_m;
            for (const auto& lv : levels) by_m[lv.index] = lv.lambda;
            for (int m : cfg_.m_values) {
                auto it = by_m.find(m);
                if (it == by_m.end())
                    eigen_errors_[m] = "self-adjoint scan did not locate this level";
                else
                    commit_eigenvalue(m, cplx(it->second, 0.0));
            }
        } catch (const Error& e) {
            for (int m : cfg_.m_values) eigen_errors_[m] = e.what();
        }
    } else {
        // Homotopy from the dilated harmonic limit at fixed c: the blended
        // potential (1-t) y^2 + t V(y) starts with the exact spectrum c(2m+1).
        // A few low anchor states are always tracked alongside the requested
        // ones: the deep tracks never slip and they pin the ladder labels.
        const cplx c = cfg_.op.c;
        std::set<int> track_ms(cfg_.m_values.begin(), cfg_.m_values.end());
        bool want_even = false, want_odd = false;
        for (int m : cfg_.m_values) (m % 2 == 0 ? want_even : want_odd) = true;
        if (want_even) track_ms.insert({0, 2, 10});
        if (want_odd) track_ms.insert({1, 3, 11});
        std::vector<TrackedRoot> roots;
        for (int m : track_ms)
            roots.push_back({m, parity_of_index(m), c * (2.0 * m + 1.0), std::nullopt, 0.0});

        morph_eigenvalues(roots);
    }
    eigen_done_ = true;
}

// Homotopy seeding for the Gaussian families. Independent solo tracks march
// from the harmonic limit; through the weak-decay corridor near the end of
// the morph a track can slip onto a neighbor or a truncation box state, so
// the tracks are treated as candidate generators only: every candidate is
// validated by truncation stability (a physical eigenvalue barely moves when
// X shrinks, a box artifact moves by order one), missing ladder members are
// re-sought from interpolated seeds, and labels follow ascending Re lambda
// within each parity class.
void Pipeline::morph_eigenvalues(const std::vector<TrackedRoot>& roots_in) {
    const double X = truncation_for(cfg_.m_values.back());

    // The eigenvalues are dilation-independent, so they are computed at an
    // auxiliary angle that keeps even the sector-edge resonances strongly
    // decaying at X, and mapped back to the configured angle afterwards.
    const double theta_cfg = std::arg(cfg_.op.c);
    const double theta_aux = std::max(theta_cfg, 0.6);
    PotentialSpec target = cfg_.op;
    target.c = std::polar(std::abs(cfg_.op.c), theta_aux);
    const cplx rotate = target.c / cfg_.op.c;

    std::vector<TrackedRoot> roots = roots_in;
    for (auto& r : roots) r.z *= rotate;  // harmonic-limit seeds at the new angle

    auto family = [target, X](double t) {
        return blend_working_problem(target, t, X + 8.0 * (1.0 - t));
    };
    const WorkingProblem p_final = to_working_problem(target, X);
    const WorkingProblem p_short = to_working_problem(target, 0.94 * X);

    auto find_at = [](const WorkingProblem& p, cplx seed, Parity parity, double trust) {
        RootOptions ro;
        ro.x_match = choose_x_match(p, seed);
        ro.trust_radius = trust;
        return find_eigenvalue(p, seed, parity, ro);
    };
    // A physical eigenvalue barely moves under a 6% truncation change (the
    // weakly decaying high resonances move by up to ~0.05); a truncation box
    // state moves by order one and fails the trust region outright.
    auto is_physical = [&](cplx z, Parity parity) {
        try {
            const cplx z_short = find_at(p_short, z, parity, 0.6);
            return std::abs(z_short - z) < 0.08 * (1.0 + 0.02 * std::abs(z));
        } catch (const Error&) {
            return false;
        }
    };

    for (Parity parity : {Parity::Even, Parity::Odd}) {
        std::vector<int> ms;
        for (const auto& r : roots)
            if (r.parity == parity) ms.push_back(r.index);
        if (ms.empty()) continue;
        std::sort(ms.begin(), ms.end());

        struct Cand {
            cplx z;
            std::optional<cplx> slope;
            std::vector<int> votes;  // labels of the tracks that landed here
            int label = -1;
        };
        std::vector<Cand> cands;
        auto insert_cand = [&](cplx z, std::optional<cplx> slope, int vote) {
            for (auto& c : cands) {
                if (std::abs(c.z - z) < 1e-6 * (1.0 + std::abs(z))) {
                    if (vote >= 0) c.votes.push_back(vote);
                    if (!c.slope && slope) c.slope = slope;
                    return false;
                }
            }
            cands.push_back({z, slope, vote >= 0 ? std::vector<int>{vote} : std::vector<int>{}, -1});
            return true;
        };

        std::string track_error;
        for (const auto& root : roots) {
            if (root.parity != parity) continue;
            ContinuationOptions copt;
            // High tracks move ~ (2m+1) dt at the harmonic end; keep the first
            // steps well inside the level spacing so the secant starts in the
            // right basin.
            copt.dt_initial = std::min(0.02, 0.5 / (2.0 * root.index + 1.0));
            copt.dt_max = 0.02;
            copt.dt_min = 2e-4;
            std::vector<TrackedRoot> solo{root};
            try {
                continue_family(family, solo, copt);
                const bool phys = is_physical(solo[0].z, parity);
                if (morph_debug())
                    std::fprintf(stderr, "[morph] track m=%d -> (%.6f, %.6f) phys=%d\n",
                                 root.index, solo[0].z.real(), solo[0].z.imag(), phys ? 1 : 0);
                if (phys) insert_cand(solo[0].z, solo[0].inward_slope, root.index);
            } catch (const Error& e) {
                if (morph_debug())
                    std::fprintf(stderr, "[morph] track m=%d FAILED: %s\n", root.index, e.what());
                track_error = e.what();  // recoverable: the set is rebuilt below
            }
        }
        if (cands.empty()) {
            for (int m : ms)
                eigen_errors_[m] = "continuation: no physical candidates survived" +
                                   (track_error.empty() ? "" : " (" + track_error + ")");
            continue;
        }

        // Fast path: every requested label was delivered by its own track.
        {
            std::map<int, const Cand*> direct;
            bool clean = true;
            for (const auto& c : cands) {
                if (c.votes.size() != 1) continue;
                if (!direct.emplace(c.votes[0], &c).second) clean = false;
            }
            if (clean && direct.size() == ms.size()) {
                bool all = true;
                for (int m : ms) all = all && direct.count(m);
                if (all) {
                    const std::set<int> requested(cfg_.m_values.begin(), cfg_.m_values.end());
                    for (int m : ms)
                        if (requested.count(m)) commit_eigenvalue(m, direct[m]->z / target.c);
                    continue;
                }
            }
        }

        // Structural ladder walk ("zipper"). Every validated candidate is a
        // rung of the physical ladder; the walk marches from the lowest Re
        // rung one slot at a time, matching existing candidates against the
        // step-predicted position and re-finding genuinely missing rungs from
        // that prediction. Rung indices become labels by the offset that the
        // majority of track votes selects.
        std::sort(cands.begin(), cands.end(),
                  [](const Cand& a, const Cand& b) { return a.z.real() < b.z.real(); });

        // per-slot step near the ladder bottom, from the two lowest votes
        cplx step;
        {
            const Cand *va = nullptr, *vb = nullptr;
            int la = 0, lb = 0;
            for (const auto& c : cands)
                for (int v : c.votes) {
                    if (!va || v < la) {
                        vb = va;
                        lb = la;
                        va = &c;
                        la = v;
                    } else if ((!vb || v < lb) && v != la) {
                        vb = &c;
                        lb = v;
                    }
                }
            if (!va || !vb || lb == la) {
                for (int m : ms)
                    eigen_errors_[m] = "continuation: too few labeled tracks to anchor the ladder";
                continue;
            }
            step = (vb->z - va->z) * (2.0 / (lb - la));
        }

        std::vector<int> rung_of(cands.size(), -1);
        std::vector<size_t> rung_order;  // candidate index per rung
        size_t cur = 0;                  // walk starts at the lowest-Re candidate
        rung_of[cur] = 0;
        rung_order.push_back(cur);
        const int max_rungs = static_cast<int>((ms.back() - ms.front()) / 2) + 8;
        for (int rung = 1; rung <= max_rungs; ++rung) {
            const cplx pred = cands[cur].z + step;
            size_t best = cands.size();
            double best_d = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < cands.size(); ++i) {
                if (rung_of[i] >= 0) continue;
                const double d = std::abs(cands[i].z - pred);
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            if (best < cands.size() && best_d < 0.45 * std::abs(step)) {
                step = cands[best].z - cands[cur].z;
                cur = best;
            } else {
                // rung genuinely absent from the candidates: re-find it
                bool got = false;
                for (double stretch : {1.0, 1.12, 0.88}) {
                    const cplx seed = cands[cur].z + stretch * step;
                    try {
                        const cplx z =
                            find_at(p_final, seed, parity,
                                    std::min(0.75 * std::abs(step), 2.0));
                        const bool phys = is_physical(z, parity);
                        if (morph_debug())
                            std::fprintf(stderr,
                                         "[morph] rung %d refind seed (%.4f, %.4f) -> "
                                         "(%.4f, %.4f) phys=%d\n",
                                         rung, seed.real(), seed.imag(), z.real(), z.imag(),
                                         phys ? 1 : 0);
                        if (phys && insert_cand(z, std::nullopt, -1)) {
                            rung_of.push_back(-1);
                            step = z - cands[cur].z;
                            cur = cands.size() - 1;
                            got = true;
                            break;
                        }
                    } catch (const Error& e) {
                        if (morph_debug())
                            std::fprintf(stderr, "[morph] rung %d refind failed: %s\n", rung,
                                         e.what());
                    }
                }
                if (!got) break;  // top of the reachable ladder
            }
            rung_of[cur] = rung;
            rung_order.push_back(cur);
        }

        // label offset by majority vote over the tracks
        std::map<int, int> offset_votes;
        for (size_t i = 0; i < cands.size(); ++i)
            if (rung_of[i] >= 0)
                for (int v : cands[i].votes) ++offset_votes[v - 2 * rung_of[i]];
        int offset = 0, best_votes = -1, votes_total = 0;
        for (const auto& [off, n] : offset_votes) {
            votes_total += n;
            if (n > best_votes) {
                best_votes = n;
                offset = off;
            }
        }
        const bool consensus = votes_total > 0 && 2 * best_votes >= votes_total;

        std::map<int, size_t> by_label;  // label -> candidate index
        if (consensus) {
            for (size_t i = 0; i < cands.size(); ++i)
                if (rung_of[i] >= 0) by_label[offset + 2 * rung_of[i]] = i;

            // extend below the walked ladder when the requested range needs it
            int low_label = offset;
            cplx z_low = cands[rung_order.front()].z;
            cplx step_low =
                rung_order.size() >= 2 ? cands[rung_order[1]].z - z_low : step;
            while (low_label > ms.front()) {
                const cplx seed = z_low - step_low;
                bool got = false;
                try {
                    const cplx z = find_at(p_final, seed, parity,
                                           std::min(0.75 * std::abs(step_low), 2.0));
                    if (is_physical(z, parity) && insert_cand(z, std::nullopt, -1)) {
                        low_label -= 2;
                        by_label[low_label] = cands.size() - 1;
                        step_low = z_low - z;
                        z_low = z;
                        got = true;
                    }
                } catch (const Error&) {
                }
                if (!got) break;
            }
        }

        const std::set<int> requested(cfg_.m_values.begin(), cfg_.m_values.end());
        for (int m : ms) {
            if (!requested.count(m)) continue;  // anchor track, not part of the run
            auto it = by_label.find(m);
            if (!consensus) {
                eigen_errors_[m] = "continuation: track-label consensus failed (" +
                                   std::to_string(std::max(best_votes, 0)) + "/" +
                                   std::to_string(votes_total) + " votes)";
            } else if (it == by_label.end()) {
                eigen_errors_[m] =
                    "continuation: eigenvalue not located" +
                    (track_error.empty() ? std::string() : " (" + track_error + ")");
            } else {
                commit_eigenvalue(m, cands[it->second].z / target.c);
            }
        }
    }
}

// Stores the reported eigenvalue and finds the extraction root of the
// truncated problem at the configured angle. For the marginal sector-edge
// states the two differ by the truncation shift; when no local root is
// reachable the exact value is used directly.
void Pipeline::commit_eigenvalue(int m, cplx lambda) {
    lambda_[m] = lambda;
    slope_[m] = std::nullopt;
    const WorkingProblem p = problem_for(m);
    const cplx z_exact = p.eigen_scale * lambda;
    try {
        RootOptions ro;
        ro.x_match = choose_x_match(p, z_exact);
        ro.trust_radius = 0.2 * (1.0 + 0.01 * std::abs(z_exact));
        z_[m] = find_eigenvalue(p, z_exact, parity_of_index(m), ro);
    } catch (const Error&) {
        z_[m] = z_exact;
    }
}

cplx Pipeline::working_eigenvalue(int m) {
    ensure_eigenvalues();
    const auto it = z_.find(m);
    if (it == z_.end()) {
        const auto err = eigen_errors_.find(m);
        if (err != eigen_errors_.end())
            throw RootError("pipeline: eigenvalue stage failed: " + err->second);
        throw DomainError("pipeline: index m not in this run");
    }
    return it->second;
}

cplx Pipeline::eigenvalue(int m) {
    working_eigenvalue(m);  // runs the seeding stage and surfaces failures
    return lambda_.at(m);
}

const EigenPair& Pipeline::eigenpair(int m) {
    auto it = pairs_.find(m);
    if (it != pairs_.end()) return it->second;
    const cplx z = working_eigenvalue(m);
    const WorkingProblem p = problem_for(m);
    const auto grid = uniform_grid(0.0, p.truncation_radius, cfg_.grid_points);
    RootOptions ro;
    ro.x_match = choose_x_match(p, z);
    ro.integrator.inward_slope_hint = slope_[m];
    auto pair = extract_eigenpair(p, z, parity_of_index(m), m, grid, ro);
    return pairs_.emplace(m, std::move(pair)).first->second;
}

const std::vector<CenterPair>& Pipeline::centers(int m) {
    auto it = centers_.find(m);
    if (it != centers_.end()) return it->second;
    const WorkingProblem p = problem_for(m);
    CenterOptions copt;
    copt.probe_eps = p.truncation_radius / (cfg_.grid_points - 1);
    auto cs = solve_center_equation(p, eigenvalue(m), copt);
    return centers_.emplace(m, std::move(cs)).first->second;
}

const std::vector<RefinedCenter>& Pipeline::refined_centers(int m) {
    auto it = refined_.find(m);
    if (it != refined_.end()) return it->second;
    const WorkingProblem p = problem_for(m);
    std::vector<RefinedCenter> rs;
    for (const auto& seed : centers(m)) rs.push_back(refine_center(p, eigenvalue(m), seed));
    return refined_.emplace(m, std::move(rs)).first->second;
}

const std::vector<JwkbMode>& Pipeline::modes(int m) {
    auto it = modes_.find(m);
    if (it != modes_.end()) return it->second;
    const WorkingProblem p = problem_for(m);
    std::vector<JwkbMode> ms;
    for (const auto& ctr : centers(m)) {
        const auto grid = make_mode_grid(ctr.a, p.truncation_radius, cfg_.grid_points);
        ms.push_back(build_mode(p, ctr, cfg_.jwkb_h, grid));
        ms.back().reflection_sign = (m % 2 == 0) ? 1.0 : -1.0;
    }
    return modes_.emplace(m, std::move(ms)).first->second;
}

const FitResult& Pipeline::fit(int m) {
    auto it = fits_.find(m);
    if (it != fits_.end()) return it->second;
    const auto& ms = modes(m);
    if (ms.empty()) throw FitError("pipeline: no admissible modes to fit at this m");
    auto res = optimize_fit(eigenpair(m), ms);
    return fits_.emplace(m, std::move(res)).first->second;
}

}  // namespace jwkbfit
