#pragma once

#include <map>

#include "jwkbfit/config.hpp"
#include "jwkbfit/jwkb.hpp"
#include "jwkbfit/modefit.hpp"
#include "jwkbfit/shooting.hpp"

namespace jwkbfit {

// Lazy, cached orchestration of the whole computation for one operator:
// seeds -> eigenvalues -> eigenfunctions -> centers -> modes -> fits.
//
// Eigenvalue seeding: explicit seeds from the config when given; the exact
// closed form for the complex oscillator; otherwise homotopy continuation
// from the dilated harmonic limit of the family.
class Pipeline {
public:
    explicit Pipeline(RunConfig cfg);

    const RunConfig& config() const { return cfg_; }
    const PotentialSpec& spec() const { return cfg_.op; }

    double truncation_for(int m) const;
    WorkingProblem problem_for(int m) const;

    cplx eigenvalue(int m);  // physical lambda
    const EigenPair& eigenpair(int m);
    const std::vector<CenterPair>& centers(int m);
    const std::vector<RefinedCenter>& refined_centers(int m);
    const std::vector<JwkbMode>& modes(int m);
    const FitResult& fit(int m);

private:
    void ensure_eigenvalues();
    bool bound_state_regime() const;
    void morph_eigenvalues(const std::vector<TrackedRoot>& roots);
    void commit_eigenvalue(int m, cplx lambda);
    cplx working_eigenvalue(int m);

    RunConfig cfg_;
    bool eigen_done_ = false;
    std::map<int, std::string> eigen_errors_;  // per-index seeding failures
    std::map<int, cplx> lambda_;               // reported physical eigenvalues
    std::map<int, cplx> z_;                    // extraction roots at the run's angle
    std::map<int, std::optional<cplx>> slope_;  // tracked inward branch, if any
    std::map<int, EigenPair> pairs_;
    std::map<int, std::vector<CenterPair>> centers_;
    std::map<int, std::vector<RefinedCenter>> refined_;
    std::map<int, std::vector<JwkbMode>> modes_;
    std::map<int, FitResult> fits_;
};

}  // namespace jwkbfit
