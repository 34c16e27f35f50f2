#pragma once

#include <string>
#include <vector>

#include "jwkbfit/potentials.hpp"

namespace jwkbfit {

// Run configuration, loadable from a sectioned key = value file:
//
//   [operator]
//   kind = gaussian_bump        # harmonic_complex | gaussian_bump | double_gaussian
//   c_arg = 0.39269908169872414 # arg c in radians (default pi/8, |c| = 1)
//   b = 10
//   alpha = 36.787944117144233  # 100/e
//   beta = 10
//   gamma = 0.03
//
//   [run]
//   m_values = 10,20,30
//   grid_points = 4501
//   truncation_radius = 18      # 0 = family default (per-m for the oscillator)
//   jwkb_h = 1
//   output_dir = out
//   seeds = 4.4,0;7.39,0        # optional re,im pairs matching m_values
struct RunConfig {
    PotentialSpec op;
    std::vector<int> m_values;
    int grid_points = 4501;
    double truncation_radius = 0.0;
    double jwkb_h = 1.0;
    std::vector<cplx> seeds;
    std::string output_dir = "out";

    void validate() const;
};

RunConfig load_config(const std::string& path);

// Applies "section.key=value" (e.g. "run.grid_points=6001") on top of a config.
void apply_override(RunConfig& cfg, const std::string& assignment);

std::string kind_name(PotentialKind kind);

}  // namespace jwkbfit
