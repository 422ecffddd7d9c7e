#pragma once

#include <string>
#include <vector>

#include "sfd/report.hpp"

namespace sfd {

std::vector<std::string> experiment_names();

// Dispatch on cfg.name. Unknown names or parameters throw InvalidArgument.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

// Phi of A0 + k B_p with A0 = {(0,0), (0,1)} for k = 1..k_max, against
// the notch depth dist((k, 1/2), boundary of k B_p) and, for p = 2, the
// hidden-ball bound. params: p, k_max, samples.
ExperimentReport run_pball_convexification(const ExperimentConfig& cfg);

// Random finite sets in R^n: rounding errors against sqrt(n) beta, the
// refined face bound, and the Monte-Carlo variance audit.
// params: k, n, set_size, instances, targets, rounding_trials.
ExperimentReport run_sf_bounds_random(const ExperimentConfig& cfg);

// Relative duality gap of discretized sparse smooth instances per k, with
// the hidden-ball bound at r* = (k - m - 1) omega / L.
// params: k_list, n, m, s, family, seeds, half_width, omega_floor, grid.
ExperimentReport run_duality_gap_scaling(const ExperimentConfig& cfg);

// Share of seeded Gaussian B with a positive projection factor per s, and
// the effect of perturbing a rank-deficient B.
// params: m, n, s_min, s_max, seeds, perturbations.
ExperimentReport run_projection_factor_sweep(const ExperimentConfig& cfg);

}  // namespace sfd
