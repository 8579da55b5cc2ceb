// SPDX-License-Identifier: Apache-2.0
//
// Concentrated maximum-likelihood DOA estimator: coarse grid search over
// the prior box followed by centered shrinking refinement grids. The
// nuisance gain is maximized out analytically; with W_BB = I the effective
// noise is white (W^H W is a scaled identity), so no extra whitening is
// needed.

#pragma once

#include <Eigen/Dense>

#include "crbmo/array_geometry.hpp"
#include "crbmo/combiner.hpp"
#include "crbmo/crb.hpp"

namespace crbmo {

struct EstimatorConfig {
  AngleGrid coarse_grid;      // spans the scenario's prior angle box
  int refine_levels = 4;
  double refine_shrink = 0.2; // per-level box shrink factor, in (0,1)

  void validate() const;  // throws std::invalid_argument
};

struct DoaEstimate {
  double theta_hat = 0.0;
  double phi_hat = 0.0;
  Complex beta_hat{0.0, 0.0};
  double peak_metric = 0.0;
};

/// Concentrated likelihood |b^H y|^2 / ||b||^2 with b = W^H a(theta, phi);
/// larger is better. Returns 0 when ||b|| < 1e-12 (angle invisible to the
/// combiner).
double ml_metric(const VectorXcd& y_tilde, const CombinerSet& combiners,
                 const UpaGeometry& geom, const AnglePair& angle);

/// Coarse argmax then refine_levels rounds of centered sub-grids, each
/// shrunk by refine_shrink and clamped to the coarse box.
DoaEstimate estimate(const VectorXcd& y_tilde, const CombinerSet& combiners,
                     const UpaGeometry& geom, const EstimatorConfig& config);

}  // namespace crbmo
