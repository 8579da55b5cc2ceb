// SPDX-License-Identifier: Apache-2.0

#include "crbmo/doa_estimator.hpp"

#include <algorithm>
#include <stdexcept>

namespace crbmo {

void EstimatorConfig::validate() const {
  coarse_grid.validate();
  if (refine_levels < 0) throw std::invalid_argument("EstimatorConfig: refine_levels < 0");
  if (refine_shrink <= 0.0 || refine_shrink >= 1.0)
    throw std::invalid_argument("EstimatorConfig: refine_shrink must be in (0,1)");
}

namespace {

struct Candidate {
  double theta = 0.0, phi = 0.0;
  double metric = -1.0;
  Complex beta{0.0, 0.0};
};

// metric plus the concentrated gain estimate beta = b^H y / ||b||^2
Candidate eval_point(const VectorXcd& y_tilde, const MatrixXcd& w,
                     const UpaGeometry& geom, double theta, double phi) {
  Candidate c;
  c.theta = theta;
  c.phi = phi;
  const VectorXcd b = w.adjoint() * steering(geom, {theta, phi});
  const double b2 = b.squaredNorm();
  if (b2 < 1e-24) return c;  // ||b|| < 1e-12
  const Complex inner = b.dot(y_tilde);  // b^H y
  c.metric = std::norm(inner) / b2;
  c.beta = inner / b2;
  return c;
}

Candidate grid_argmax(const VectorXcd& y_tilde, const MatrixXcd& w,
                      const UpaGeometry& geom, const AngleGrid& grid) {
  Candidate best;
  best.metric = -1.0;
  for (int j = 0; j < grid.j_count; ++j) {
    for (int k = 0; k < grid.k_count; ++k) {
      Candidate c = eval_point(y_tilde, w, geom, grid.theta_at(j), grid.phi_at(k));
      if (c.metric > best.metric) best = c;
    }
  }
  return best;
}

}  // namespace

double ml_metric(const VectorXcd& y_tilde, const CombinerSet& combiners,
                 const UpaGeometry& geom, const AnglePair& angle) {
  if (y_tilde.size() != combiners.layout().n_columns())
    throw std::invalid_argument("ml_metric: pilot length mismatch");
  const Candidate c =
      eval_point(y_tilde, effective_w(combiners), geom, angle.theta, angle.phi);
  return std::max(c.metric, 0.0);
}

DoaEstimate estimate(const VectorXcd& y_tilde, const CombinerSet& combiners,
                     const UpaGeometry& geom, const EstimatorConfig& config) {
  config.validate();
  if (y_tilde.size() != combiners.layout().n_columns())
    throw std::invalid_argument("estimate: pilot length mismatch");
  const MatrixXcd w = effective_w(combiners);
  const AngleGrid& box = config.coarse_grid;

  Candidate best = grid_argmax(y_tilde, w, geom, box);

  double theta_w = box.theta_hi - box.theta_lo;
  double phi_w = box.phi_hi - box.phi_lo;
  for (int level = 0; level < config.refine_levels; ++level) {
    theta_w *= config.refine_shrink;
    phi_w *= config.refine_shrink;
    AngleGrid sub;
    sub.j_count = box.j_count;
    sub.k_count = box.k_count;
    // centered on the incumbent, clamped inside the coarse box
    sub.theta_lo = std::clamp(best.theta - 0.5 * theta_w, box.theta_lo,
                              std::max(box.theta_lo, box.theta_hi - theta_w));
    sub.theta_hi = sub.theta_lo + theta_w;
    sub.phi_lo = std::clamp(best.phi - 0.5 * phi_w, box.phi_lo,
                            std::max(box.phi_lo, box.phi_hi - phi_w));
    sub.phi_hi = sub.phi_lo + phi_w;
    const Candidate c = grid_argmax(y_tilde, w, geom, sub);
    if (c.metric > best.metric) best = c;
  }

  DoaEstimate out;
  out.theta_hat = best.theta;
  out.phi_hat = best.phi;
  out.beta_hat = best.beta;
  out.peak_metric = std::max(best.metric, 0.0);
  return out;
}

}  // namespace crbmo
