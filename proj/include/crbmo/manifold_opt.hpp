// SPDX-License-Identifier: Apache-2.0
//
// Riemannian gradient descent on the masked complex-circle manifold:
// tangent projection, unit-modulus retraction, Armijo backtracking, and the
// multi-restart outer loop.

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "crbmo/combiner.hpp"
#include "crbmo/crb.hpp"
#include "crbmo/rng.hpp"

namespace crbmo {

struct OptimizerConfig {
  double epsilon_rel = 1e-6;        // objective-decrease threshold, relative to f(W0)
  int max_iters = 500;
  double armijo_initial_step = 1.0; // scaled by 1/||grad||_F at use
  double armijo_contraction = 0.5;
  double armijo_slope = 1e-4;
  int armijo_max_contractions = 50;
  int restarts = 4;
  uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
};

enum class TerminationReason { converged, max_iters, singular_fisher, step_failure };

const char* to_string(TerminationReason reason);

struct OptimizerTrace {
  std::vector<double> objective_history;  // f(W^0), f(W^1), ...
  std::vector<double> step_sizes;         // accepted step per iteration
  std::vector<double> gradient_norms;     // ||grad|| at the point the step left
  int iterations = 0;
  TerminationReason termination_reason = TerminationReason::max_iters;
};

/// Masked entries exp(j*u), u uniform on [0, 2*pi); zeros off the mask.
CombinerSet random_feasible_init(const CombinerLayout& layout, Rng& rng);

/// Tangent projection: per entry g - Re{g * conj(w)} * w on the mask support.
MatrixXcd riemannian_gradient(const MatrixXcd& eucl_grad, const MatrixXcd& w_tilde);

/// Entry-wise renormalization of w + step*d to the unit circle on the mask;
/// empty optional when some masked entry lands within 1e-14 of the origin
/// (degenerate point -- the line search halves the step and retries).
std::optional<MatrixXcd> try_retract(const MatrixXcd& w_tilde, const MatrixXcd& direction,
                                     double step, const MatrixXd& mask);

/// Throwing variant of try_retract (std::domain_error on degeneracy).
MatrixXcd retract(const MatrixXcd& w_tilde, const MatrixXcd& direction, double step,
                  const MatrixXd& mask);

struct ArmijoResult {
  bool success = false;
  double step = 0.0;
  MatrixXcd point;
  double objective = 0.0;
};

/// Backtracking from initial_step by the configured contraction until
/// f(retract(w, d, step)) <= f(w) + slope*step*<grad, d> under the real
/// inner product Re{tr(X^H Y)}. Fails after armijo_max_contractions, or
/// immediately when d is not a descent direction.
ArmijoResult armijo_search(const std::function<double(const MatrixXcd&)>& objective_fn,
                           const MatrixXcd& w_tilde, const MatrixXcd& grad,
                           const MatrixXcd& direction, const MatrixXd& mask,
                           const OptimizerConfig& config, double current_objective,
                           double initial_step);

struct CrbMoResult {
  CombinerSet combiner;
  OptimizerTrace trace;                   // winning chain
  std::vector<OptimizerTrace> all_traces; // one per restart
  int best_chain = 0;
  double objective = 0.0;
};

/// Optional per-iterate observer (used by tests to assert feasibility at
/// every step). Called with (restart, iteration, current point).
using IterationObserver = std::function<void(int, int, const MatrixXcd&)>;

/// Runs `restarts` independent descent chains from random feasible starts
/// and returns the one with the lowest final objective.
CrbMoResult crb_mo(const AngleGrid& grid, const UpaGeometry& geom, double sigma2,
                   const CombinerLayout& layout, const OptimizerConfig& config,
                   const IterationObserver& observer = nullptr);

}  // namespace crbmo
