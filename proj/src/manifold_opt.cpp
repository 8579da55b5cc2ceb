// SPDX-License-Identifier: Apache-2.0

#include "crbmo/manifold_opt.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "crbmo/gradient.hpp"

namespace crbmo {

void OptimizerConfig::validate() const {
  if (epsilon_rel < 0.0) throw std::invalid_argument("OptimizerConfig: epsilon < 0");
  if (max_iters < 0) throw std::invalid_argument("OptimizerConfig: max_iters < 0");
  if (armijo_initial_step <= 0.0)
    throw std::invalid_argument("OptimizerConfig: armijo_initial_step <= 0");
  if (armijo_contraction <= 0.0 || armijo_contraction >= 1.0)
    throw std::invalid_argument("OptimizerConfig: contraction must be in (0,1)");
  if (armijo_slope <= 0.0 || armijo_slope >= 1.0)
    throw std::invalid_argument("OptimizerConfig: slope must be in (0,1)");
  if (armijo_max_contractions < 1 || restarts < 1)
    throw std::invalid_argument("OptimizerConfig: counts must be >= 1");
}

const char* to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::converged: return "converged";
    case TerminationReason::max_iters: return "max_iters";
    case TerminationReason::singular_fisher: return "singular_fisher";
    case TerminationReason::step_failure: return "step_failure";
  }
  return "unknown";
}

CombinerSet random_feasible_init(const CombinerLayout& layout, Rng& rng) {
  layout.validate();
  MatrixXd phases(layout.n_bs, layout.n_snapshots);
  for (int n = 0; n < layout.n_snapshots; ++n)
    for (int i = 0; i < layout.n_bs; ++i)
      phases(i, n) = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return CombinerSet::from_phases(layout, phases);
}

MatrixXcd riemannian_gradient(const MatrixXcd& eucl_grad, const MatrixXcd& w_tilde) {
  if (eucl_grad.rows() != w_tilde.rows() || eucl_grad.cols() != w_tilde.cols())
    throw std::invalid_argument("riemannian_gradient: shape mismatch");
  MatrixXcd out(eucl_grad.rows(), eucl_grad.cols());
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      const Complex g = eucl_grad(r, c);
      const Complex w = w_tilde(r, c);
      const double radial = g.real() * w.real() + g.imag() * w.imag();  // Re{g*conj(w)}
      out(r, c) = g - radial * w;
    }
  }
  return out;
}

std::optional<MatrixXcd> try_retract(const MatrixXcd& w_tilde, const MatrixXcd& direction,
                                     double step, const MatrixXd& mask) {
  MatrixXcd out = MatrixXcd::Zero(w_tilde.rows(), w_tilde.cols());
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    for (Eigen::Index r = 0; r < out.rows(); ++r) {
      if (mask(r, c) == 0.0) continue;
      const Complex z = w_tilde(r, c) + step * direction(r, c);
      const double mag = std::abs(z);
      if (mag < 1e-14) return std::nullopt;
      out(r, c) = z / mag;
    }
  }
  return out;
}

MatrixXcd retract(const MatrixXcd& w_tilde, const MatrixXcd& direction, double step,
                  const MatrixXd& mask) {
  auto out = try_retract(w_tilde, direction, step, mask);
  if (!out) throw std::domain_error("retract: masked entry reached the origin");
  return *out;
}

namespace {

double real_inner(const MatrixXcd& x, const MatrixXcd& y) {
  return (x.conjugate().cwiseProduct(y)).sum().real();  // Re{tr(X^H Y)}
}

}  // namespace

ArmijoResult armijo_search(const std::function<double(const MatrixXcd&)>& objective_fn,
                           const MatrixXcd& w_tilde, const MatrixXcd& grad,
                           const MatrixXcd& direction, const MatrixXd& mask,
                           const OptimizerConfig& config, double current_objective,
                           double initial_step) {
  ArmijoResult res;
  const double slope_term = real_inner(grad, direction);
  if (!(slope_term < 0.0)) return res;  // not a descent direction (covers d = 0)

  double step = initial_step;
  for (int k = 0; k < config.armijo_max_contractions; ++k) {
    const auto candidate = try_retract(w_tilde, direction, step, mask);
    if (candidate) {
      const double f_new = objective_fn(*candidate);
      if (f_new <= current_objective + config.armijo_slope * step * slope_term) {
        res.success = true;
        res.step = step;
        res.point = *candidate;
        res.objective = f_new;
        return res;
      }
    }
    step *= config.armijo_contraction;  // degenerate retraction also contracts
  }
  return res;
}

namespace {

struct ChainResult {
  MatrixXcd w;
  double objective = std::numeric_limits<double>::infinity();
  OptimizerTrace trace;
};

ChainResult run_chain(const SteeringCache& cache, double sigma2,
                      const CombinerLayout& layout, const MatrixXd& mask,
                      const OptimizerConfig& config, Rng rng, int chain_index,
                      const IterationObserver& observer) {
  ChainResult chain;
  chain.w = random_feasible_init(layout, rng).w_rf();
  if (observer) observer(chain_index, 0, chain.w);

  const auto objective_fn = [&](const MatrixXcd& w) {
    return objective(w, layout.n_rf, cache, sigma2).value;
  };

  const double f0 = objective_fn(chain.w);
  chain.objective = f0;
  chain.trace.objective_history.push_back(f0);
  if (!std::isfinite(f0)) {
    chain.trace.termination_reason = TerminationReason::singular_fisher;
    return chain;
  }
  const double epsilon = config.epsilon_rel * std::abs(f0);
  chain.trace.termination_reason = TerminationReason::max_iters;

  double prev_step = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= config.max_iters; ++iter) {
    MatrixXcd grad;
    try {
      grad = riemannian_gradient(
          euclidean_gradient(chain.w, layout.n_rf, cache, sigma2, mask), chain.w);
    } catch (const SingularFisher&) {
      chain.trace.termination_reason = TerminationReason::singular_fisher;
      break;
    }
    const double grad_norm = grad.norm();
    if (grad_norm == 0.0) {
      chain.trace.termination_reason = TerminationReason::converged;
      break;
    }
    // warm start: fresh scale-invariant step, capped by twice the last accepted one
    const double initial_step =
        std::min(config.armijo_initial_step / grad_norm, 2.0 * prev_step);
    const auto ls = armijo_search(objective_fn, chain.w, grad, -grad, mask, config,
                                  chain.objective, initial_step);
    if (!ls.success) {
      chain.trace.termination_reason = TerminationReason::step_failure;
      break;
    }
    const double decrease = chain.objective - ls.objective;
    chain.w = ls.point;
    chain.objective = ls.objective;
    prev_step = ls.step;
    chain.trace.objective_history.push_back(ls.objective);
    chain.trace.step_sizes.push_back(ls.step);
    chain.trace.gradient_norms.push_back(grad_norm);
    chain.trace.iterations = iter;
    if (observer) observer(chain_index, iter, chain.w);
    if (decrease <= epsilon) {
      chain.trace.termination_reason = TerminationReason::converged;
      break;
    }
  }
  return chain;
}

}  // namespace

CrbMoResult crb_mo(const AngleGrid& grid, const UpaGeometry& geom, double sigma2,
                   const CombinerLayout& layout, const OptimizerConfig& config,
                   const IterationObserver& observer) {
  config.validate();
  layout.validate();
  if (layout.n_bs != geom.n_bs())
    throw std::invalid_argument("crb_mo: layout/geometry antenna count mismatch");
  if (sigma2 <= 0.0) throw std::invalid_argument("crb_mo: sigma2 must be positive");

  const SteeringCache cache(geom, grid);
  const MatrixXd mask = layout.mask();

  CrbMoResult result;
  result.objective = std::numeric_limits<double>::infinity();
  MatrixXcd best_w;
  for (int chain = 0; chain < config.restarts; ++chain) {
    auto r = run_chain(cache, sigma2, layout, mask, config,
                       Rng::stream(config.seed, 0x6f7074ULL, static_cast<uint64_t>(chain)),
                       chain, observer);
    const bool better = r.objective < result.objective || chain == 0;
    if (better) {
      result.objective = r.objective;
      result.best_chain = chain;
      result.trace = r.trace;
      best_w = std::move(r.w);
    }
    result.all_traces.push_back(std::move(r.trace));
  }
  result.combiner = CombinerSet::from_matrix(layout, best_w);
  return result;
}

}  // namespace crbmo
