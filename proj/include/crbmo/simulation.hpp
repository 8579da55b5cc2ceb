// SPDX-License-Identifier: Apache-2.0
//
// Monte Carlo experiment runner: MSE-vs-SNR sweeps (single- and two-path),
// array power response, and CRB curves. Trials own pre-split random
// streams and reduce in trial order, so results are bit-identical for any
// worker count.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "crbmo/channel.hpp"
#include "crbmo/combiner.hpp"
#include "crbmo/crb.hpp"
#include "crbmo/doa_estimator.hpp"
#include "crbmo/manifold_opt.hpp"

namespace crbmo {

enum class GainMode { rayleigh, fixed_mag };   // CN(0,v) vs |alpha| = sqrt(v), random phase
enum class CombinerSource { random, optimized, both };
enum class PrecoderMode { matched, random_unit };

const char* to_string(GainMode m);
const char* to_string(CombinerSource s);
const char* to_string(PrecoderMode m);

/// Per-path generation spec. Angles in degrees (converted at use; degree
/// storage keeps the scenario echo bit-exact).
struct PathSpec {
  GainMode gain_mode = GainMode::rayleigh;
  double power_db = 0.0;  // v = 10^(power_db/10)
  double theta_lo_deg = -60.0, theta_hi_deg = 60.0;
  double phi_lo_deg = 75.0, phi_hi_deg = 105.0;
};

/// Full experiment description. Angle fields are degrees; accessors return
/// radians.
struct Scenario {
  int p_rows = 8, q_cols = 8;
  int n_ue = 4, n_rf = 4, n_snapshots = 4;
  double tx_power = 1.0;

  // prior DOA box and optimizer sampling grid
  double theta_lo_deg = -60.0, theta_hi_deg = 60.0;
  double phi_lo_deg = 75.0, phi_hi_deg = 105.0;
  int opt_grid_j = 30, opt_grid_k = 30;
  double opt_sigma2 = 1.0;
  OptimizerConfig optimizer;

  // estimation + Monte Carlo
  std::vector<double> snr_db = {0, 5, 10, 15, 20};
  int trials = 500;
  std::vector<PathSpec> paths = {PathSpec{}};
  CombinerSource combiner_source = CombinerSource::random;
  std::string combiner_file;
  PrecoderMode precoder = PrecoderMode::matched;
  uint64_t seed = 1;
  int est_grid_j = 30, est_grid_k = 30;
  int est_refine_levels = 4;
  double est_refine_shrink = 0.2;

  // beampattern and CRB table auxiliaries
  double beam_theta_deg = 0.0;
  double beam_phi_lo_deg = 0.0, beam_phi_hi_deg = 180.0;
  int beam_samples = 361;
  double eval_sigma2 = 1.0;

  UpaGeometry geometry() const { return {p_rows, q_cols}; }
  CombinerLayout layout() const { return {p_rows * q_cols, n_rf, n_snapshots}; }
  AngleGrid prior_grid() const;      // opt_grid_j x opt_grid_k over the prior box
  AngleGrid estimator_grid() const;  // est_grid_j x est_grid_k over the prior box
  EstimatorConfig estimator_config() const;

  void validate() const;  // throws std::invalid_argument
};

double deg2rad(double deg);
double rad2deg(double rad);

/// One results row: statistics for a (SNR, combiner type) cell.
struct SweepRow {
  double snr_db = 0.0;
  std::string combiner;       // "random" | "optimized"
  double mse_theta = 0.0;     // rad^2
  double mse_phi = 0.0;       // rad^2
  double crb_trace_mean = 0.0;
  double crb_theta_mean = 0.0;  // C11(0,0) averaged over trials
  double crb_phi_mean = 0.0;
  int trials = 0;
  int failures = 0;  // trials with singular Fisher at the true angle
};

struct SweepResult {
  std::vector<SweepRow> rows;  // SNR-major, combiner types inner
  int redraws = 0;             // degenerate-|beta| path redraws
  uint64_t seed = 0;
};

/// Single- or multi-path MSE sweep. `optimized` must be set when the
/// scenario requests it. `threads` <= 1 means sequential.
SweepResult run_mse_sweep(const Scenario& scenario,
                          const std::optional<CombinerSet>& optimized, int threads = 1);

/// Same pipeline restricted to exactly two paths (LoS + NLoS); the
/// estimator targets the LoS path and treats the NLoS term as noise.
SweepResult run_two_path_sweep(const Scenario& scenario,
                               const std::optional<CombinerSet>& optimized,
                               int threads = 1);

/// g(phi) = ||W^H a(theta_fixed, phi)|| for each sample.
std::vector<std::pair<double, double>> array_power_response(
    const CombinerSet& combiners, const UpaGeometry& geom, double theta_fixed,
    const std::vector<double>& phi_samples);

struct CrbCurvePoint {
  double snr_db = 0.0;
  double crb_trace_mean = 0.0;
  double crb_theta_mean = 0.0;
  double crb_phi_mean = 0.0;
  int failures = 0;
};

/// Mean CRB at true angles drawn from the LoS box, with the true beta per
/// trial; singular trials are counted and excluded from the means.
std::vector<CrbCurvePoint> crb_curve(const CombinerSet& combiners, const Scenario& scenario,
                                     int threads = 1);

}  // namespace crbmo
