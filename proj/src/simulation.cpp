// SPDX-License-Identifier: Apache-2.0

#include "crbmo/simulation.hpp"

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace crbmo {

double deg2rad(double deg) { return deg * (std::numbers::pi / 180.0); }
double rad2deg(double rad) { return rad * (180.0 / std::numbers::pi); }

const char* to_string(GainMode m) {
  return m == GainMode::rayleigh ? "rayleigh" : "fixed";
}
const char* to_string(CombinerSource s) {
  switch (s) {
    case CombinerSource::random: return "random";
    case CombinerSource::optimized: return "optimized";
    case CombinerSource::both: return "both";
  }
  return "unknown";
}
const char* to_string(PrecoderMode m) {
  return m == PrecoderMode::matched ? "matched" : "random_unit";
}

AngleGrid Scenario::prior_grid() const {
  AngleGrid g;
  g.theta_lo = deg2rad(theta_lo_deg);
  g.theta_hi = deg2rad(theta_hi_deg);
  g.phi_lo = deg2rad(phi_lo_deg);
  g.phi_hi = deg2rad(phi_hi_deg);
  g.j_count = opt_grid_j;
  g.k_count = opt_grid_k;
  return g;
}

AngleGrid Scenario::estimator_grid() const {
  AngleGrid g = prior_grid();
  g.j_count = est_grid_j;
  g.k_count = est_grid_k;
  return g;
}

EstimatorConfig Scenario::estimator_config() const {
  EstimatorConfig c;
  c.coarse_grid = estimator_grid();
  c.refine_levels = est_refine_levels;
  c.refine_shrink = est_refine_shrink;
  return c;
}

void Scenario::validate() const {
  geometry();  // constructible
  if (!geometry().valid()) throw std::invalid_argument("Scenario: invalid geometry");
  layout().validate();
  if (n_ue < 1) throw std::invalid_argument("Scenario: n_ue must be >= 1");
  if (tx_power <= 0.0) throw std::invalid_argument("Scenario: tx_power must be positive");
  prior_grid().validate();
  estimator_grid().validate();
  estimator_config().validate();
  optimizer.validate();
  if (opt_sigma2 <= 0.0 || eval_sigma2 <= 0.0)
    throw std::invalid_argument("Scenario: sigma2 values must be positive");
  if (trials < 1) throw std::invalid_argument("Scenario: trials must be >= 1");
  if (snr_db.empty()) throw std::invalid_argument("Scenario: empty SNR sweep");
  for (std::size_t i = 1; i < snr_db.size(); ++i)
    if (!(snr_db[i] > snr_db[i - 1]))
      throw std::invalid_argument("Scenario: SNR list must be strictly increasing");
  if (paths.empty()) throw std::invalid_argument("Scenario: no paths");
  if ((combiner_source == CombinerSource::optimized ||
       combiner_source == CombinerSource::both) &&
      combiner_file.empty())
    throw std::invalid_argument("Scenario: combiner_file required for optimized source");
  if (beam_samples < 1) throw std::invalid_argument("Scenario: beam_samples must be >= 1");
  if (beam_phi_hi_deg < beam_phi_lo_deg)
    throw std::invalid_argument("Scenario: beampattern sweep is empty");
}

namespace {

// substream tags for Rng::stream(seed, tag, trial)
constexpr uint64_t kStreamPaths = 1;
constexpr uint64_t kStreamNoise = 2;
constexpr uint64_t kStreamRandComb = 3;
constexpr uint64_t kStreamCrbCurve = 4;

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min(threads, n);
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct DrawnTrial {
  std::vector<PathParams> paths;
  UeConfig ue;
  Complex beta0;  // effective LoS gain
  int redraws = 0;
};

Complex draw_alpha(const PathSpec& spec, Rng& rng) {
  const double v = std::pow(10.0, spec.power_db / 10.0);
  if (spec.gain_mode == GainMode::rayleigh) return rng.complex_normal(v);
  const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return std::sqrt(v) * Complex(std::cos(phase), std::sin(phase));
}

// Draws path parameters and the precoder; redraws the whole set while the
// effective LoS gain is degenerate (|beta| < 1e-12).
DrawnTrial draw_trial(const Scenario& scn, Rng& rng, int redraw_cap) {
  const UpaGeometry geom = scn.geometry();
  DrawnTrial t;
  for (;;) {
    t.paths.clear();
    for (const auto& spec : scn.paths) {
      PathParams p;
      p.doa.theta = rng.uniform(deg2rad(spec.theta_lo_deg), deg2rad(spec.theta_hi_deg));
      p.doa.phi = rng.uniform(deg2rad(spec.phi_lo_deg), deg2rad(spec.phi_hi_deg));
      p.dod_psi = rng.uniform(-0.5 * std::numbers::pi, 0.5 * std::numbers::pi);
      p.dod_gamma = rng.uniform(0.0, std::numbers::pi);
      p.alpha = draw_alpha(spec, rng);
      t.paths.push_back(p);
    }
    t.ue.n_ue = scn.n_ue;
    t.ue.tx_power = scn.tx_power;
    if (scn.precoder == PrecoderMode::matched) {
      t.ue.precoder_v = matched_precoder(scn.n_ue, t.paths[0].dod_psi, scn.tx_power);
    } else {
      VectorXcd v(scn.n_ue);
      for (int i = 0; i < scn.n_ue; ++i) v(i) = rng.complex_normal(1.0);
      t.ue.precoder_v = std::sqrt(scn.tx_power) * v.normalized();
    }
    t.beta0 = effective_beta(geom, t.paths[0], t.ue, static_cast<int>(t.paths.size())).beta;
    if (std::abs(t.beta0) >= 1e-12) return t;
    if (++t.redraws > redraw_cap)
      throw std::runtime_error("simulation: degenerate |beta| redraws exceeded 1% of trials");
  }
}

struct CellStats {
  double se_theta = 0.0, se_phi = 0.0;
  double crb_tr = 0.0, crb_th = 0.0, crb_ph = 0.0;
  bool singular = false;
};

struct TrialStats {
  std::vector<CellStats> cells;  // combiner-major, SNR inner
  int redraws = 0;
};

}  // namespace

SweepResult run_mse_sweep(const Scenario& scenario,
                          const std::optional<CombinerSet>& optimized, int threads) {
  scenario.validate();
  const UpaGeometry geom = scenario.geometry();
  const CombinerLayout layout = scenario.layout();
  const bool want_random = scenario.combiner_source != CombinerSource::optimized;
  const bool want_opt = scenario.combiner_source != CombinerSource::random;
  if (want_opt) {
    if (!optimized) throw std::invalid_argument("run_mse_sweep: optimized combiner missing");
    if (optimized->layout().n_bs != layout.n_bs ||
        optimized->layout().n_rf != layout.n_rf ||
        optimized->layout().n_snapshots != layout.n_snapshots)
      throw std::invalid_argument("run_mse_sweep: combiner layout mismatch");
  }
  const EstimatorConfig est_config = scenario.estimator_config();
  const int n_snr = static_cast<int>(scenario.snr_db.size());
  const int n_comb = (want_random ? 1 : 0) + (want_opt ? 1 : 0);
  const int redraw_cap = std::max(1, scenario.trials / 100);
  const VectorXcd seq = VectorXcd::Ones(scenario.n_snapshots);

  std::vector<TrialStats> slots(scenario.trials);
  parallel_for(scenario.trials, threads, [&](int trial) {
    Rng paths_rng = Rng::stream(scenario.seed, kStreamPaths, trial);
    Rng noise_rng = Rng::stream(scenario.seed, kStreamNoise, trial);
    Rng comb_rng = Rng::stream(scenario.seed, kStreamRandComb, trial);

    const DrawnTrial t = draw_trial(scenario, paths_rng, redraw_cap);
    const MatrixXcd h = channel_matrix(geom, t.ue, t.paths);
    const MatrixXcd noise_raw = draw_noise_block(layout.n_bs, layout.n_snapshots, noise_rng);
    const DerivativeMatrixA a_true = build_a_matrix(geom, t.paths[0].doa, t.beta0);

    TrialStats& stats = slots[trial];
    stats.redraws = t.redraws;
    stats.cells.resize(static_cast<std::size_t>(n_comb) * n_snr);
    int ci = 0;
    for (int comb_idx = 0; comb_idx < 2; ++comb_idx) {
      const bool is_random = comb_idx == 0;
      if (is_random && !want_random) continue;
      if (!is_random && !want_opt) continue;
      const CombinerSet combiner =
          is_random ? random_feasible_init(layout, comb_rng) : *optimized;
      for (int s = 0; s < n_snr; ++s) {
        const double sigma2 =
            scenario.tx_power / std::pow(10.0, scenario.snr_db[s] / 10.0);
        const VectorXcd y =
            synthesize_pilots_with_noise(h, t.ue, combiner, sigma2, seq, noise_raw);
        const DoaEstimate est = estimate(y, combiner, geom, est_config);
        CellStats& cell = stats.cells[ci * n_snr + s];
        const double dth = est.theta_hat - t.paths[0].doa.theta;
        const double dph = est.phi_hat - t.paths[0].doa.phi;
        cell.se_theta = dth * dth;
        cell.se_phi = dph * dph;
        const auto crb = try_crb_trace(fisher(combiner, a_true, sigma2));
        if (crb) {
          cell.crb_tr = crb->trace;
          cell.crb_th = crb->c11(0, 0);
          cell.crb_ph = crb->c11(1, 1);
        } else {
          cell.singular = true;
        }
      }
      ++ci;
    }
  });

  SweepResult result;
  result.seed = scenario.seed;
  result.rows.resize(static_cast<std::size_t>(n_snr) * n_comb);
  for (int s = 0; s < n_snr; ++s) {
    int ci = 0;
    for (int comb_idx = 0; comb_idx < 2; ++comb_idx) {
      const bool is_random = comb_idx == 0;
      if (is_random && !want_random) continue;
      if (!is_random && !want_opt) continue;
      SweepRow& row = result.rows[static_cast<std::size_t>(s) * n_comb + ci];
      row.snr_db = scenario.snr_db[s];
      row.combiner = is_random ? "random" : "optimized";
      row.trials = scenario.trials;
      ++ci;
    }
  }
  // reduce in trial order for bit-reproducibility
  for (int trial = 0; trial < scenario.trials; ++trial) {
    const TrialStats& stats = slots[trial];
    result.redraws += stats.redraws;
    for (int ci = 0; ci < n_comb; ++ci) {
      for (int s = 0; s < n_snr; ++s) {
        const CellStats& cell = stats.cells[ci * n_snr + s];
        SweepRow& row = result.rows[static_cast<std::size_t>(s) * n_comb + ci];
        row.mse_theta += cell.se_theta;
        row.mse_phi += cell.se_phi;
        if (cell.singular) {
          ++row.failures;
        } else {
          row.crb_trace_mean += cell.crb_tr;
          row.crb_theta_mean += cell.crb_th;
          row.crb_phi_mean += cell.crb_ph;
        }
      }
    }
  }
  for (auto& row : result.rows) {
    row.mse_theta /= row.trials;
    row.mse_phi /= row.trials;
    const int ok = row.trials - row.failures;
    if (ok > 0) {
      row.crb_trace_mean /= ok;
      row.crb_theta_mean /= ok;
      row.crb_phi_mean /= ok;
    }
  }
  return result;
}

SweepResult run_two_path_sweep(const Scenario& scenario,
                               const std::optional<CombinerSet>& optimized, int threads) {
  if (scenario.paths.size() != 2)
    throw std::invalid_argument("run_two_path_sweep: exactly 2 paths required");
  return run_mse_sweep(scenario, optimized, threads);
}

std::vector<std::pair<double, double>> array_power_response(
    const CombinerSet& combiners, const UpaGeometry& geom, double theta_fixed,
    const std::vector<double>& phi_samples) {
  if (geom.n_bs() != combiners.layout().n_bs)
    throw std::invalid_argument("array_power_response: geometry mismatch");
  std::vector<std::pair<double, double>> out;
  out.reserve(phi_samples.size());
  for (const double phi : phi_samples) {
    const VectorXcd b = combiners.w_rf().adjoint() * steering(geom, {theta_fixed, phi});
    out.emplace_back(phi, b.norm());
  }
  return out;
}

std::vector<CrbCurvePoint> crb_curve(const CombinerSet& combiners, const Scenario& scenario,
                                     int threads) {
  scenario.validate();
  const UpaGeometry geom = scenario.geometry();
  const int n_snr = static_cast<int>(scenario.snr_db.size());
  const int redraw_cap = std::max(1, scenario.trials / 100);

  struct TrialCrb {
    std::vector<double> tr, th, ph;
    std::vector<bool> singular;
  };
  std::vector<TrialCrb> slots(scenario.trials);
  parallel_for(scenario.trials, threads, [&](int trial) {
    Rng rng = Rng::stream(scenario.seed, kStreamCrbCurve, trial);
    const DrawnTrial t = draw_trial(scenario, rng, redraw_cap);
    const DerivativeMatrixA a_true = build_a_matrix(geom, t.paths[0].doa, t.beta0);
    TrialCrb& out = slots[trial];
    out.tr.resize(n_snr);
    out.th.resize(n_snr);
    out.ph.resize(n_snr);
    out.singular.resize(n_snr);
    for (int s = 0; s < n_snr; ++s) {
      const double sigma2 = scenario.tx_power / std::pow(10.0, scenario.snr_db[s] / 10.0);
      const auto crb = try_crb_trace(fisher(combiners, a_true, sigma2));
      if (crb) {
        out.tr[s] = crb->trace;
        out.th[s] = crb->c11(0, 0);
        out.ph[s] = crb->c11(1, 1);
      } else {
        out.singular[s] = true;
      }
    }
  });

  std::vector<CrbCurvePoint> points(n_snr);
  for (int s = 0; s < n_snr; ++s) points[s].snr_db = scenario.snr_db[s];
  for (int trial = 0; trial < scenario.trials; ++trial) {
    for (int s = 0; s < n_snr; ++s) {
      if (slots[trial].singular[s]) {
        ++points[s].failures;
      } else {
        points[s].crb_trace_mean += slots[trial].tr[s];
        points[s].crb_theta_mean += slots[trial].th[s];
        points[s].crb_phi_mean += slots[trial].ph[s];
      }
    }
  }
  for (auto& p : points) {
    const int ok = scenario.trials - p.failures;
    if (ok > 0) {
      p.crb_trace_mean /= ok;
      p.crb_theta_mean /= ok;
      p.crb_phi_mean /= ok;
    }
  }
  return points;
}

}  // namespace crbmo
