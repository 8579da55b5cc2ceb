// SPDX-License-Identifier: Apache-2.0

#include "crbmo/scenario.hpp"

#include <sstream>
#include <stdexcept>

#include "crbmo/text_io.hpp"

namespace crbmo {

namespace {

GainMode parse_gain_mode(const KvReader& kv, const std::string& key, const std::string& s) {
  if (s == "rayleigh") return GainMode::rayleigh;
  if (s == "fixed") return GainMode::fixed_mag;
  kv.fail(key, "expected 'rayleigh' or 'fixed'");
}

CombinerSource parse_source(const KvReader& kv, const std::string& key, const std::string& s) {
  if (s == "random") return CombinerSource::random;
  if (s == "optimized") return CombinerSource::optimized;
  if (s == "both") return CombinerSource::both;
  kv.fail(key, "expected 'random', 'optimized' or 'both'");
}

PrecoderMode parse_precoder(const KvReader& kv, const std::string& key, const std::string& s) {
  if (s == "matched") return PrecoderMode::matched;
  if (s == "random_unit") return PrecoderMode::random_unit;
  kv.fail(key, "expected 'matched' or 'random_unit'");
}

}  // namespace

Scenario parse_scenario(const std::string& text, const std::string& source_name) {
  KvReader kv(parse_kv_text(text, source_name), source_name);
  Scenario d;  // defaults
  Scenario s;

  s.p_rows = static_cast<int>(kv.get_int("array_p_rows", d.p_rows));
  s.q_cols = static_cast<int>(kv.get_int("array_q_cols", d.q_cols));
  s.n_ue = static_cast<int>(kv.get_int("n_ue", d.n_ue));
  s.n_rf = static_cast<int>(kv.get_int("n_rf", d.n_rf));
  s.n_snapshots = static_cast<int>(kv.get_int("n_snapshots", d.n_snapshots));
  s.tx_power = kv.get_double("tx_power", d.tx_power);

  s.theta_lo_deg = kv.get_double("theta_min_deg", d.theta_lo_deg);
  s.theta_hi_deg = kv.get_double("theta_max_deg", d.theta_hi_deg);
  s.phi_lo_deg = kv.get_double("phi_min_deg", d.phi_lo_deg);
  s.phi_hi_deg = kv.get_double("phi_max_deg", d.phi_hi_deg);
  s.opt_grid_j = static_cast<int>(kv.get_int("opt_grid_j", d.opt_grid_j));
  s.opt_grid_k = static_cast<int>(kv.get_int("opt_grid_k", d.opt_grid_k));
  s.opt_sigma2 = kv.get_double("opt_sigma2", d.opt_sigma2);

  s.optimizer.epsilon_rel = kv.get_double("opt_epsilon_rel", d.optimizer.epsilon_rel);
  s.optimizer.max_iters = static_cast<int>(kv.get_int("opt_max_iters", d.optimizer.max_iters));
  s.optimizer.armijo_initial_step =
      kv.get_double("opt_armijo_initial_step", d.optimizer.armijo_initial_step);
  s.optimizer.armijo_contraction =
      kv.get_double("opt_armijo_contraction", d.optimizer.armijo_contraction);
  s.optimizer.armijo_slope = kv.get_double("opt_armijo_slope", d.optimizer.armijo_slope);
  s.optimizer.armijo_max_contractions = static_cast<int>(
      kv.get_int("opt_armijo_max_contractions", d.optimizer.armijo_max_contractions));
  s.optimizer.restarts = static_cast<int>(kv.get_int("opt_restarts", d.optimizer.restarts));

  if (kv.has("snr_db")) s.snr_db = kv.get_double_list("snr_db");
  s.trials = static_cast<int>(kv.get_int("trials", d.trials));
  s.seed = kv.get_uint("seed", d.seed);
  s.optimizer.seed = s.seed;
  s.combiner_source =
      parse_source(kv, "combiner_source", kv.get_string("combiner_source", "random"));
  s.combiner_file = kv.get_string("combiner_file", "");
  s.precoder = parse_precoder(kv, "precoder", kv.get_string("precoder", "matched"));

  s.est_grid_j = static_cast<int>(kv.get_int("est_grid_j", d.est_grid_j));
  s.est_grid_k = static_cast<int>(kv.get_int("est_grid_k", d.est_grid_k));
  s.est_refine_levels = static_cast<int>(kv.get_int("est_refine_levels", d.est_refine_levels));
  s.est_refine_shrink = kv.get_double("est_refine_shrink", d.est_refine_shrink);

  const int path_count = static_cast<int>(kv.get_int("path_count", 1));
  if (path_count < 1) kv.fail("path_count", "must be >= 1");
  s.paths.clear();
  for (int i = 0; i < path_count; ++i) {
    const std::string p = "path" + std::to_string(i) + "_";
    PathSpec spec;
    spec.gain_mode =
        parse_gain_mode(kv, p + "gain_mode", kv.get_string(p + "gain_mode", "rayleigh"));
    spec.power_db = kv.get_double(p + "power_db", 0.0);
    // the LoS path defaults to the prior box; others to the full hemisphere
    const bool los = i == 0;
    spec.theta_lo_deg = kv.get_double(p + "theta_min_deg", los ? s.theta_lo_deg : -90.0);
    spec.theta_hi_deg = kv.get_double(p + "theta_max_deg", los ? s.theta_hi_deg : 90.0);
    spec.phi_lo_deg = kv.get_double(p + "phi_min_deg", los ? s.phi_lo_deg : 0.0);
    spec.phi_hi_deg = kv.get_double(p + "phi_max_deg", los ? s.phi_hi_deg : 180.0);
    s.paths.push_back(spec);
  }

  s.beam_theta_deg = kv.get_double("beam_theta_deg", d.beam_theta_deg);
  s.beam_phi_lo_deg = kv.get_double("beam_phi_min_deg", d.beam_phi_lo_deg);
  s.beam_phi_hi_deg = kv.get_double("beam_phi_max_deg", d.beam_phi_hi_deg);
  s.beam_samples = static_cast<int>(kv.get_int("beam_samples", d.beam_samples));
  s.eval_sigma2 = kv.get_double("eval_sigma2", d.eval_sigma2);

  const auto unread = kv.unread_keys();
  if (!unread.empty())
    throw std::runtime_error(source_name + ": unknown key '" + unread.front() + "'");
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_text_file(path), path);
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  const auto put = [&out](const std::string& key, const std::string& value) {
    out << key << " = " << value << "\n";
  };
  const auto putd = [&](const std::string& key, double v) { put(key, format_g17(v)); };
  const auto puti = [&](const std::string& key, int64_t v) { put(key, std::to_string(v)); };

  out << "# crbmo scenario (canonical echo; angles in degrees)\n";
  puti("array_p_rows", s.p_rows);
  puti("array_q_cols", s.q_cols);
  puti("n_ue", s.n_ue);
  puti("n_rf", s.n_rf);
  puti("n_snapshots", s.n_snapshots);
  putd("tx_power", s.tx_power);
  putd("theta_min_deg", s.theta_lo_deg);
  putd("theta_max_deg", s.theta_hi_deg);
  putd("phi_min_deg", s.phi_lo_deg);
  putd("phi_max_deg", s.phi_hi_deg);
  puti("opt_grid_j", s.opt_grid_j);
  puti("opt_grid_k", s.opt_grid_k);
  putd("opt_sigma2", s.opt_sigma2);
  putd("opt_epsilon_rel", s.optimizer.epsilon_rel);
  puti("opt_max_iters", s.optimizer.max_iters);
  putd("opt_armijo_initial_step", s.optimizer.armijo_initial_step);
  putd("opt_armijo_contraction", s.optimizer.armijo_contraction);
  putd("opt_armijo_slope", s.optimizer.armijo_slope);
  puti("opt_armijo_max_contractions", s.optimizer.armijo_max_contractions);
  puti("opt_restarts", s.optimizer.restarts);
  {
    std::string list;
    for (std::size_t i = 0; i < s.snr_db.size(); ++i)
      list += (i ? "," : "") + format_g17(s.snr_db[i]);
    put("snr_db", list);
  }
  puti("trials", s.trials);
  put("seed", std::to_string(s.seed));
  put("combiner_source", to_string(s.combiner_source));
  if (!s.combiner_file.empty()) put("combiner_file", s.combiner_file);
  put("precoder", to_string(s.precoder));
  puti("est_grid_j", s.est_grid_j);
  puti("est_grid_k", s.est_grid_k);
  puti("est_refine_levels", s.est_refine_levels);
  putd("est_refine_shrink", s.est_refine_shrink);
  puti("path_count", static_cast<int64_t>(s.paths.size()));
  for (std::size_t i = 0; i < s.paths.size(); ++i) {
    const std::string p = "path" + std::to_string(i) + "_";
    put(p + "gain_mode", to_string(s.paths[i].gain_mode));
    putd(p + "power_db", s.paths[i].power_db);
    putd(p + "theta_min_deg", s.paths[i].theta_lo_deg);
    putd(p + "theta_max_deg", s.paths[i].theta_hi_deg);
    putd(p + "phi_min_deg", s.paths[i].phi_lo_deg);
    putd(p + "phi_max_deg", s.paths[i].phi_hi_deg);
  }
  putd("beam_theta_deg", s.beam_theta_deg);
  putd("beam_phi_min_deg", s.beam_phi_lo_deg);
  putd("beam_phi_max_deg", s.beam_phi_hi_deg);
  puti("beam_samples", s.beam_samples);
  putd("eval_sigma2", s.eval_sigma2);
  return out.str();
}

}  // namespace crbmo
