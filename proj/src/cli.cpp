// SPDX-License-Identifier: Apache-2.0

#include "crbmo/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "crbmo/combiner_io.hpp"
#include "crbmo/scenario.hpp"
#include "crbmo/text_io.hpp"
#include "crbmo/version.hpp"

namespace crbmo {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string scenario_path;
  std::string out_dir;
  std::optional<uint64_t> seed;
  int threads = 0;  // 0 = hardware concurrency
  std::string replay_manifest;
};

int effective_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void apply_seed(Scenario& scenario, const std::optional<uint64_t>& seed) {
  if (seed) scenario.seed = *seed;
  scenario.optimizer.seed = scenario.seed;
}

std::string manifest_text(const std::string& command, const Scenario& scenario,
                          const std::vector<std::string>& outputs) {
  std::ostringstream out;
  out << "# crbmo run manifest\n";
  out << "manifest_version = 1\n";
  out << "command = " << command << "\n";
  out << "code_version = " << kVersion << "\n";
  out << "seed = " << scenario.seed << "\n";
  std::string list;
  for (std::size_t i = 0; i < outputs.size(); ++i) list += (i ? "," : "") + outputs[i];
  out << "outputs = " << list << "\n";
  out << "scenario_begin\n";
  out << serialize_scenario(scenario);
  out << "scenario_end\n";
  return out.str();
}

struct Manifest {
  std::string command;
  Scenario scenario;
  std::vector<std::string> outputs;
};

Manifest parse_manifest(const std::string& path) {
  const std::string text = read_text_file(path);
  std::istringstream in(text);
  std::string line, header, scenario_block;
  bool in_scenario = false, seen_end = false;
  while (std::getline(in, line)) {
    if (line == "scenario_begin") {
      in_scenario = true;
    } else if (line == "scenario_end") {
      in_scenario = false;
      seen_end = true;
    } else if (in_scenario) {
      scenario_block += line + "\n";
    } else {
      header += line + "\n";
    }
  }
  if (!seen_end) throw std::runtime_error(path + ": missing scenario block");
  KvReader kv(parse_kv_text(header, path), path);
  Manifest m;
  if (kv.get_int("manifest_version") != 1)
    throw std::runtime_error(path + ": unsupported manifest version");
  m.command = kv.get_string("command");
  m.scenario = parse_scenario(scenario_block, path + " (scenario block)");
  const uint64_t seed = kv.get_uint("seed");
  m.scenario.seed = seed;
  m.scenario.optimizer.seed = seed;
  std::istringstream outs(kv.get_string("outputs"));
  std::string item;
  while (std::getline(outs, item, ',')) m.outputs.push_back(item);
  return m;
}

/// Loads the scenario either from --scenario or from a replay manifest.
Scenario resolve_scenario(const CommonOptions& opt, const std::string& command) {
  if (!opt.replay_manifest.empty()) {
    Manifest m = parse_manifest(opt.replay_manifest);
    if (m.command != command)
      throw std::runtime_error("replay manifest was recorded by '" + m.command +
                               "', not '" + command + "'");
    return m.scenario;  // replay ignores --seed: the manifest seed is authoritative
  }
  if (opt.scenario_path.empty())
    throw std::runtime_error("--scenario is required (or --replay <manifest>)");
  Scenario s = load_scenario(opt.scenario_path);
  apply_seed(s, opt.seed);
  return s;
}

std::optional<CombinerSet> load_optional_combiner(const Scenario& scenario) {
  if (scenario.combiner_source == CombinerSource::random) return std::nullopt;
  LoadedCombiner lc = load_combiner(scenario.combiner_file);
  if (lc.geom.p_rows != scenario.p_rows || lc.geom.q_cols != scenario.q_cols)
    throw std::runtime_error(scenario.combiner_file + ": geometry does not match scenario");
  return lc.combiners;
}

void write_outputs(const std::string& out_dir, const std::string& command,
                   const Scenario& scenario,
                   const std::vector<std::pair<std::string, std::string>>& files) {
  fs::create_directories(out_dir);
  std::vector<std::string> names;
  for (const auto& [name, content] : files) {
    write_text_file((fs::path(out_dir) / name).string(), content);
    names.push_back(name);
  }
  write_text_file((fs::path(out_dir) / "manifest.txt").string(),
                  manifest_text(command, scenario, names));
}

/// Byte-compares replayed outputs against the originals next to the manifest.
int compare_replayed(const CommonOptions& opt,
                     const std::vector<std::pair<std::string, std::string>>& files) {
  const fs::path original_dir = fs::path(opt.replay_manifest).parent_path();
  bool all_ok = true;
  for (const auto& [name, content] : files) {
    const fs::path orig = original_dir / name;
    std::string original;
    bool ok = false;
    if (fs::exists(orig)) {
      original = read_text_file(orig.string());
      ok = original == content;
    }
    std::cout << "replay " << name << ": " << (ok ? "identical" : "MISMATCH") << "\n";
    all_ok = all_ok && ok;
  }
  return all_ok ? kExitOk : kExitUsage;
}

int finish(const CommonOptions& opt, const std::string& command, const Scenario& scenario,
           const std::vector<std::pair<std::string, std::string>>& files, int code) {
  write_outputs(opt.out_dir, command, scenario, files);
  if (!opt.replay_manifest.empty()) {
    const int replay_code = compare_replayed(opt, files);
    return replay_code != kExitOk ? replay_code : code;
  }
  return code;
}

int cmd_optimize(const CommonOptions& opt) {
  Scenario scenario = resolve_scenario(opt, "optimize");
  const auto result = crb_mo(scenario.prior_grid(), scenario.geometry(), scenario.opt_sigma2,
                             scenario.layout(), scenario.optimizer);

  TableWriter trace({"restart", "iteration", "objective", "step", "grad_norm"});
  trace.add_comment("crbmo optimize trace, code_version " + std::string(kVersion));
  trace.add_comment("seed " + std::to_string(scenario.seed));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t r = 0; r < result.all_traces.size(); ++r) {
    const auto& tr = result.all_traces[r];
    for (std::size_t i = 0; i < tr.objective_history.size(); ++i) {
      trace.begin_row();
      trace.add(static_cast<int64_t>(r));
      trace.add(static_cast<int64_t>(i));
      trace.add(tr.objective_history[i]);
      trace.add(i == 0 ? nan : tr.step_sizes[i - 1]);
      trace.add(i == 0 ? nan : tr.gradient_norms[i - 1]);
    }
  }

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("combiner.txt",
                     serialize_combiner(scenario.geometry(), result.combiner));
  files.emplace_back("trace.txt", trace.str());

  int code = kExitOk;
  switch (result.trace.termination_reason) {
    case TerminationReason::converged: code = kExitOk; break;
    case TerminationReason::max_iters: code = kExitMaxIters; break;
    case TerminationReason::step_failure: code = kExitStepFailure; break;
    case TerminationReason::singular_fisher: code = kExitSingular; break;
  }
  std::cout << "optimize: best restart " << result.best_chain << ", objective "
            << format_g17(result.objective) << ", "
            << to_string(result.trace.termination_reason) << "\n";
  return finish(opt, "optimize", scenario, files, code);
}

int cmd_simulate(const CommonOptions& opt) {
  Scenario scenario = resolve_scenario(opt, "simulate");
  // fail fast: referenced files must parse before any compute starts
  const auto optimized = load_optional_combiner(scenario);
  if (!scenario.combiner_file.empty())
    scenario.combiner_file = fs::absolute(scenario.combiner_file).string();

  const int threads = effective_threads(opt.threads);
  const SweepResult result = scenario.paths.size() == 2
                                 ? run_two_path_sweep(scenario, optimized, threads)
                                 : run_mse_sweep(scenario, optimized, threads);

  TableWriter table(
      {"snr_db", "combiner", "mse_theta", "mse_phi", "crb_mean", "trials", "failures"});
  table.add_comment("crbmo simulate results, code_version " + std::string(kVersion));
  table.add_comment("seed " + std::to_string(result.seed));
  table.add_comment("mse in rad^2; crb_mean is mean tr(C11) at true angles");
  table.add_comment("degenerate-beta redraws: " + std::to_string(result.redraws));
  for (const auto& row : result.rows) {
    table.begin_row();
    table.add(row.snr_db);
    table.add(row.combiner);
    table.add(row.mse_theta);
    table.add(row.mse_phi);
    table.add(row.crb_trace_mean);
    table.add(static_cast<int64_t>(row.trials));
    table.add(static_cast<int64_t>(row.failures));
  }
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("results.txt", table.str());
  std::cout << "simulate: " << result.rows.size() << " rows, " << scenario.trials
            << " trials\n";
  return finish(opt, "simulate", scenario, files, kExitOk);
}

int cmd_crb_eval(const CommonOptions& opt) {
  Scenario scenario = resolve_scenario(opt, "crb-eval");
  if (scenario.combiner_file.empty())
    throw std::runtime_error("crb-eval requires combiner_file in the scenario");
  const LoadedCombiner lc = load_combiner(scenario.combiner_file);
  scenario.combiner_file = fs::absolute(scenario.combiner_file).string();
  const AngleGrid grid = scenario.prior_grid();

  TableWriter table({"theta_rad", "phi_rad", "tr_c11", "c11_theta", "c11_phi", "singular"});
  table.add_comment("crbmo crb-eval, code_version " + std::string(kVersion));
  table.add_comment("sigma2 = " + format_g17(scenario.eval_sigma2) + ", beta = 1");
  const double inf = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid.j_count; ++j) {
    for (int k = 0; k < grid.k_count; ++k) {
      const AnglePair ang{grid.theta_at(j), grid.phi_at(k)};
      const auto a = build_a_matrix(lc.geom, ang, Complex{1.0, 0.0});
      const auto crb = try_crb_trace(fisher(lc.combiners, a, scenario.eval_sigma2));
      table.begin_row();
      table.add(ang.theta);
      table.add(ang.phi);
      table.add(crb ? crb->trace : inf);
      table.add(crb ? crb->c11(0, 0) : inf);
      table.add(crb ? crb->c11(1, 1) : inf);
      table.add(static_cast<int64_t>(crb ? 0 : 1));
    }
  }
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("crb_eval.txt", table.str());
  std::cout << "crb-eval: " << grid.n_points() << " grid points\n";
  return finish(opt, "crb-eval", scenario, files, kExitOk);
}

int cmd_beampattern(const CommonOptions& opt) {
  Scenario scenario = resolve_scenario(opt, "beampattern");
  if (scenario.combiner_file.empty())
    throw std::runtime_error("beampattern requires combiner_file in the scenario");
  const LoadedCombiner lc = load_combiner(scenario.combiner_file);
  scenario.combiner_file = fs::absolute(scenario.combiner_file).string();

  std::vector<double> phis(scenario.beam_samples);
  const double lo = deg2rad(scenario.beam_phi_lo_deg);
  const double hi = deg2rad(scenario.beam_phi_hi_deg);
  for (int i = 0; i < scenario.beam_samples; ++i)
    phis[i] = scenario.beam_samples == 1
                  ? lo
                  : lo + (hi - lo) * i / (scenario.beam_samples - 1);
  const auto response = array_power_response(lc.combiners, lc.geom,
                                             deg2rad(scenario.beam_theta_deg), phis);

  TableWriter table({"phi_rad", "gain"});
  table.add_comment("crbmo beampattern g(phi) = ||W^H a(theta_fixed, phi)||");
  table.add_comment("theta_fixed_deg = " + format_g17(scenario.beam_theta_deg));
  for (const auto& [phi, g] : response) {
    table.begin_row();
    table.add(phi);
    table.add(g);
  }
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("beampattern.txt", table.str());
  std::cout << "beampattern: " << response.size() << " samples\n";
  return finish(opt, "beampattern", scenario, files, kExitOk);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"hybrid-combiner optimization and DOA simulation toolkit"};
  app.require_subcommand(1);

  CommonOptions opt;
  const auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("--scenario", opt.scenario_path, "scenario file (key = value text)");
    cmd->add_option("--out", opt.out_dir, "output directory")->required();
    cmd->add_option("--seed", opt.seed, "override the scenario seed");
    cmd->add_option("--threads", opt.threads, "worker thread cap (default: cores)");
    cmd->add_option("--replay", opt.replay_manifest,
                    "re-execute a recorded manifest and byte-compare outputs");
  };

  auto* optimize = app.add_subcommand("optimize", "minimize the average CRB over the prior box");
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo MSE-vs-SNR sweep");
  auto* crb_eval = app.add_subcommand("crb-eval", "per-angle CRB table for a combiner");
  auto* beampattern = app.add_subcommand("beampattern", "array power response g(phi)");
  for (auto* cmd : {optimize, simulate, crb_eval, beampattern}) add_common(cmd);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (optimize->parsed()) return cmd_optimize(opt);
    if (simulate->parsed()) return cmd_simulate(opt);
    if (crb_eval->parsed()) return cmd_crb_eval(opt);
    if (beampattern->parsed()) return cmd_beampattern(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace crbmo
