#include <chrono>
#include <fstream>
#include <map>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dcg/bench.hpp"
#include "dcg/budget.hpp"
#include "dcg/config.hpp"
#include "dcg/ddspec.hpp"
#include "dcg/grape.hpp"
#include "dcg/relax.hpp"

namespace {

using nlohmann::json;

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
};

dcg::RunConfig resolve_config(const CommonOpts& common) {
  dcg::RunConfig cfg;
  if (!common.config_path.empty()) cfg = dcg::load_config(common.config_path);
  if (cfg.noise.carbons.empty() && common.config_path.empty())
    cfg.noise.carbons = dcg::default_carbon_table();
  if (common.seed_override) cfg.seed = *common.seed_override;
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << text;
}

void add_common(CLI::App* sub, CommonOpts& common) {
  sub->add_option("--config", common.config_path, "JSON config file (defaults when omitted)");
  sub->add_option("--seed", common.seed_override, "override the config seed");
}

void finish_run(const dcg::RunConfig& cfg, const std::string& command,
                std::chrono::steady_clock::time_point start) {
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  dcg::save_config(cfg, cfg.output_dir + "/resolved_config.json");
  dcg::write_manifest(cfg.output_dir + "/manifest.json", cfg, command, wall);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dcg: shaped-pulse optimization and evaluation for an NV two-qubit gate"};
  app.require_subcommand(1);

  CommonOpts common;

  auto* optimize = app.add_subcommand("optimize", "run GRAPE and write the pulse CSV");
  std::string opt_out = "pulse.csv", opt_trace = "trace.json";
  add_common(optimize, common);
  optimize->add_option("--out", opt_out, "pulse CSV path");
  optimize->add_option("--trace", opt_trace, "objective-trace JSON path");
  int opt_starts = 1;
  optimize->add_option("--starts", opt_starts, "multi-start count, best result kept")
      ->check(CLI::PositiveNumber);

  auto* evaluate = app.add_subcommand("evaluate", "evaluate a pulse CSV against its target");
  std::string eval_pulse, eval_out = "evaluation.json";
  int eval_n = 1000;
  bool eval_full = false;
  add_common(evaluate, common);
  evaluate->add_option("--pulse", eval_pulse, "pulse CSV")->required();
  evaluate->add_option("--out", eval_out, "report JSON path");
  evaluate->add_option("--n", eval_n, "Monte Carlo sample count")->check(CLI::PositiveNumber);
  evaluate->add_flag("--full", eval_full, "include the nine-level RWA/leakage evaluation");

  auto* scan = app.add_subcommand("scan", "mean infidelity vs noise frequency");
  std::string scan_pulse, scan_out = "scan.csv", scan_range = "0:1200:5";
  double scan_sigma = 70.0;
  int scan_n = 1000;
  add_common(scan, common);
  scan->add_option("--pulse", scan_pulse, "pulse CSV")->required();
  scan->add_option("--out", scan_out, "output CSV path");
  scan->add_option("--omegas", scan_range, "frequency range start:stop:step in kHz");
  scan->add_option("--sigma-khz", scan_sigma, "noise quadrature sigma in kHz");
  scan->add_option("--n", scan_n, "Monte Carlo sample count")->check(CLI::PositiveNumber);

  auto* filter = app.add_subcommand("filter", "first-order filter function of a pulse");
  std::string filter_pulse, filter_out = "filter.csv", filter_range = "0:1200:5";
  double filter_sigma = 5.0;
  add_common(filter, common);
  filter->add_option("--pulse", filter_pulse, "pulse CSV")->required();
  filter->add_option("--out", filter_out, "output CSV path");
  filter->add_option("--omegas", filter_range, "frequency range start:stop:step in kHz");
  filter->add_option("--sigma-khz", filter_sigma, "sigma for the infidelity column");

  auto* ddsim = app.add_subcommand("dd-sim", "DD coherence curve for the config carbons");
  std::string dd_out = "dd.csv", dd_range = "1:20:0.02";
  int dd_n = 32, dd_manifold = 1;
  add_common(ddsim, common);
  ddsim->add_option("--out", dd_out, "output CSV path");
  ddsim->add_option("--taus", dd_range, "tau range start:stop:step in us");
  ddsim->add_option("--n-pulses", dd_n, "even pi-pulse count");
  ddsim->add_option("--manifold", dd_manifold, "+1 or -1 electron manifold");

  auto* ddfit = app.add_subcommand("dd-fit", "fit carbon couplings to a DD dip CSV");
  std::string ddfit_in, ddfit_out = "dd_fit.json";
  int ddfit_n = 32, ddfit_manifold = 1;
  double guess_azz = 0.0, guess_aperp = 30.0;
  std::vector<int> ddfit_k;
  add_common(ddfit, common);
  ddfit->add_option("--in", ddfit_in, "CSV of tau_us,coherence")->required();
  ddfit->add_option("--out", ddfit_out, "fit JSON path");
  ddfit->add_option("--n-pulses", ddfit_n, "even pi-pulse count");
  ddfit->add_option("--manifold", ddfit_manifold, "+1 or -1 electron manifold");
  ddfit->add_option("--guess-azz", guess_azz, "initial a_zz in kHz");
  ddfit->add_option("--guess-aperp", guess_aperp, "initial a_perp in kHz");
  ddfit->add_option("--k", ddfit_k, "resonance orders seeding the multi-start");

  auto* rb = app.add_subcommand("rb", "simulate randomized benchmarking decay");
  std::string rb_out = "rb.csv", rb_fit_out = "rb_fit.json";
  int rb_interleaved = -1;
  add_common(rb, common);
  rb->add_option("--out", rb_out, "survival CSV path");
  rb->add_option("--fit-out", rb_fit_out, "decay-fit JSON path");
  rb->add_option("--interleaved", rb_interleaved, "Clifford table index to interleave");

  auto* t1fit = app.add_subcommand("t1-fit", "fit the three-level relaxation rates");
  std::string t1_in, t1_out = "t1_fit.json";
  add_common(t1fit, common);
  t1fit->add_option("--in", t1_in, "CSV of init,readout,t_ms,population")->required();
  t1fit->add_option("--out", t1_out, "fit JSON path");

  auto* budget = app.add_subcommand("budget", "assemble the gate error budget");
  std::string budget_pulse, budget_out = "budget.json";
  add_common(budget, common);
  budget->add_option("--pulse", budget_pulse, "pulse CSV")->required();
  budget->add_option("--out", budget_out, "budget JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string command;
  for (int i = 0; i < argc; ++i) command += std::string(i ? " " : "") + argv[i];
  const auto start = std::chrono::steady_clock::now();

  try {
    const dcg::RunConfig cfg = resolve_config(common);

    if (app.got_subcommand(optimize)) {
      dcg::GrapeConfig gcfg = dcg::to_grape_config(cfg);
      dcg::GrapeResult best;
      for (int s = 0; s < opt_starts; ++s) {
        gcfg.seed = cfg.seed + static_cast<std::uint64_t>(s);
        dcg::GrapeResult r = dcg::grape_optimize(gcfg, cfg.system);
        if (s == 0 || r.final_infidelity < best.final_infidelity) best = std::move(r);
      }
      dcg::write_pulse_csv(best.pulse, opt_out);
      json trace{{"final_infidelity", best.final_infidelity},
                 {"iterations", best.iterations},
                 {"converged", best.converged},
                 {"objective_trace", best.objective_trace}};
      write_text(opt_trace, trace.dump(2) + "\n");
      if (!best.converged)
        std::cerr << "warning: target infidelity not reached (best "
                  << best.final_infidelity << ")\n";
    } else if (app.got_subcommand(evaluate)) {
      const dcg::PulseWaveform pulse = dcg::read_pulse_csv(eval_pulse);
      const dcg::Matrix target = dcg::named_target(cfg.grape.target);
      const std::vector<dcg::NoiseSample> zero = {{0.0, 0.0, 0.0}};
      const auto samples = dcg::sample_noise(cfg.noise, cfg.seed, eval_n);
      json report;
      report["intrinsic_infidelity"] =
          1.0 - dcg::evaluate_sampled_fidelity(pulse, zero, cfg.system, target);
      json per_sample = json::array();
      double mean = 0.0;
      for (const auto& s : samples) {
        const std::vector<dcg::NoiseSample> one = {s};
        const double inf = 1.0 - dcg::evaluate_sampled_fidelity(pulse, one, cfg.system, target);
        per_sample.push_back(inf);
        mean += inf / samples.size();
      }
      report["mean_infidelity"] = mean;
      report["per_sample"] = per_sample;
      if (!cfg.noise.carbons.empty() && cfg.noise.carbons.size() <= 6) {
        const auto bath =
            dcg::evaluate_quantum_bath(pulse, cfg.noise.carbons, cfg.system, dcg::OpBranch::kNot);
        report["bath_fidelity"] = bath.fidelity;
        report["purity_final"] = bath.purity_trace.back().second;
      }
      if (eval_full) {
        const auto full = dcg::evaluate_full_model(pulse, cfg.system);
        report["rwa_leakage_infidelity"] = full.infidelity;
        report["leakage"] = full.leakage;
      }
      write_text(eval_out, report.dump(2) + "\n");
    } else if (app.got_subcommand(scan)) {
      const dcg::PulseWaveform pulse = dcg::read_pulse_csv(scan_pulse);
      const auto omegas = dcg::parse_range(scan_range);
      const auto rows = dcg::scan_noise_frequency(pulse, omegas, scan_sigma, scan_n, cfg.seed,
                                                  cfg.system, dcg::named_target(cfg.grape.target));
      dcg::write_xy_csv(scan_out, "omega_khz,infidelity", rows);
    } else if (app.got_subcommand(filter)) {
      const dcg::PulseWaveform pulse = dcg::read_pulse_csv(filter_pulse);
      std::ofstream out(filter_out, std::ios::binary);
      if (!out) throw std::invalid_argument("cannot write file: " + filter_out);
      out << "omega_khz,f1,first_order_infidelity\n";
      out.precision(17);
      for (double w : dcg::parse_range(filter_range))
        out << w << ',' << dcg::filter_function_first_order(pulse, w, cfg.system) << ','
            << dcg::first_order_infidelity(pulse, w, filter_sigma, cfg.system) << '\n';
    } else if (app.got_subcommand(ddsim)) {
      std::vector<std::pair<double, double>> rows;
      for (double tau : dcg::parse_range(dd_range))
        rows.emplace_back(tau, dcg::multi_spin_coherence(cfg.noise.carbons, {dd_n, tau},
                                                         cfg.noise.omega_c_khz, dd_manifold));
      dcg::write_xy_csv(dd_out, "tau_us,coherence", rows);
    } else if (app.got_subcommand(ddfit)) {
      const auto data = dcg::read_xy_csv(ddfit_in);
      const auto fit = dcg::fit_carbon_dip(data, ddfit_n, cfg.noise.omega_c_khz,
                                           {guess_azz, guess_aperp}, ddfit_k, ddfit_manifold);
      json report{{"a_zz_khz", fit.a_zz_khz},
                  {"a_perp_khz", fit.a_perp_khz},
                  {"residual_rms", fit.residual_rms},
                  {"converged", fit.converged}};
      write_text(ddfit_out, report.dump(2) + "\n");
    } else if (app.got_subcommand(rb)) {
      std::optional<int> interleaved;
      if (rb_interleaved >= 0) interleaved = rb_interleaved;
      std::vector<dcg::RbSequence> seqs;
      std::uint64_t stream = 0;
      for (int m : cfg.rb.lengths)
        for (int r = 0; r < cfg.rb.randomizations; ++r)
          seqs.push_back(dcg::compile_rb_sequence(m, interleaved, cfg.seed + 7919 * ++stream));
      const auto channel = dcg::depolarizing_channel(cfg.rb.depolarizing_p);
      const auto points = dcg::simulate_sequence_survival(seqs, channel, cfg.rb.shots, cfg.seed);
      std::vector<std::pair<double, double>> fit_points;
      std::ofstream out(rb_out, std::ios::binary);
      if (!out) throw std::invalid_argument("cannot write file: " + rb_out);
      out << "m,mean_survival,sem\n";
      out.precision(17);
      for (const auto& p : points) {
        out << p.m << ',' << p.mean << ',' << p.sem << '\n';
        fit_points.emplace_back(p.m, p.mean);
      }
      const auto fit = dcg::fit_rb_decay(fit_points);
      json report{{"a", fit.a},
                  {"b", fit.b},
                  {"p", fit.p},
                  {"stderr_p", fit.stderr_p},
                  {"fidelity_per_clifford", fit.fidelity_per_clifford()},
                  {"converged", fit.converged}};
      write_text(rb_fit_out, report.dump(2) + "\n");
    } else if (app.got_subcommand(t1fit)) {
      std::ifstream in(t1_in);
      if (!in) throw std::invalid_argument("cannot open file: " + t1_in);
      std::string line;
      if (!std::getline(in, line) || line != "init,readout,t_ms,population")
        throw std::invalid_argument("expected header init,readout,t_ms,population");
      std::map<std::pair<int, int>, dcg::PopulationCurve> curves;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        double vals[4];
        for (double& v : vals) {
          if (!std::getline(ss, cell, ',')) throw std::invalid_argument("bad row: " + line);
          v = std::stod(cell);
        }
        auto& curve = curves[{static_cast<int>(vals[0]), static_cast<int>(vals[1])}];
        curve.initial = static_cast<int>(vals[0]);
        curve.readout = static_cast<int>(vals[1]);
        curve.points.emplace_back(vals[2], vals[3]);
      }
      std::vector<dcg::PopulationCurve> list;
      for (auto& [key, c] : curves) list.push_back(std::move(c));
      const auto fit = dcg::fit_rate_matrix(list);
      json report{{"gamma_p1", fit.rates.gamma_p1},
                  {"gamma_m1", fit.rates.gamma_m1},
                  {"gamma_2", fit.rates.gamma_2},
                  {"residual_rms", fit.residual_rms},
                  {"converged", fit.converged},
                  {"t1_gate_error", dcg::t1_gate_error(fit.rates, cfg.system.t_gate_ns)}};
      write_text(t1_out, report.dump(2) + "\n");
    } else if (app.got_subcommand(budget)) {
      const dcg::PulseWaveform pulse = dcg::read_pulse_csv(budget_pulse);
      write_text(budget_out, dcg::budget_to_json(dcg::error_budget(pulse, cfg)));
    }

    finish_run(cfg, command, start);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
