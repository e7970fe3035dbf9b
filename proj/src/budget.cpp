#include "dcg/budget.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "dcg/relax.hpp"

namespace dcg {

ErrorBudget error_budget(const PulseWaveform& pulse, const RunConfig& cfg) {
  pulse.validate();
  ErrorBudget budget;
  const Matrix target = named_target(cfg.grape.target);
  const std::vector<NoiseSample> zero = {{0.0, 0.0, 0.0}};
  const double intrinsic = 1.0 - evaluate_sampled_fidelity(pulse, zero, cfg.system, target);

  // Spin bath: Monte Carlo over the classicized noise model, cross-checked
  // against the joint quantum-bath evolution; the larger estimate is reported.
  {
    const auto samples = sample_noise(cfg.noise, cfg.seed, cfg.budget.mc_samples);
    const double classical =
        1.0 - evaluate_sampled_fidelity(pulse, samples, cfg.system, target);
    double quantum = 0.0;
    if (!cfg.noise.carbons.empty() && cfg.noise.carbons.size() <= 6) {
      const auto bath = evaluate_quantum_bath(pulse, cfg.noise.carbons, cfg.system,
                                              OpBranch::kNot);
      quantum = 1.0 - bath.fidelity;
    }
    budget.entries.push_back({"13C spin bath",
                              std::max(0.0, std::max(classical, quantum) - intrinsic),
                              "Monte Carlo classical noise vs joint quantum bath, "
                              "intrinsic error subtracted"});
  }

  budget.entries.push_back({"T1 relaxation", t1_gate_error(cfg.budget.rates, pulse.total_ns()),
                            "((gamma_p1 + gamma_2)/2 + gamma_m1) T_gate"});

  {
    const PulseWaveform distorted = apply_distortion(pulse, cfg.budget.distortion_tau_ns);
    const double err = 1.0 - evaluate_sampled_fidelity(distorted, zero, cfg.system, target);
    budget.entries.push_back({"waveform distortion", std::max(0.0, err - intrinsic),
                              "first-order low-pass response, intrinsic error subtracted"});
  }

  {
    const double err = amplitude_instability_error(pulse, cfg.budget.rel_sigma,
                                                   cfg.budget.mc_samples, cfg.seed, cfg.system,
                                                   target);
    budget.entries.push_back({"amplitude instability", std::max(0.0, err - intrinsic),
                              "common Gaussian amplitude scale, intrinsic error subtracted"});
  }

  {
    const FullModelReport full = evaluate_full_model(pulse, cfg.system);
    budget.entries.push_back({"RWA + leakage", std::max(0.0, full.infidelity - intrinsic),
                              "nine-level lab-frame propagation, intrinsic error subtracted"});
  }

  budget.entries.push_back({"nuclear decoherence", cfg.budget.nuclear_decoherence,
                            "config-supplied constant"});

  double kept = 1.0;
  for (const auto& e : budget.entries) kept *= 1.0 - e.error;
  budget.total = 1.0 - kept;
  return budget;
}

std::string budget_to_json(const ErrorBudget& budget) {
  nlohmann::json root;
  root["entries"] = nlohmann::json::array();
  for (const auto& e : budget.entries)
    root["entries"].push_back({{"source", e.source}, {"error", e.error}, {"method", e.method}});
  root["total"] = budget.total;
  return root.dump(2) + "\n";
}

}  // namespace dcg
