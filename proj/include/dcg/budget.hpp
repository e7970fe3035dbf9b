#pragma once

#include <string>
#include <vector>

#include "dcg/config.hpp"
#include "dcg/grape.hpp"

namespace dcg {

struct BudgetEntry {
  std::string source;
  double error = 0.0;
  std::string method;
};

struct ErrorBudget {
  std::vector<BudgetEntry> entries;
  double total = 0.0;  // 1 - prod(1 - e_i)
};

// Assembles the residual-infidelity budget for a pulse: spin bath, T1
// relaxation, waveform distortion, amplitude instability, RWA + leakage, and
// the config-supplied nuclear-decoherence constant.
ErrorBudget error_budget(const PulseWaveform& pulse, const RunConfig& cfg);

std::string budget_to_json(const ErrorBudget& budget);

}  // namespace dcg
