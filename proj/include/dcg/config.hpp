#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dcg/grape.hpp"
#include "dcg/model.hpp"
#include "dcg/noise.hpp"
#include "dcg/relax.hpp"

namespace dcg {

inline constexpr const char* kVersion = "0.1.0";

struct GrapeSettings {
  int pieces = 30;
  double piece_ns = 50.0;
  std::vector<double> static_points_khz = {-88.0, 0.0, 88.0};
  std::vector<double> tv_points_khz = {-76.0, 0.0, 76.0};
  double max_amplitude_khz = 10000.0;
  std::vector<double> amplitude_scales = {1.0};  // relative drive scales in the objective
  double step_init = 1e4;
  int max_iters = 2000;
  double target_infidelity = 1e-3;
  std::string target = "cnot";  // "cnot" or "x90"
};

struct RbSettings {
  std::vector<int> lengths = {1, 5, 10, 20, 40, 80, 100};
  int randomizations = 30;
  int shots = 0;            // 0 -> exact survival
  double depolarizing_p = 0.0026;  // per-Clifford depolarizing strength
};

struct BudgetSettings {
  RateMatrix rates{98.0, 100.0, 130.0};
  double nuclear_decoherence = 7e-6;  // config-supplied constant
  double rel_sigma = 0.018;
  double distortion_tau_ns = 10.0;
  int mc_samples = 2000;
};

struct RunConfig {
  SystemConstants system;
  NoiseModel noise;  // carbons default to the five-spin consistency table
  GrapeSettings grape;
  RbSettings rb;
  BudgetSettings budget;
  std::uint64_t seed = 1;
  std::string output_dir = ".";
};

// Five spins with couplings <= 70 kHz scaled so that classicize() of the
// (20, 30, 30) kHz base model gives exactly (45.4, 45.4, 53.4) kHz.
std::vector<CarbonSpin> default_carbon_table();

// Strict JSON load: unknown keys rejected, invariants validated, defaults applied.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& json_text);  // same, from a string
std::string config_to_json(const RunConfig& cfg);      // canonical serialization
void save_config(const RunConfig& cfg, const std::string& path);

// Target matrix named by GrapeSettings::target.
Matrix named_target(const std::string& name);
GrapeConfig to_grape_config(const RunConfig& cfg);

// Pulse CSV: header `index,duration_ns,omega_r_khz,omega_i_khz`, LF endings.
void write_pulse_csv(const PulseWaveform& pulse, const std::string& path);
PulseWaveform read_pulse_csv(const std::string& path);

// Two-column CSV with a mandatory header.
void write_xy_csv(const std::string& path, const std::string& header,
                  std::span<const std::pair<double, double>> rows);
std::vector<std::pair<double, double>> read_xy_csv(const std::string& path);

// `start:stop:step` (inclusive stop within half a step).
std::vector<double> parse_range(const std::string& text);

std::uint64_t fnv1a(const std::string& text);

// manifest.json: seed, config hash, version, wall time, command line.
void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& command,
                    double wall_seconds);

}  // namespace dcg
