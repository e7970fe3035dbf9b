#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dcg/model.hpp"

namespace dcg {

// Counter-based generator: splitmix64 finalizer over (seed, stream, counter).
// Substreams indexed per sample keep parallel consumption deterministic.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);
  double uniform();   // [0, 1)
  double gaussian();  // N(0, 1), Box-Muller
  std::uint64_t next_u64();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

struct NoiseModel {
  double sigma_static_khz = 20.0;
  double sigma_x_khz = 30.0;
  double sigma_y_khz = 30.0;
  double omega_c_khz = -546.67;
  std::vector<CarbonSpin> carbons;

  void validate() const;  // sigma_x == sigma_y, all sigmas >= 0
};

struct NoiseSample {
  double x_khz = 0.0;
  double y_khz = 0.0;
  double z_khz = 0.0;
};

std::vector<NoiseSample> sample_noise(const NoiseModel& model, std::uint64_t seed, int count);

struct ClassicizedStrengths {
  double sigma_x_khz;
  double sigma_y_khz;
  double sigma_z_khz;
};

// Folds each quantum spin into the classical model: A_zz/2 adds statically,
// a_perp/2 is the combined quadrature strength, split evenly between x and y.
ClassicizedStrengths classicize(const NoiseModel& model);

// Full Cartesian product of (x, y, z) over the given point lists.
std::vector<NoiseSample> optimization_grid(std::span<const double> static_points_khz,
                                           std::span<const double> tv_points_khz);

struct SpectralPeak {
  double frequency_khz;  // >= 0
  double area_khz2;
};

// Static entry at zero frequency, one bath peak at |w_C|, one peak per carbon
// at |w_C - a_zz/2|.
std::vector<SpectralPeak> spectrum(const NoiseModel& model);

}  // namespace dcg
