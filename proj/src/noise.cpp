#include "dcg/noise.hpp"

#include <cmath>
#include <stdexcept>

namespace dcg {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix64(splitmix64(seed) ^ (stream * 0xda942042e4dd58b5ULL + 1))) {}

std::uint64_t Rng::next_u64() { return splitmix64(key_ + (++counter_) * 0x9e3779b97f4a7c15ULL); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  spare_ = r * std::sin(2.0 * kPi * u2);
  has_spare_ = true;
  return r * std::cos(2.0 * kPi * u2);
}

void NoiseModel::validate() const {
  if (sigma_x_khz != sigma_y_khz)
    throw std::invalid_argument("noise model requires sigma_x == sigma_y");
  if (sigma_static_khz < 0.0 || sigma_x_khz < 0.0)
    throw std::invalid_argument("noise strengths must be non-negative");
  for (const auto& c : carbons)
    if (c.a_perp_khz < 0.0) throw std::invalid_argument("carbon a_perp must be non-negative");
}

std::vector<NoiseSample> sample_noise(const NoiseModel& model, std::uint64_t seed, int count) {
  if (count < 1) throw std::invalid_argument("sample count must be >= 1");
  model.validate();
  std::vector<NoiseSample> out(count);
  for (int i = 0; i < count; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    out[i].x_khz = model.sigma_x_khz * rng.gaussian();
    out[i].y_khz = model.sigma_y_khz * rng.gaussian();
    out[i].z_khz = model.sigma_static_khz * rng.gaussian();
  }
  return out;
}

ClassicizedStrengths classicize(const NoiseModel& model) {
  model.validate();
  double var_z = model.sigma_static_khz * model.sigma_static_khz;
  double var_x = model.sigma_x_khz * model.sigma_x_khz;
  for (const auto& c : model.carbons) {
    const double half_zz = 0.5 * c.a_zz_khz;
    const double half_perp = 0.5 * c.a_perp_khz;
    var_z += half_zz * half_zz;
    var_x += 0.5 * half_perp * half_perp;  // combined strength split evenly in x/y
  }
  return {std::sqrt(var_x), std::sqrt(var_x), std::sqrt(var_z)};
}

std::vector<NoiseSample> optimization_grid(std::span<const double> static_points_khz,
                                           std::span<const double> tv_points_khz) {
  if (static_points_khz.empty() || tv_points_khz.empty())
    throw std::invalid_argument("grid point lists must be nonempty");
  std::vector<NoiseSample> out;
  out.reserve(tv_points_khz.size() * tv_points_khz.size() * static_points_khz.size());
  for (double x : tv_points_khz)
    for (double y : tv_points_khz)
      for (double z : static_points_khz) out.push_back({x, y, z});
  return out;
}

std::vector<SpectralPeak> spectrum(const NoiseModel& model) {
  model.validate();
  std::vector<SpectralPeak> peaks;
  double static_area = model.sigma_static_khz * model.sigma_static_khz;
  for (const auto& c : model.carbons) static_area += 0.25 * c.a_zz_khz * c.a_zz_khz;
  peaks.push_back({0.0, static_area});
  peaks.push_back({std::abs(model.omega_c_khz),
                   model.sigma_x_khz * model.sigma_x_khz + model.sigma_y_khz * model.sigma_y_khz});
  for (const auto& c : model.carbons)
    peaks.push_back({std::abs(model.omega_c_khz - 0.5 * c.a_zz_khz),
                     0.25 * c.a_perp_khz * c.a_perp_khz});
  return peaks;
}

}  // namespace dcg
