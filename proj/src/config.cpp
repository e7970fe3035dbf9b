#include "dcg/config.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace dcg {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& section) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.contains(key))
      throw std::invalid_argument("unknown key '" + key + "' in " + section);
}

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

json system_to_json(const SystemConstants& c) {
  return {{"d_khz", c.d_khz},
          {"q_khz", c.q_khz},
          {"a_par_n_khz", c.a_par_n_khz},
          {"a_perp_n_khz", c.a_perp_n_khz},
          {"gamma_ratio", c.gamma_ratio},
          {"b0_gauss", c.b0_gauss},
          {"omega_c_khz", c.omega_c_khz},
          {"a_par_eff_khz", c.a_par_eff_khz},
          {"t_gate_ns", c.t_gate_ns}};
}

void system_from_json(const json& obj, SystemConstants& c) {
  reject_unknown_keys(obj,
                      {"d_khz", "q_khz", "a_par_n_khz", "a_perp_n_khz", "gamma_ratio", "b0_gauss",
                       "omega_c_khz", "a_par_eff_khz", "t_gate_ns"},
                      "system");
  read_field(obj, "d_khz", c.d_khz);
  read_field(obj, "q_khz", c.q_khz);
  read_field(obj, "a_par_n_khz", c.a_par_n_khz);
  read_field(obj, "a_perp_n_khz", c.a_perp_n_khz);
  read_field(obj, "gamma_ratio", c.gamma_ratio);
  read_field(obj, "b0_gauss", c.b0_gauss);
  read_field(obj, "omega_c_khz", c.omega_c_khz);
  read_field(obj, "a_par_eff_khz", c.a_par_eff_khz);
  read_field(obj, "t_gate_ns", c.t_gate_ns);
  if (c.t_gate_ns <= 0.0) throw std::invalid_argument("system.t_gate_ns must be positive");
}

json carbons_to_json(const std::vector<CarbonSpin>& spins) {
  json arr = json::array();
  for (const auto& s : spins)
    arr.push_back({{"a_zz_khz", s.a_zz_khz}, {"a_perp_khz", s.a_perp_khz}, {"phi_rad", s.phi_rad}});
  return arr;
}

std::vector<CarbonSpin> carbons_from_json(const json& arr) {
  std::vector<CarbonSpin> spins;
  for (const auto& item : arr) {
    reject_unknown_keys(item, {"a_zz_khz", "a_perp_khz", "phi_rad"}, "noise.carbons");
    CarbonSpin s;
    read_field(item, "a_zz_khz", s.a_zz_khz);
    read_field(item, "a_perp_khz", s.a_perp_khz);
    read_field(item, "phi_rad", s.phi_rad);
    if (s.a_perp_khz < 0.0) throw std::invalid_argument("carbon a_perp_khz must be >= 0");
    spins.push_back(s);
  }
  return spins;
}

}  // namespace

std::vector<CarbonSpin> default_carbon_table() {
  // Shapes chosen below 70 kHz; scales fixed so that
  // sum a_zz^2 = 4 (53.4^2 - 20^2) and sum a_perp^2 = 8 (45.4^2 - 30^2),
  // making classicize() of the (20, 30, 30) base model exact.
  const double zz_target = 4.0 * (53.4 * 53.4 - 20.0 * 20.0);
  const double perp_target = 8.0 * (45.4 * 45.4 - 30.0 * 30.0);
  std::vector<double> zz = {60.0, -50.0, 40.0, 30.0, -20.0};
  std::vector<double> perp = {55.0, 50.0, 40.0, 30.0, 20.0};
  double zz2 = 0.0, perp2 = 0.0;
  for (double v : zz) zz2 += v * v;
  for (double v : perp) perp2 += v * v;
  const double sz = std::sqrt(zz_target / zz2), sp = std::sqrt(perp_target / perp2);
  std::vector<CarbonSpin> spins;
  const double phis[5] = {0.0, 1.2, 2.5, 3.7, 5.1};
  for (int i = 0; i < 5; ++i) spins.push_back({zz[i] * sz, perp[i] * sp, phis[i]});
  return spins;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  reject_unknown_keys(root, {"system", "noise", "grape", "rb", "budget", "seed", "output_dir"},
                      "config root");
  RunConfig cfg;
  cfg.noise.carbons = default_carbon_table();
  if (root.contains("system")) system_from_json(root["system"], cfg.system);
  if (root.contains("noise")) {
    const json& n = root["noise"];
    reject_unknown_keys(n, {"sigma_static_khz", "sigma_x_khz", "sigma_y_khz", "omega_c_khz",
                            "carbons"},
                        "noise");
    read_field(n, "sigma_static_khz", cfg.noise.sigma_static_khz);
    read_field(n, "sigma_x_khz", cfg.noise.sigma_x_khz);
    read_field(n, "sigma_y_khz", cfg.noise.sigma_y_khz);
    read_field(n, "omega_c_khz", cfg.noise.omega_c_khz);
    if (n.contains("carbons")) cfg.noise.carbons = carbons_from_json(n["carbons"]);
    cfg.noise.validate();
  }
  if (root.contains("grape")) {
    const json& g = root["grape"];
    reject_unknown_keys(g,
                        {"pieces", "piece_ns", "static_points_khz", "tv_points_khz",
                         "max_amplitude_khz", "amplitude_scales", "step_init", "max_iters",
                         "target_infidelity", "target"},
                        "grape");
    read_field(g, "pieces", cfg.grape.pieces);
    read_field(g, "piece_ns", cfg.grape.piece_ns);
    read_field(g, "static_points_khz", cfg.grape.static_points_khz);
    read_field(g, "tv_points_khz", cfg.grape.tv_points_khz);
    read_field(g, "max_amplitude_khz", cfg.grape.max_amplitude_khz);
    read_field(g, "amplitude_scales", cfg.grape.amplitude_scales);
    read_field(g, "step_init", cfg.grape.step_init);
    read_field(g, "max_iters", cfg.grape.max_iters);
    read_field(g, "target_infidelity", cfg.grape.target_infidelity);
    read_field(g, "target", cfg.grape.target);
    named_target(cfg.grape.target);  // validates the name
    if (cfg.grape.pieces <= 0 || cfg.grape.piece_ns <= 0.0)
      throw std::invalid_argument("grape.pieces and grape.piece_ns must be positive");
    if (cfg.grape.amplitude_scales.empty())
      throw std::invalid_argument("grape.amplitude_scales must be nonempty");
    for (double a : cfg.grape.amplitude_scales)
      if (a <= 0.0) throw std::invalid_argument("grape.amplitude_scales must be positive");
  }
  if (root.contains("rb")) {
    const json& r = root["rb"];
    reject_unknown_keys(r, {"lengths", "randomizations", "shots", "depolarizing_p"}, "rb");
    read_field(r, "lengths", cfg.rb.lengths);
    read_field(r, "randomizations", cfg.rb.randomizations);
    read_field(r, "shots", cfg.rb.shots);
    read_field(r, "depolarizing_p", cfg.rb.depolarizing_p);
    if (cfg.rb.randomizations < 1) throw std::invalid_argument("rb.randomizations must be >= 1");
  }
  if (root.contains("budget")) {
    const json& b = root["budget"];
    reject_unknown_keys(b,
                        {"gamma_p1", "gamma_m1", "gamma_2", "nuclear_decoherence", "rel_sigma",
                         "distortion_tau_ns", "mc_samples"},
                        "budget");
    read_field(b, "gamma_p1", cfg.budget.rates.gamma_p1);
    read_field(b, "gamma_m1", cfg.budget.rates.gamma_m1);
    read_field(b, "gamma_2", cfg.budget.rates.gamma_2);
    read_field(b, "nuclear_decoherence", cfg.budget.nuclear_decoherence);
    read_field(b, "rel_sigma", cfg.budget.rel_sigma);
    read_field(b, "distortion_tau_ns", cfg.budget.distortion_tau_ns);
    read_field(b, "mc_samples", cfg.budget.mc_samples);
    cfg.budget.rates.validate();
  }
  read_field(root, "seed", cfg.seed);
  read_field(root, "output_dir", cfg.output_dir);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const RunConfig& cfg) {
  json root;
  root["system"] = system_to_json(cfg.system);
  root["noise"] = {{"sigma_static_khz", cfg.noise.sigma_static_khz},
                   {"sigma_x_khz", cfg.noise.sigma_x_khz},
                   {"sigma_y_khz", cfg.noise.sigma_y_khz},
                   {"omega_c_khz", cfg.noise.omega_c_khz},
                   {"carbons", carbons_to_json(cfg.noise.carbons)}};
  root["grape"] = {{"pieces", cfg.grape.pieces},
                   {"piece_ns", cfg.grape.piece_ns},
                   {"static_points_khz", cfg.grape.static_points_khz},
                   {"tv_points_khz", cfg.grape.tv_points_khz},
                   {"max_amplitude_khz", cfg.grape.max_amplitude_khz},
                   {"amplitude_scales", cfg.grape.amplitude_scales},
                   {"step_init", cfg.grape.step_init},
                   {"max_iters", cfg.grape.max_iters},
                   {"target_infidelity", cfg.grape.target_infidelity},
                   {"target", cfg.grape.target}};
  root["rb"] = {{"lengths", cfg.rb.lengths},
                {"randomizations", cfg.rb.randomizations},
                {"shots", cfg.rb.shots},
                {"depolarizing_p", cfg.rb.depolarizing_p}};
  root["budget"] = {{"gamma_p1", cfg.budget.rates.gamma_p1},
                    {"gamma_m1", cfg.budget.rates.gamma_m1},
                    {"gamma_2", cfg.budget.rates.gamma_2},
                    {"nuclear_decoherence", cfg.budget.nuclear_decoherence},
                    {"rel_sigma", cfg.budget.rel_sigma},
                    {"distortion_tau_ns", cfg.budget.distortion_tau_ns},
                    {"mc_samples", cfg.budget.mc_samples}};
  root["seed"] = cfg.seed;
  root["output_dir"] = cfg.output_dir;
  return root.dump(2) + "\n";
}

void save_config(const RunConfig& cfg, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write config file: " + path);
  out << config_to_json(cfg);
}

Matrix named_target(const std::string& name) {
  if (name == "cnot") return cnot_target();
  if (name == "x90") return x90_target();
  throw std::invalid_argument("unknown target '" + name + "' (expected cnot or x90)");
}

GrapeConfig to_grape_config(const RunConfig& cfg) {
  GrapeConfig g;
  g.pieces = cfg.grape.pieces;
  g.piece_ns = cfg.grape.piece_ns;
  g.grid = optimization_grid(cfg.grape.static_points_khz, cfg.grape.tv_points_khz);
  g.max_amplitude_khz = cfg.grape.max_amplitude_khz;
  g.amplitude_scales = cfg.grape.amplitude_scales;
  g.step_init = cfg.grape.step_init;
  g.max_iters = cfg.grape.max_iters;
  g.target_infidelity = cfg.grape.target_infidelity;
  g.seed = cfg.seed;
  g.target = named_target(cfg.grape.target);
  return g;
}

void write_pulse_csv(const PulseWaveform& pulse, const std::string& path) {
  pulse.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write pulse file: " + path);
  out << "index,duration_ns,omega_r_khz,omega_i_khz\n";
  out.precision(17);
  for (std::size_t i = 0; i < pulse.pieces.size(); ++i)
    out << i << ',' << pulse.pieces[i].duration_ns << ',' << pulse.pieces[i].omega_r_khz << ','
        << pulse.pieces[i].omega_i_khz << '\n';
}

PulseWaveform read_pulse_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open pulse file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "index,duration_ns,omega_r_khz,omega_i_khz")
    throw std::invalid_argument("bad pulse CSV header in " + path);
  PulseWaveform pulse;
  pulse.label = path;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double vals[4];
    for (double& v : vals) {
      if (!std::getline(ss, cell, ',')) throw std::invalid_argument("short pulse CSV row: " + line);
      v = std::stod(cell);
    }
    pulse.pieces.push_back({vals[1], vals[2], vals[3]});
  }
  pulse.validate();
  return pulse;
}

void write_xy_csv(const std::string& path, const std::string& header,
                  std::span<const std::pair<double, double>> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write file: " + path);
  out << header << '\n';
  out.precision(17);
  for (const auto& [x, y] : rows) out << x << ',' << y << '\n';
}

std::vector<std::pair<double, double>> read_xy_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty CSV: " + path);
  std::vector<std::pair<double, double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("bad CSV row: " + line);
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  return rows;
}

std::vector<double> parse_range(const std::string& text) {
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw std::invalid_argument("range must be start:stop:step, got '" + text + "'");
  const double start = std::stod(text.substr(0, c1));
  const double stop = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = std::stod(text.substr(c2 + 1));
  if (step <= 0.0) throw std::invalid_argument("range step must be positive");
  if (stop < start) throw std::invalid_argument("range stop must be >= start");
  std::vector<double> out;
  for (double v = start; v <= stop + step / 2.0; v += step) out.push_back(v);
  return out;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 1099511628211ULL;
  }
  return hash;
}

void write_manifest(const std::string& path, const RunConfig& cfg, const std::string& command,
                    double wall_seconds) {
  json m;
  m["seed"] = cfg.seed;
  m["config_hash"] = fnv1a(config_to_json(cfg));
  m["version"] = kVersion;
  m["wall_seconds"] = wall_seconds;
  m["command"] = command;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("cannot write manifest: " + path);
  out << m.dump(2) << "\n";
}

}  // namespace dcg
