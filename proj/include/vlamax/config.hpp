#pragma once
// Experiment configuration: one key/value file with a section per module.

#include <cstdint>
#include <string>
#include <vector>

#include "vlamax/fields.hpp"
#include "vlamax/meanfield.hpp"

namespace vlamax {

struct ExperimentConfig {
  // [f0]
  F0Spec f0;
  // [form_factor]
  double gamma = 1.0 / 12.0;
  double r_N = 0.0;  // > 0 overrides N^-gamma
  // [run]
  std::vector<long> N_list{64, 128, 256, 512};
  int seeds = 10;
  std::uint64_t seed = 20240611;
  double T = 0.5;
  double dt = 0.025;
  double snapshot_interval = 0.0;  // 0: final state only
  bool strict = false;
  std::string output_dir = "out";
  // [chaos]
  double delta = 0.1;
  // [mean_field]
  int M = 1024;
  double R_max = 2.0;
  // [micro]
  bool self_interaction = true;
  double vbar = 0.95;
  // [fields]
  FieldMode field_mode = FieldMode::Tabulated;
  int shock_order = 24;
  // [lattice]
  int n_lat = 0;  // 0: ceil(N^(1/3))
  // [energy]
  int energy_cells = 16;
  // [concentration]
  std::vector<long> conc_N{128, 256, 512, 1024, 2048, 4096, 8192};
  int conc_seeds = 20;
  int conc_ref_factor = 1;

  void validate() const;
  std::string canonical() const;  // stable serialization, the basis of the hash
  std::string hash() const;       // 16 hex digits
  FieldOptions field_options() const;
  MicroConfig micro_config() const;
  ReferenceConfig reference_config(long N) const;
  RescaledFormFactor form_factor(long N) const;
  double support_radius() const { return f0.x_radius + T + 1.0; }
};

// reads an INI file; missing keys keep their defaults. VLAMAX_SEED and VLAMAX_OUTPUT_DIR override.
ExperimentConfig load_config(const std::string& path);
void apply_env_overrides(ExperimentConfig& c);

// per-(N, seed index) seed derived from the base seed
std::uint64_t derive_seed(std::uint64_t base, long N, int index);

}  // namespace vlamax
