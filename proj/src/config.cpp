#include "vlamax/config.hpp"

#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <random>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace vlamax {

namespace {

std::vector<long> parse_list(const std::string& s) {
  std::vector<long> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (tok.find_first_not_of(" \t") != std::string::npos) out.push_back(std::stol(tok));
  return out;
}

std::string join(const std::vector<long>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("config: T must be positive");
  if (!(dt > 0.0)) throw std::invalid_argument("config: dt must be positive");
  const double steps = T / dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * steps)
    throw std::invalid_argument("config: dt must divide T");
  if (snapshot_interval > 0.0) {
    const double k = snapshot_interval / dt;
    if (std::abs(k - std::round(k)) > 1e-9 * k) throw std::invalid_argument("config: dt must divide snapshot interval");
  }
  if (N_list.empty() || seeds < 1 || M < 1) throw std::invalid_argument("config: empty N list, seeds or M");
  for (long N : N_list)
    if (N < 1) throw std::invalid_argument("config: N must be >= 1");
  if (!(f0.x_radius > 0.0) || !(f0.xi_radius > 0.0)) throw std::invalid_argument("config: f0 radii must be positive");
  if (strict) {
    if (!(gamma < 1.0 / 12.0)) throw StrictModeError("strict: gamma must be < 1/12");
    if (!(gamma < delta && delta < 0.25)) throw StrictModeError("strict: need gamma < delta < 1/4");
  }
}

std::string ExperimentConfig::canonical() const {
  std::ostringstream os;
  os << std::setprecision(17) << "f0.x_radius=" << f0.x_radius << ";f0.xi_radius=" << f0.xi_radius
     << ";gamma=" << gamma << ";r_N=" << r_N << ";N=" << join(N_list) << ";seeds=" << seeds << ";seed=" << seed
     << ";T=" << T << ";dt=" << dt << ";delta=" << delta << ";M=" << M << ";R_max=" << R_max
     << ";self=" << self_interaction << ";vbar=" << vbar
     << ";mode=" << (field_mode == FieldMode::Exact ? "exact" : "tabulated") << ";shock=" << shock_order
     << ";n_lat=" << n_lat << ";energy_cells=" << energy_cells << ";conc_N=" << join(conc_N)
     << ";conc_seeds=" << conc_seeds << ";conc_ref=" << conc_ref_factor;
  return os.str();
}

// 64-bit FNV-1a of the canonical form
std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

FieldOptions ExperimentConfig::field_options() const {
  FieldOptions o;
  o.mode = field_mode;
  o.shock_order = shock_order;
  return o;
}

MicroConfig ExperimentConfig::micro_config() const {
  MicroConfig m;
  m.dt = dt;
  m.self_interaction = self_interaction;
  m.field = field_options();
  m.vbar = vbar;
  return m;
}

ReferenceConfig ExperimentConfig::reference_config(long N) const {
  ReferenceConfig r;
  r.M = M;
  r.seed = derive_seed(seed, N, -1);
  r.R_max = R_max;
  r.dyn = micro_config();
  return r;
}

RescaledFormFactor ExperimentConfig::form_factor(long N) const {
  static const FormFactor prof = make_standard_profile();
  if (r_N > 0.0) return RescaledFormFactor(prof, r_N);
  return rescale(prof, N, gamma, strict);
}

void apply_env_overrides(ExperimentConfig& c) {
  if (const char* s = std::getenv("VLAMAX_SEED")) c.seed = std::stoull(s);
  if (const char* s = std::getenv("VLAMAX_OUTPUT_DIR")) c.output_dir = s;
}

ExperimentConfig load_config(const std::string& path) {
  namespace pt = boost::property_tree;
  pt::ptree t;
  pt::read_ini(path, t);
  ExperimentConfig c;
  c.f0.x_radius = t.get("f0.x_radius", c.f0.x_radius);
  c.f0.xi_radius = t.get("f0.xi_radius", c.f0.xi_radius);
  c.gamma = t.get("form_factor.gamma", c.gamma);
  c.r_N = t.get("form_factor.r_N", c.r_N);
  if (auto s = t.get_optional<std::string>("run.N")) c.N_list = parse_list(*s);
  c.seeds = t.get("run.seeds", c.seeds);
  c.seed = t.get("run.seed", c.seed);
  c.T = t.get("run.T", c.T);
  c.dt = t.get("run.dt", c.dt);
  c.snapshot_interval = t.get("run.snapshot_interval", c.snapshot_interval);
  c.strict = t.get("run.strict", c.strict);
  c.output_dir = t.get("run.output_dir", c.output_dir);
  c.delta = t.get("chaos.delta", c.delta);
  c.M = t.get("mean_field.M", c.M);
  c.R_max = t.get("mean_field.R_max", c.R_max);
  c.self_interaction = t.get("micro.self_interaction", c.self_interaction);
  c.vbar = t.get("micro.vbar", c.vbar);
  if (auto s = t.get_optional<std::string>("fields.mode")) c.field_mode = parse_field_mode(*s);
  c.shock_order = t.get("fields.shock_order", c.shock_order);
  c.n_lat = t.get("lattice.n_lat", c.n_lat);
  c.energy_cells = t.get("energy.cells", c.energy_cells);
  if (auto s = t.get_optional<std::string>("concentration.N")) c.conc_N = parse_list(*s);
  c.conc_seeds = t.get("concentration.seeds", c.conc_seeds);
  c.conc_ref_factor = t.get("concentration.ref_factor", c.conc_ref_factor);
  apply_env_overrides(c);
  c.validate();
  return c;
}

std::uint64_t derive_seed(std::uint64_t base, long N, int index) {
  std::seed_seq ss{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                   static_cast<std::uint32_t>(N), static_cast<std::uint32_t>(index + 1)};
  std::uint32_t out[2];
  ss.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace vlamax
