#pragma once
// Microscopic Abraham dynamics: N rigid smoothed charges in their joint retarded fields.

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "vlamax/fields.hpp"
#include "vlamax/transport.hpp"

namespace vlamax {

struct InstabilityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Forces on receivers at (t, x_j, xi_j). begin_step/after_stage1 let a provider keep a lagged view
// of its sources in step with the integrator.
class ForceProvider {
 public:
  virtual ~ForceProvider() = default;
  virtual void begin_step(int /*n*/) {}
  virtual void after_stage1(int /*n*/, const std::vector<Vec3>& /*K1*/) {}
  virtual void forces(double t, const std::vector<Vec3>& x, const std::vector<Vec3>& xi,
                      std::vector<Vec3>& F) const = 0;
};

// classical RK4 for dx/dt = v(xi), dxi/dt = F(t, x, xi); K1 receives the stage-1 forces
void rk4_step(std::vector<Vec3>& x, std::vector<Vec3>& xi, double t, double dt, ForceProvider& force, int n,
              std::vector<Vec3>& K1);

// sum over sources of w [E + v x B] at each receiver, sources in ascending index order
void lorentz_sum(const std::vector<TrajectoryHistory>& src, double w, const FieldEvaluator& ev, double t,
                 const std::vector<Vec3>& x, const std::vector<Vec3>& xi, bool include_self,
                 std::vector<Vec3>& F);

struct MicroConfig {
  double dt = 0.025;
  bool self_interaction = true;
  FieldOptions field;
  double vbar = 0.95;     // monitored bound on |v|
  double max_dxi = 10.0;  // instability detector: largest admissible |dxi| in one step
};

class MicroState {
 public:
  MicroState(const std::vector<PhaseState>& Z, const RescaledFormFactor& chi, const MicroConfig& cfg);

  int size() const { return static_cast<int>(x.size()); }
  double time() const { return steps * cfg.dt; }
  double weight() const { return 1.0 / size(); }
  const std::vector<TrajectoryHistory>& histories() const { return hist; }
  // fields acting on particles (double mollification) and fields in space (single)
  const FieldEvaluator& force_evaluator() const { return *force_ev; }
  const FieldEvaluator& field_evaluator() const { return *field_ev; }

  MicroConfig cfg;
  RescaledFormFactor chi;
  std::vector<Vec3> x, xi, K;
  std::vector<TrajectoryHistory> hist;
  std::shared_ptr<const FieldEvaluator> force_ev, field_ev;
  long steps = 0;
  double max_speed = 0.0;
  double max_momentum = 0.0;  // running sup of |xi|
  bool vbar_exceeded = false;
  long subluminal_violations = 0;
};

MicroState init_micro(const std::vector<PhaseState>& Z, const RescaledFormFactor& chi, const MicroConfig& cfg);

// smoothed Lorentz force on particle i at the current time
Vec3 force_on_particle(const MicroState& s, int i);

// one RK4 step of size cfg.dt; with an external provider the particles are driven by it instead of
// their own fields (histories are still recorded)
void step(MicroState& s, ForceProvider* external = nullptr);

struct EnergyGrid {
  Vec3 center = Vec3::Zero();
  double half_width = 2.0;
  int n = 32;  // cells per axis, midpoint rule
};

struct EnergyReport {
  double kinetic = 0.0;
  double field = 0.0;
  double self_field = 0.0;  // sum of single-particle field energies
  double total = 0.0;
  double spacing = 0.0;
  long points = 0;
  double boundary_fraction = 0.0;  // share of field energy in the outermost cell layer
  bool truncation_warning = false;
};

EnergyReport energy(const MicroState& s, const EnergyGrid& g);

double momentum_support(const std::vector<Vec3>& xi);
inline double momentum_support(const MicroState& s) { return momentum_support(s.xi); }

// sampled (x, xi) at every history step: frames[k] holds N*6 values at t = k dt
TrajectorySet trajectories(const std::vector<TrajectoryHistory>& h);

}  // namespace vlamax
