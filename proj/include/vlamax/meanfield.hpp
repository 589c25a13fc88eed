#pragma once
// Regularized Vlasov-Maxwell flow represented by an ensemble of M reference characteristics,
// plus passive tracers driven by the finished (frozen) reference.

#include <cstdint>
#include <vector>

#include "vlamax/abraham.hpp"

namespace vlamax {

// f0(x, xi) proportional to bump(|x|/x_radius) bump(|xi|/xi_radius)
struct F0Spec {
  double x_radius = 1.0;
  double xi_radius = 0.5;
  double density(const Vec3& x, const Vec3& xi) const;
  // spatial charge density rho[f0] (normalized bump of radius x_radius)
  double rho(double r) const;
};

// i.i.d. draws by rejection from the product bump; antithetic pairs (x, xi), (x, -xi) if requested.
// Throws when the acceptance rate falls below 1e-4.
std::vector<PhaseState> sample_f0(const F0Spec& f0, int n, std::uint64_t seed, bool antithetic = false);

// Stratified draw for the reference ensemble: jittered quantiles of |x| and |xi|, spherical
// Fibonacci directions under a random rotation, atoms in pairs (x, xi), (-x, -xi). Each atom is
// still f0-distributed; the ensemble's low multipoles are far more accurate than i.i.d. sampling.
std::vector<PhaseState> sample_f0_stratified(const F0Spec& f0, int n, std::uint64_t seed);

struct ReferenceConfig {
  int M = 1024;
  std::uint64_t seed = 1;
  double R_max = 2.0;  // momentum-support bound; runs exceeding it are flagged
  MicroConfig dyn;     // dt, field options; self-interaction of the ensemble is kept
};

struct ReferenceEnsemble {
  ReferenceEnsemble(const F0Spec& f0, const RescaledFormFactor& chi, const ReferenceConfig& cfg);
  ReferenceEnsemble(const std::vector<PhaseState>& atoms, const RescaledFormFactor& chi, const ReferenceConfig& cfg);
  int size() const { return state.size(); }
  double time() const { return state.time(); }
  double weight() const { return state.weight(); }
  const std::vector<TrajectoryHistory>& histories() const { return state.hist; }
  bool outside_regime() const { return max_momentum > cfg.R_max; }

  ReferenceConfig cfg;
  MicroState state;
  double max_momentum = 0.0;
};

// double-smoothed mean-field Lorentz force at (t, x, xi) from the reference histories
Vec3 mean_field_force(const ReferenceEnsemble& ens, double t, const Vec3& x, const Vec3& xi);

// self-consistent evolution up to time T (same integrator contract as the microscopic step)
void evolve_reference(ReferenceEnsemble& ens, double T);

// Lagged replay of a finished reference: at step n it exposes exactly the histories the reference
// itself saw during step n, so a tracer started on a reference characteristic reproduces it.
class ReferenceView : public ForceProvider {
 public:
  explicit ReferenceView(const ReferenceEnsemble& ens);
  void begin_step(int n) override;
  void after_stage1(int n, const std::vector<Vec3>& K1) override;
  void forces(double t, const std::vector<Vec3>& x, const std::vector<Vec3>& xi,
              std::vector<Vec3>& F) const override;

 private:
  const ReferenceEnsemble& ens_;
  std::vector<TrajectoryHistory> view_;
};

struct MeanFieldFlow {
  std::vector<TrajectoryHistory> tracers;
  TrajectorySet trajectories() const { return vlamax::trajectories(tracers); }
};

// integrate tracers from Z through the frozen reference up to T (reference must cover T)
MeanFieldFlow track_flow(const ReferenceEnsemble& ens, const std::vector<PhaseState>& Z, double T);

}  // namespace vlamax
