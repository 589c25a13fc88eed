#pragma once
// Decomposed retarded fields of smoothed charges: E = E0 + E0' + E1 + E2, likewise B.

#include <memory>
#include <string>
#include <vector>

#include "vlamax/form_factor.hpp"
#include "vlamax/history.hpp"
#include "vlamax/kernel_table.hpp"
#include "vlamax/kernels.hpp"

namespace vlamax {

enum class FieldMode { Exact, Tabulated };

FieldMode parse_field_mode(const std::string& s);

struct FieldBreakdown {
  Vec3 E0 = Vec3::Zero(), E0p = Vec3::Zero(), E1 = Vec3::Zero(), E2 = Vec3::Zero();
  Vec3 B0 = Vec3::Zero(), B0p = Vec3::Zero(), B1 = Vec3::Zero(), B2 = Vec3::Zero();
  Vec3 E() const { return ((E0 + E0p) + E1) + E2; }
  Vec3 B() const { return ((B0 + B0p) + B1) + B2; }
  void add(const FieldBreakdown& o, double w);
};

struct FieldOptions {
  FieldMode mode = FieldMode::Tabulated;
  int shock_order = 24;
  // exact mode: direction (polar x azimuth) and radial orders of the cone-restricted quadrature
  int exact_c = 16;
  int exact_phi = 32;
  int exact_rho = 16;
  KernelTableOptions table;
};

// Fields of one unit charge smoothed by the mollifier m, read from its trajectory history.
class FieldEvaluator {
 public:
  FieldEvaluator(const RadialMollifier& m, const FieldOptions& opt);
  FieldBreakdown source(const TrajectoryHistory& h, double t, const Vec3& x) const;
  FieldSample source_total(const TrajectoryHistory& h, double t, const Vec3& x) const;
  const RadialMollifier& mollifier() const { return m_; }
  const FieldOptions& options() const { return opt_; }
  long clamped_speed_count() const { return table_ ? table_->clamped_speed_count() : 0; }

 private:
  FieldBreakdown exact(const TrajectoryHistory& h, double t, const Vec3& x) const;
  FieldBreakdown tabulated(const TrajectoryHistory& h, double t, const Vec3& x) const;
  void initial_terms(const TrajectoryHistory& h, double t, const Vec3& x, FieldBreakdown& f) const;
  RadialMollifier m_;
  FieldOptions opt_;
  std::shared_ptr<const KernelTable> table_;
};

// equal-weight ensemble of sources
struct SourceEnsemble {
  const std::vector<TrajectoryHistory>* hist = nullptr;
  double weight = 1.0;
  int size() const { return hist ? static_cast<int>(hist->size()) : 0; }
};

FieldBreakdown field_total(const SourceEnsemble& ens, const FieldEvaluator& ev, double t, const Vec3& x);
FieldSample field_sample(const SourceEnsemble& ens, const FieldEvaluator& ev, double t, const Vec3& x,
                         int skip = -1);

// component views
std::pair<Vec3, Vec3> field_E1_B1(const SourceEnsemble& ens, const FieldEvaluator& ev, double t, const Vec3& x);
std::pair<Vec3, Vec3> field_E2_B2(const SourceEnsemble& ens, const FieldEvaluator& ev, double t, const Vec3& x);
std::pair<Vec3, Vec3> field_E0prime_B0prime(const SourceEnsemble& ens, const FieldEvaluator& ev, double t,
                                            const Vec3& x);
Vec3 field_E0(const SourceEnsemble& ens, const FieldEvaluator& ev, double t, const Vec3& x);

// CSV export of a field slice: t,x,y,z, the eight components, totals
void write_field_slice_csv(const std::string& path, const SourceEnsemble& ens, const FieldEvaluator& ev,
                           double t, const std::vector<Vec3>& points);

}  // namespace vlamax
