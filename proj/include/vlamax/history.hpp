#pragma once
// Per-particle trajectory record with retarded-time queries.

#include <optional>
#include <stdexcept>
#include <vector>

#include "vlamax/kinematics.hpp"

namespace vlamax {

struct RetardedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HistoryState {
  Vec3 x, xi, K, v;
};

struct RetardedPoint {
  double t_ret = 0.0;
  Vec3 y, xi, K, v;
  Vec3 n;          // (x - y)/R
  double R = 0.0;  // |x - y| = t - t_ret
  bool moving = true;  // false: static-past branch (t_ret < 0)
};

class TrajectoryHistory {
 public:
  TrajectoryHistory() = default;
  TrajectoryHistory(double dt, const Vec3& x0, const Vec3& xi0, const Vec3& K0 = Vec3::Zero(),
                    bool static_past = true);

  void append(const Vec3& x, const Vec3& xi, const Vec3& K);
  // overwrite the force of the most recent sample
  void set_last_force(const Vec3& K);
  void truncate(int n_samples);

  int size() const { return static_cast<int>(x_.size()); }
  double dt() const { return dt_; }
  double t_end() const { return (size() - 1) * dt_; }
  bool static_past() const { return static_past_; }
  const Vec3& x(int k) const { return x_[k]; }
  const Vec3& xi(int k) const { return xi_[k]; }
  const Vec3& K(int k) const { return K_[k]; }
  const Vec3& v(int k) const { return v_[k]; }

  // state at time s: static past for s < 0, cubic Hermite inside, Taylor extrapolation past t_end
  HistoryState at(double s) const;
  Vec3 position(double s) const;

 private:
  double dt_ = 1.0;
  bool static_past_ = true;
  std::vector<Vec3> x_, xi_, K_, v_;
};

// moving-branch root of |x - y(s)| = t - s with s >= 0; empty when y(0) lies outside B_t(x)
std::optional<RetardedPoint> retarded_time(const TrajectoryHistory& h, double t, const Vec3& x);

// as above, but falls back to the static past (t_ret = t - |x - y(0)| < 0) outside the cone
RetardedPoint retarded_point(const TrajectoryHistory& h, double t, const Vec3& x);

}  // namespace vlamax
