#pragma once

#include "projflow/discretization.hpp"

#include <vector>

namespace projflow {

/// The five fields carried from one time level to the next.
///
/// At m = 0 the "previous" fields repeat the current ones, matching the
/// convention that every interpolant is constant for t <= 0.
struct State {
  int m = 0;
  double t = 0.0;
  Vector utilde_m;    // intermediate velocity at level m (U_h)
  Vector utilde_mm1;  // ... at level m-1
  YhElement u_m;      // projected velocity at level m (Y_h)
  YhElement u_mm1;
  Vector p_m;  // pressure at level m (P_h, zero mean)
  Vector p_mm1;
};

/// Stored fields of one time level.
struct Snapshot {
  int m = 0;
  double t = 0.0;
  Vector utilde;
  YhElement u;
  Vector p;
};

using Trajectory = std::vector<Snapshot>;

inline Snapshot snapshot_of(const State& s) { return {s.m, s.t, s.utilde_m, s.u_m, s.p_m}; }

}  // namespace projflow
