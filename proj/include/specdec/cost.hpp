#pragma once

namespace specdec {

// Injected per-invocation costs standing in for real model runtime:
// t_* are simulated-time units, f_* are FLOPs per invocation, for the
// draft / target / verifier models respectively. t_v <= t_d <= t_t is the
// expected regime but is not enforced.
struct CostModel {
  double t_d = 1.0;
  double t_t = 10.0;
  double t_v = 0.05;
  double f_d = 1.0;
  double f_t = 9.0;
  double f_v = 0.001;
};

}  // namespace specdec
