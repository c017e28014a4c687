#pragma once

#include <cstdint>

#include "specdec/cost.hpp"
#include "specdec/dist.hpp"

namespace specdec {

// The r-scenario: the draft can produce exactly r consecutive acceptable
// tokens, every later one is unacceptable, and the verifier decides i.i.d.
// with rates (eta_tp, eta_fp). t_d is the per-draft-step time unit used by
// the stopping-time formula.
struct ScenarioParams {
  double eta_tp = 0.9;
  double eta_fp = 0.2;
  std::uint32_t r = 5;
  double t_d = 0.1;
};

// P(N = i): eta_tp^i (1 - eta_tp) for i < r, and
// eta_tp^r eta_fp^(i-r) (1 - eta_fp) for i >= r.
double token_count_pmf(const ScenarioParams& params, std::uint64_t i);

// E[N] = (eta_tp - eta_tp^r) / (1 - eta_tp) + eta_tp^r / (1 - eta_fp),
// with the analytic limit (r - 1) + 1 / (1 - eta_fp) at eta_tp = 1.
// Throws DivergentError when eta_fp = 1.
double expected_tokens(const ScenarioParams& params);

// E[T_stop] = (1 - eta_tp^r) t_d / (1 - eta_tp) + eta_tp^r t_d / (1 - eta_fp),
// with the analytic limit r t_d + t_d / (1 - eta_fp) at eta_tp = 1.
// Throws DivergentError when eta_fp = 1.
double expected_stop_time(const ScenarioParams& params);

// beta = 1 - d_TV(p, q): per-token acceptance rate of standard speculative
// decoding.
double acceptance_rate_sd(const CategoricalDist& p, const CategoricalDist& q);

// beta = 1 - (1 - eta_fp) d_TV(p, q); always >= acceptance_rate_sd.
double acceptance_rate_sprinter(const CategoricalDist& p, const CategoricalDist& q, double eta_fp);

// Per-run FLOPs to emit gamma draft tokens:
//   SD:       gamma F_d + gamma F_t
//   SPRINTER: gamma F_d + gamma F_v + F_t
double flops_sd(std::uint32_t gamma, const CostModel& cost);
double flops_sprinter(std::uint32_t gamma, const CostModel& cost);
// flops_sd - flops_sprinter = (gamma - 1) F_t - gamma F_v
double flops_savings(std::uint32_t gamma, const CostModel& cost);

// Token distribution under sequential approximate verification; identical
// contract to sprinter_mixture, re-exported so every closed form lives here.
CategoricalDist sprinter_token_dist(const CategoricalDist& p, const CategoricalDist& q,
                                    double eta_fp);

}  // namespace specdec
