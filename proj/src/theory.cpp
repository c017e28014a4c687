#include "specdec/theory.hpp"

#include <cmath>

#include "specdec/errors.hpp"

namespace specdec {

namespace {

void check_rates(const ScenarioParams& params) {
  if (!(params.eta_tp >= 0.0 && params.eta_tp <= 1.0))
    throw Error("eta_tp must lie in [0,1]");
  if (!(params.eta_fp >= 0.0 && params.eta_fp <= 1.0))
    throw Error("eta_fp must lie in [0,1]");
  if (params.r == 0) throw Error("r must be >= 1");
}

}  // namespace

double token_count_pmf(const ScenarioParams& params, std::uint64_t i) {
  check_rates(params);
  const double tp = params.eta_tp;
  const double fp = params.eta_fp;
  if (i < params.r) return std::pow(tp, static_cast<double>(i)) * (1.0 - tp);
  return std::pow(tp, static_cast<double>(params.r)) *
         std::pow(fp, static_cast<double>(i - params.r)) * (1.0 - fp);
}

double expected_tokens(const ScenarioParams& params) {
  check_rates(params);
  const double tp = params.eta_tp;
  const double fp = params.eta_fp;
  if (fp >= 1.0) throw DivergentError("eta_fp = 1 never stops past token r");
  const double tp_r = std::pow(tp, static_cast<double>(params.r));
  if (tp >= 1.0) return static_cast<double>(params.r) - 1.0 + 1.0 / (1.0 - fp);
  return (tp - tp_r) / (1.0 - tp) + tp_r / (1.0 - fp);
}

double expected_stop_time(const ScenarioParams& params) {
  check_rates(params);
  const double tp = params.eta_tp;
  const double fp = params.eta_fp;
  if (fp >= 1.0) throw DivergentError("eta_fp = 1 never stops past token r");
  const double tp_r = std::pow(tp, static_cast<double>(params.r));
  if (tp >= 1.0) return params.t_d * static_cast<double>(params.r) + params.t_d / (1.0 - fp);
  return (1.0 - tp_r) * params.t_d / (1.0 - tp) + tp_r * params.t_d / (1.0 - fp);
}

double acceptance_rate_sd(const CategoricalDist& p, const CategoricalDist& q) {
  return 1.0 - tv_distance(p, q);
}

double acceptance_rate_sprinter(const CategoricalDist& p, const CategoricalDist& q,
                                double eta_fp) {
  if (!(eta_fp >= 0.0 && eta_fp <= 1.0)) throw Error("eta_fp must lie in [0,1]");
  return 1.0 - (1.0 - eta_fp) * tv_distance(p, q);
}

double flops_sd(std::uint32_t gamma, const CostModel& cost) {
  if (gamma == 0) throw Error("gamma must be >= 1");
  return gamma * cost.f_d + gamma * cost.f_t;
}

double flops_sprinter(std::uint32_t gamma, const CostModel& cost) {
  if (gamma == 0) throw Error("gamma must be >= 1");
  return gamma * cost.f_d + gamma * cost.f_v + cost.f_t;
}

double flops_savings(std::uint32_t gamma, const CostModel& cost) {
  return flops_sd(gamma, cost) - flops_sprinter(gamma, cost);
}

CategoricalDist sprinter_token_dist(const CategoricalDist& p, const CategoricalDist& q,
                                    double eta_fp) {
  return sprinter_mixture(p, q, eta_fp);
}

}  // namespace specdec
