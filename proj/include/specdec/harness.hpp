#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "specdec/cost.hpp"
#include "specdec/dist.hpp"
#include "specdec/engine.hpp"
#include "specdec/rouge.hpp"
#include "specdec/theory.hpp"

namespace specdec {

// --- r-scenario Monte Carlo -------------------------------------------------

struct RScenarioStats {
  double mean_tokens = 0.0;
  double se_tokens = 0.0;  // standard error of the mean
  double mean_stop_time = 0.0;
  double se_stop_time = 0.0;
  std::vector<double> histogram;  // empirical pmf of N, indexed by token count
  std::uint64_t trials = 0;
};

// Simulates the abstract r-scenario directly: an i.i.d. verifier accepts each
// of the first r tokens with probability eta_tp and every later one with
// eta_fp; a trial stops at the first rejection with N accepted tokens and
// stop time (N + 1) * t_d (verifier time treated as negligible).
RScenarioStats simulate_r_scenario(const ScenarioParams& params, std::uint64_t trials,
                                   RngStream& rng);

// TV distance between an empirical histogram of N and the closed-form pmf
// (includes the truncated theory tail).
double histogram_pmf_tv(const std::vector<double>& histogram, const ScenarioParams& params);

// --- single-step token-distribution validation -------------------------------

struct TokenDistValidation {
  std::vector<double> empirical;  // empirical token frequencies
  double tv_to_theory = 0.0;      // TV(empirical, (1-eta_fp) p + eta_fp q)
  double tv_to_target = 0.0;      // TV(empirical, p)
};

// Runs single-token verify-and-correct steps with an exact-quality oracle
// verifier over fixed (p, q) and compares the empirical token distribution
// against the mixture closed form. eta_tp is irrelevant to the single-step
// marginal and defaults to an arbitrary interior value to exercise that.
TokenDistValidation validate_token_distribution(const CategoricalDist& p,
                                                const CategoricalDist& q, double eta_fp,
                                                std::uint64_t samples, RngStream& rng,
                                                double eta_tp = 0.7);

struct AcceptanceRateValidation {
  double beta_empirical = 0.0;
  double beta_theory = 0.0;
};

// Empirical per-draft-token keep rate (verifier accept, or target keep with
// probability min(1, p/q)) against 1 - (1 - eta_fp) d_TV(p, q).
AcceptanceRateValidation validate_acceptance_rate(const CategoricalDist& p,
                                                  const CategoricalDist& q, double eta_fp,
                                                  std::uint64_t samples, RngStream& rng);

// Randomized (p, q) test battery: `pairs_per_vocab` pairs for each vocab size,
// entries drawn Exp(1)-normalized. Deterministic in the seed.
std::vector<std::pair<CategoricalDist, CategoricalDist>> random_dist_battery(
    const std::vector<std::uint32_t>& vocab_sizes, std::size_t pairs_per_vocab,
    std::uint64_t seed);

// --- theory curves ------------------------------------------------------------

struct TheoryCurveRow {
  double eta_tp = 0.0;
  double eta_fp = 0.0;
  std::uint32_t r = 0;
  double expected_tokens_theory = 0.0;
  double expected_tokens_sim = 0.0;
  double expected_tokens_se = 0.0;
  double stop_time_theory = 0.0;
  double stop_time_sim = 0.0;
  double stop_time_se = 0.0;
  double histogram_tv = 0.0;
};

// One row per (eta_tp, eta_fp) grid point at the given r: closed forms next
// to Monte Carlo estimates from simulate_r_scenario.
std::vector<TheoryCurveRow> sweep_theory_curves(std::uint32_t r, double t_d,
                                                const std::vector<double>& eta_fp_list,
                                                const std::vector<double>& eta_tp_grid,
                                                std::uint64_t trials, RngStream& rng);

// Per-point sigma threshold such that `comparisons` simultaneous checks have
// the same family-wise false-alarm rate as a single 3-sigma test (0.27%).
// Reduces to 3.0 for one comparison.
double familywise_sigma(std::size_t comparisons);

void write_curves_csv(const std::vector<TheoryCurveRow>& rows, const nlohmann::json& config,
                      const std::string& path);

// --- benchmark ----------------------------------------------------------------

struct VerifierConfig {
  EngineVerifier verifier;
  double tau = 0.5;
};

struct BenchRow {
  std::string method;
  // Draft-sampled tokens kept in the output (verifier-accepted or kept via the
  // min(1, p/q) test) per target round.
  double avg_accepted_per_round = 0.0;
  double time_per_token_mean = 0.0;     // simulated units, per prompt
  double time_per_token_std = 0.0;
  double speedup = 1.0;  // vs the SD row
  double total_flops = 0.0;
  double total_simulated_time = 0.0;  // speedups are recomputable from these
  RougeScore rouge1, rouge2, rougeL;  // vs target-only reference completions
  double perplexity = 0.0;            // of completions under the target
  std::uint64_t tokens_emitted = 0;
};

struct BenchReport {
  nlohmann::json config;
  std::vector<BenchRow> rows;  // sd, sprinter, target — in that order
  // Observational only (real model pairs have no clean "first r acceptable"
  // structure): per-position draft acceptability mass along the emitted
  // sequential-verification trajectories, averaged over prompts.
  std::vector<double> acceptability_profile;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Runs run_sd / run_sprinter / run_target_only over the prompts and
// aggregates Table-style metrics. The SD row is the speedup baseline.
BenchReport benchmark(const LanguageModel& draft, const LanguageModel& target,
                      const VerifierConfig& verifier_config,
                      const std::vector<std::vector<TokenId>>& prompts, std::size_t gamma,
                      std::size_t max_new_tokens, const CostModel& cost, RngStream& rng);

}  // namespace specdec
