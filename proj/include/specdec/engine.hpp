#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "specdec/cost.hpp"
#include "specdec/dist.hpp"
#include "specdec/lm.hpp"
#include "specdec/rng.hpp"
#include "specdec/verifier.hpp"

namespace specdec {

enum class TokenSource : std::uint8_t { draft_accepted, target_kept, target_resampled };
const char* to_string(TokenSource source);

// One emitted token with the calls it incurred. q_x is the draft probability
// of the emitted token's step; p_x / verifier_score are NaN when the target /
// a trained verifier was not consulted.
struct StepRecord {
  TokenId token = 0;
  TokenSource source = TokenSource::draft_accepted;
  double q_x = std::numeric_limits<double>::quiet_NaN();
  double p_x = std::numeric_limits<double>::quiet_NaN();
  double verifier_score = std::numeric_limits<double>::quiet_NaN();
  std::uint32_t draft_calls = 0;
  std::uint32_t target_calls = 0;
  std::uint32_t verifier_calls = 0;
};

// target_calls counts target invocations (FLOPs-relevant); target_rounds
// counts latency-relevant target passes. They coincide except in standard
// speculative decoding, where one parallel round verifies gamma positions:
// that charges gamma invocations but a single t_t of simulated time.
struct TraceTotals {
  std::uint64_t draft_calls = 0;
  std::uint64_t target_calls = 0;
  std::uint64_t verifier_calls = 0;
  std::uint64_t target_rounds = 0;
  double simulated_time = 0.0;
  double flops = 0.0;
};

struct RunTrace {
  std::vector<StepRecord> steps;
  TraceTotals totals;
  double wall_time_seconds = 0.0;  // console-only; never written to files
  bool truncated_mid_draft = false;
  nlohmann::json config;  // resolved run-config snapshot for provenance

  std::vector<TokenId> tokens() const;
  std::uint64_t count_source(TokenSource source) const;
};

// Oracle verifier configuration: i.i.d. Bernoulli decisions against the
// ground-truth label at threshold lambda, with the stated quality. The
// ground truth peeks at the target distribution without charging a call.
struct OracleVerifierSpec {
  VerifierQuality quality;
  double lambda = 1.0;
};

using EngineVerifier = std::variant<OracleVerifierSpec, const LogisticVerifier*>;

// Outcome of resolving one draft-sampled token against the verifier verdict.
struct StepOutcome {
  TokenId token = 0;
  TokenSource source = TokenSource::draft_accepted;
  double p_x = std::numeric_limits<double>::quiet_NaN();
  bool target_called = false;
};

// Shared verification/correction core used by every SPRINTER path (engine and
// Monte Carlo harness): on verifier accept the draft token stands; on reject
// the target is consulted once, the token is kept with probability
// min(1, p(x)/q(x)) and otherwise replaced by a residual-distribution draw.
template <typename FetchP>
StepOutcome resolve_draft_token(const CategoricalDist& q_dist, TokenId x, bool verifier_accepted,
                                FetchP&& fetch_p, RngStream& rng) {
  if (verifier_accepted)
    return StepOutcome{x, TokenSource::draft_accepted,
                       std::numeric_limits<double>::quiet_NaN(), false};
  const CategoricalDist& p_dist = fetch_p();
  const double p_x = p_dist[x];
  const double q_x = q_dist[x];
  if (rng.next_double() * q_x < p_x)  // keep with probability min(1, p/q)
    return StepOutcome{x, TokenSource::target_kept, p_x, true};
  const TokenId corrected = sample_residual(p_dist, q_dist, rng);
  return StepOutcome{corrected, TokenSource::target_resampled, p_dist[corrected], true};
}

// Sequential approximate verification: draft proposes token by token, the
// verifier screens each one, and the target is invoked exactly once per
// rejection event (for the rejected token only). Generation stops at
// max_new_tokens; a run that ends mid-draft without a rejection is flagged.
RunTrace run_sprinter(const LanguageModel& draft, const LanguageModel& target,
                      const EngineVerifier& verifier, std::span<const TokenId> prefix,
                      std::size_t max_new_tokens, double tau, const CostModel& cost,
                      RngStream& rng);

// Standard speculative decoding with draft window gamma: each round drafts
// gamma tokens, the target verifies them in parallel (gamma invocations, one
// t_t of latency), the first rejection is corrected from the residual
// distribution, and a fully accepted round earns one bonus target token.
// Rounds start while fewer than max_new_tokens steps were emitted and always
// run to their natural end, so the last round may overshoot the budget by up
// to gamma tokens; callers trim when they need an exact count.
RunTrace run_sd(const LanguageModel& draft, const LanguageModel& target,
                std::span<const TokenId> prefix, std::size_t gamma, std::size_t max_new_tokens,
                const CostModel& cost, RngStream& rng);

// Autoregressive reference: every token sampled from the target.
RunTrace run_target_only(const LanguageModel& target, std::span<const TokenId> prefix,
                         std::size_t max_new_tokens, const CostModel& cost, RngStream& rng);

// JSON-lines export: one step record per line plus a trailing totals record
// (schema-versioned, carries the config snapshot). Deterministic bytes.
void write_trace_jsonl(const RunTrace& trace, const std::string& path);
std::string trace_to_jsonl(const RunTrace& trace);

}  // namespace specdec
