#include "specdec/engine.hpp"

#include <chrono>
#include <fstream>

#include "specdec/errors.hpp"

namespace specdec {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void finalize_totals(RunTrace& trace, const CostModel& cost) {
  TraceTotals& t = trace.totals;
  t.draft_calls = 0;
  t.target_calls = 0;
  t.verifier_calls = 0;
  for (const StepRecord& s : trace.steps) {
    t.draft_calls += s.draft_calls;
    t.target_calls += s.target_calls;
    t.verifier_calls += s.verifier_calls;
  }
  t.simulated_time = static_cast<double>(t.draft_calls) * cost.t_d +
                     static_cast<double>(t.target_rounds) * cost.t_t +
                     static_cast<double>(t.verifier_calls) * cost.t_v;
  t.flops = static_cast<double>(t.draft_calls) * cost.f_d +
            static_cast<double>(t.target_calls) * cost.f_t +
            static_cast<double>(t.verifier_calls) * cost.f_v;
}

void check_shared_vocab(const LanguageModel& draft, const LanguageModel& target) {
  if (draft.vocab_size() != target.vocab_size())
    throw VocabMismatchError("draft and target disagree on vocab size");
}

}  // namespace

const char* to_string(TokenSource source) {
  switch (source) {
    case TokenSource::draft_accepted: return "draft-accepted";
    case TokenSource::target_kept: return "target-kept";
    case TokenSource::target_resampled: return "target-resampled";
  }
  return "unknown";
}

std::vector<TokenId> RunTrace::tokens() const {
  std::vector<TokenId> out;
  out.reserve(steps.size());
  for (const StepRecord& s : steps) out.push_back(s.token);
  return out;
}

std::uint64_t RunTrace::count_source(TokenSource source) const {
  std::uint64_t n = 0;
  for (const StepRecord& s : steps)
    if (s.source == source) ++n;
  return n;
}

RunTrace run_sprinter(const LanguageModel& draft, const LanguageModel& target,
                      const EngineVerifier& verifier, std::span<const TokenId> prefix,
                      std::size_t max_new_tokens, double tau, const CostModel& cost,
                      RngStream& rng) {
  check_shared_vocab(draft, target);
  if (max_new_tokens == 0) throw Error("max_new_tokens must be >= 1");
  const auto* logistic = std::get_if<const LogisticVerifier*>(&verifier);
  if (logistic && !(tau > 0.0 && tau < 1.0)) throw InvalidTauError(tau);

  const auto start = Clock::now();
  RunTrace trace;
  trace.steps.reserve(max_new_tokens);
  std::vector<TokenId> ctx(prefix.begin(), prefix.end());

  while (trace.steps.size() < max_new_tokens) {
    const CategoricalDist q_dist = draft.next_dist(ctx);
    const TokenId x = sample(q_dist, rng);

    StepRecord step;
    step.draft_calls = 1;
    step.verifier_calls = 1;
    step.q_x = q_dist[x];

    bool accepted = false;
    bool have_peek = false;
    CategoricalDist p_peek = CategoricalDist::uniform(1);
    if (logistic) {
      step.verifier_score = (*logistic)->score(featurize(q_dist, x, ctx.size()));
      accepted = step.verifier_score > tau;
    } else {
      // Oracle mode: the ground-truth label needs p(x); this omniscient peek
      // is the i.i.d.-verifier modeling assumption and is not charged.
      const auto& spec = std::get<OracleVerifierSpec>(verifier);
      p_peek = target.next_dist(ctx);
      have_peek = true;
      const int label = ground_truth_label(q_dist[x], p_peek[x], spec.lambda);
      accepted = oracle_decide(label, spec.quality, rng) == 1;
    }

    const StepOutcome outcome = resolve_draft_token(
        q_dist, x, accepted,
        [&]() -> const CategoricalDist& {
          if (!have_peek) {
            p_peek = target.next_dist(ctx);
            have_peek = true;
          }
          return p_peek;
        },
        rng);

    step.token = outcome.token;
    step.source = outcome.source;
    if (outcome.target_called) {
      step.target_calls = 1;
      step.p_x = outcome.p_x;
      trace.totals.target_rounds += 1;
    }
    trace.steps.push_back(step);
    ctx.push_back(outcome.token);
  }

  trace.truncated_mid_draft =
      !trace.steps.empty() && trace.steps.back().source == TokenSource::draft_accepted;
  finalize_totals(trace, cost);
  trace.wall_time_seconds = seconds_since(start);
  return trace;
}

RunTrace run_sd(const LanguageModel& draft, const LanguageModel& target,
                std::span<const TokenId> prefix, std::size_t gamma, std::size_t max_new_tokens,
                const CostModel& cost, RngStream& rng) {
  check_shared_vocab(draft, target);
  if (gamma == 0) throw Error("gamma must be >= 1");
  if (max_new_tokens == 0) throw Error("max_new_tokens must be >= 1");

  const auto start = Clock::now();
  RunTrace trace;
  trace.steps.reserve(max_new_tokens + gamma);
  std::vector<TokenId> ctx(prefix.begin(), prefix.end());

  // Rounds start while the budget is unmet; each round runs to its natural
  // end (first rejection or bonus), so the final round may overshoot the
  // budget by up to gamma tokens. Truncating mid-round would detach the
  // round's parallel-verification charge from any emittable step.
  while (trace.steps.size() < max_new_tokens) {
    std::vector<CategoricalDist> q_dists;
    std::vector<TokenId> proposals;
    q_dists.reserve(gamma);
    proposals.reserve(gamma);
    for (std::size_t i = 0; i < gamma; ++i) {
      q_dists.push_back(draft.next_dist(ctx));
      proposals.push_back(sample(q_dists.back(), rng));
      ctx.push_back(proposals.back());
    }
    ctx.resize(ctx.size() - gamma);

    // One parallel target pass: gamma invocations of FLOPs, one round of
    // latency.
    trace.totals.target_rounds += 1;
    std::size_t accepted = 0;
    StepRecord closing;
    bool rejected = false;
    for (std::size_t i = 0; i < gamma; ++i) {
      const CategoricalDist p_dist = target.next_dist(ctx);
      const TokenId x = proposals[i];
      const double q_x = q_dists[i][x];
      const double p_x = p_dist[x];
      if (rng.next_double() * q_x < p_x) {  // accept with probability min(1, p/q)
        StepRecord step;
        step.token = x;
        step.source = TokenSource::draft_accepted;
        step.q_x = q_x;
        step.p_x = p_x;
        step.draft_calls = 1;
        trace.steps.push_back(step);
        ctx.push_back(x);
        ++accepted;
      } else {
        const TokenId corrected = sample_residual(p_dist, q_dists[i], rng);
        closing.token = corrected;
        closing.source = TokenSource::target_resampled;
        closing.q_x = q_dists[i][corrected];
        closing.p_x = p_dist[corrected];
        rejected = true;
        break;
      }
    }

    if (!rejected) {
      // Fully accepted round earns one bonus token from the target.
      const CategoricalDist bonus_dist = target.next_dist(ctx);
      const TokenId bonus = sample(bonus_dist, rng);
      closing.token = bonus;
      closing.source = TokenSource::target_resampled;
      closing.p_x = bonus_dist[bonus];
    }

    // The closing step carries the round's unemitted draft work plus the
    // whole parallel verification charge.
    closing.draft_calls = static_cast<std::uint32_t>(gamma - accepted);
    closing.target_calls = static_cast<std::uint32_t>(gamma);
    trace.steps.push_back(closing);
    ctx.push_back(closing.token);
  }

  finalize_totals(trace, cost);
  trace.wall_time_seconds = seconds_since(start);
  return trace;
}

RunTrace run_target_only(const LanguageModel& target, std::span<const TokenId> prefix,
                         std::size_t max_new_tokens, const CostModel& cost, RngStream& rng) {
  const auto start = Clock::now();
  RunTrace trace;
  trace.steps.reserve(max_new_tokens);
  std::vector<TokenId> ctx(prefix.begin(), prefix.end());
  for (std::size_t i = 0; i < max_new_tokens; ++i) {
    const CategoricalDist p_dist = target.next_dist(ctx);
    const TokenId x = sample(p_dist, rng);
    StepRecord step;
    step.token = x;
    step.source = TokenSource::target_resampled;
    step.p_x = p_dist[x];
    step.target_calls = 1;
    trace.steps.push_back(step);
    trace.totals.target_rounds += 1;
    ctx.push_back(x);
  }
  finalize_totals(trace, cost);
  trace.wall_time_seconds = seconds_since(start);
  return trace;
}

namespace {

nlohmann::json nan_to_null(double v) {
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

std::string trace_to_jsonl(const RunTrace& trace) {
  std::string out;
  std::size_t index = 0;
  for (const StepRecord& s : trace.steps) {
    nlohmann::json line{{"type", "step"},
                        {"i", index++},
                        {"token", s.token},
                        {"source", to_string(s.source)},
                        {"q_x", nan_to_null(s.q_x)},
                        {"p_x", nan_to_null(s.p_x)},
                        {"verifier_score", nan_to_null(s.verifier_score)},
                        {"draft_calls", s.draft_calls},
                        {"target_calls", s.target_calls},
                        {"verifier_calls", s.verifier_calls}};
    out += line.dump();
    out += '\n';
  }
  nlohmann::json totals{{"type", "totals"},
                        {"schema", "specdec.trace.v1"},
                        {"draft_calls", trace.totals.draft_calls},
                        {"target_calls", trace.totals.target_calls},
                        {"verifier_calls", trace.totals.verifier_calls},
                        {"target_rounds", trace.totals.target_rounds},
                        {"simulated_time", trace.totals.simulated_time},
                        {"flops", trace.totals.flops},
                        {"truncated_mid_draft", trace.truncated_mid_draft},
                        {"config", trace.config.is_null() ? nlohmann::json::object() : trace.config}};
  out += totals.dump();
  out += '\n';
  return out;
}

void write_trace_jsonl(const RunTrace& trace, const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path);
  file << trace_to_jsonl(trace);
  if (!file) throw IoError("write failed: " + path);
}

}  // namespace specdec
