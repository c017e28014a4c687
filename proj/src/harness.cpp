#include "specdec/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "specdec/errors.hpp"

namespace specdec {

RScenarioStats simulate_r_scenario(const ScenarioParams& params, std::uint64_t trials,
                                   RngStream& rng) {
  if (trials == 0) throw Error("trials must be >= 1");
  if (params.eta_fp >= 1.0) throw DivergentError("eta_fp = 1 never stops past token r");

  RScenarioStats stats;
  stats.trials = trials;
  double sum_n = 0.0;
  double sumsq_n = 0.0;
  std::vector<std::uint64_t> counts;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::uint64_t n = 0;
    while (rng.bernoulli(n < params.r ? params.eta_tp : params.eta_fp)) ++n;
    sum_n += static_cast<double>(n);
    sumsq_n += static_cast<double>(n) * static_cast<double>(n);
    if (n >= counts.size()) counts.resize(n + 1, 0);
    counts[n] += 1;
  }
  const double nt = static_cast<double>(trials);
  stats.mean_tokens = sum_n / nt;
  const double var =
      trials > 1 ? std::max(0.0, (sumsq_n - nt * stats.mean_tokens * stats.mean_tokens) / (nt - 1))
                 : 0.0;
  stats.se_tokens = std::sqrt(var / nt);
  stats.mean_stop_time = (stats.mean_tokens + 1.0) * params.t_d;
  stats.se_stop_time = stats.se_tokens * params.t_d;
  stats.histogram.resize(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    stats.histogram[i] = static_cast<double>(counts[i]) / nt;
  return stats;
}

double histogram_pmf_tv(const std::vector<double>& histogram, const ScenarioParams& params) {
  double tv = 0.0;
  double theory_mass = 0.0;
  for (std::size_t i = 0; i < histogram.size(); ++i) {
    const double pmf = token_count_pmf(params, i);
    tv += std::fabs(histogram[i] - pmf);
    theory_mass += pmf;
  }
  tv += std::max(0.0, 1.0 - theory_mass);  // theory tail beyond the observed support
  return 0.5 * tv;
}

TokenDistValidation validate_token_distribution(const CategoricalDist& p,
                                                const CategoricalDist& q, double eta_fp,
                                                std::uint64_t samples, RngStream& rng,
                                                double eta_tp) {
  if (p.vocab_size() != q.vocab_size())
    throw VocabMismatchError("validation requires equal vocab sizes");
  if (samples == 0) throw Error("samples must be >= 1");

  const std::uint32_t v = q.vocab_size();
  std::vector<int> acceptable(v);
  for (std::uint32_t i = 0; i < v; ++i) acceptable[i] = ground_truth_label(q[i], p[i], 1.0);
  const VerifierQuality quality{eta_tp, eta_fp};

  std::vector<std::uint64_t> counts(v, 0);
  for (std::uint64_t s = 0; s < samples; ++s) {
    const TokenId x = sample(q, rng);
    const bool accepted = oracle_decide(acceptable[x], quality, rng) == 1;
    const StepOutcome outcome = resolve_draft_token(
        q, x, accepted, [&]() -> const CategoricalDist& { return p; }, rng);
    counts[outcome.token] += 1;
  }

  TokenDistValidation result;
  result.empirical.resize(v);
  for (std::uint32_t i = 0; i < v; ++i)
    result.empirical[i] = static_cast<double>(counts[i]) / static_cast<double>(samples);
  const CategoricalDist empirical(result.empirical);
  result.tv_to_theory = tv_distance(empirical, sprinter_mixture(p, q, eta_fp));
  result.tv_to_target = tv_distance(empirical, p);
  return result;
}

AcceptanceRateValidation validate_acceptance_rate(const CategoricalDist& p,
                                                  const CategoricalDist& q, double eta_fp,
                                                  std::uint64_t samples, RngStream& rng) {
  if (p.vocab_size() != q.vocab_size())
    throw VocabMismatchError("validation requires equal vocab sizes");
  if (samples == 0) throw Error("samples must be >= 1");

  const std::uint32_t v = q.vocab_size();
  std::vector<int> acceptable(v);
  for (std::uint32_t i = 0; i < v; ++i) acceptable[i] = ground_truth_label(q[i], p[i], 1.0);
  const VerifierQuality quality{0.7, eta_fp};  // eta_tp does not affect the keep rate

  std::uint64_t kept = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    const TokenId x = sample(q, rng);
    if (oracle_decide(acceptable[x], quality, rng) == 1) {
      ++kept;
    } else if (rng.next_double() * q[x] < p[x]) {  // target keeps with min(1, p/q)
      ++kept;
    }
  }
  AcceptanceRateValidation result;
  result.beta_empirical = static_cast<double>(kept) / static_cast<double>(samples);
  result.beta_theory = acceptance_rate_sprinter(p, q, eta_fp);
  return result;
}

std::vector<std::pair<CategoricalDist, CategoricalDist>> random_dist_battery(
    const std::vector<std::uint32_t>& vocab_sizes, std::size_t pairs_per_vocab,
    std::uint64_t seed) {
  RngStream rng(seed, 0x6a77e7);
  std::vector<std::pair<CategoricalDist, CategoricalDist>> battery;
  battery.reserve(vocab_sizes.size() * pairs_per_vocab);
  auto draw = [&](std::uint32_t v) {
    std::vector<double> w(v);
    for (auto& x : w) x = -std::log(1.0 - rng.next_double());  // Exp(1)
    return normalize(w);
  };
  for (const std::uint32_t v : vocab_sizes) {
    for (std::size_t i = 0; i < pairs_per_vocab; ++i) battery.emplace_back(draw(v), draw(v));
  }
  return battery;
}

std::vector<TheoryCurveRow> sweep_theory_curves(std::uint32_t r, double t_d,
                                                const std::vector<double>& eta_fp_list,
                                                const std::vector<double>& eta_tp_grid,
                                                std::uint64_t trials, RngStream& rng) {
  if (eta_fp_list.empty() || eta_tp_grid.empty()) throw Error("grids must be non-empty");
  std::vector<TheoryCurveRow> rows;
  rows.reserve(eta_fp_list.size() * eta_tp_grid.size());
  std::uint64_t point = 0;
  for (const double eta_fp : eta_fp_list) {
    for (const double eta_tp : eta_tp_grid) {
      const ScenarioParams params{eta_tp, eta_fp, r, t_d};
      RngStream point_rng = rng.derive(point++);
      const RScenarioStats stats = simulate_r_scenario(params, trials, point_rng);
      TheoryCurveRow row;
      row.eta_tp = eta_tp;
      row.eta_fp = eta_fp;
      row.r = r;
      row.expected_tokens_theory = expected_tokens(params);
      row.expected_tokens_sim = stats.mean_tokens;
      row.expected_tokens_se = stats.se_tokens;
      row.stop_time_theory = expected_stop_time(params);
      row.stop_time_sim = stats.mean_stop_time;
      row.stop_time_se = stats.se_stop_time;
      row.histogram_tv = histogram_pmf_tv(stats.histogram, params);
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::string csv_num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

// Acklam's rational approximation to the standard normal quantile; absolute
// error below 1.2e-9, far tighter than these thresholds need.
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  const double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double familywise_sigma(std::size_t comparisons) {
  if (comparisons <= 1) return 3.0;
  const double alpha_family = 0.0026997960632601866;  // 2 * (1 - Phi(3))
  const double alpha_point = 1.0 - std::pow(1.0 - alpha_family, 1.0 / static_cast<double>(comparisons));
  return normal_quantile(1.0 - alpha_point / 2.0);
}

void write_curves_csv(const std::vector<TheoryCurveRow>& rows, const nlohmann::json& config,
                      const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path);
  file << "# config: " << config.dump() << "\n";
  file << "eta_tp,eta_fp,r,expected_tokens_theory,expected_tokens_sim,expected_tokens_se,"
          "stop_time_theory,stop_time_sim,stop_time_se,histogram_tv\n";
  for (const auto& row : rows) {
    file << csv_num(row.eta_tp) << ',' << csv_num(row.eta_fp) << ',' << row.r << ','
         << csv_num(row.expected_tokens_theory) << ',' << csv_num(row.expected_tokens_sim) << ','
         << csv_num(row.expected_tokens_se) << ',' << csv_num(row.stop_time_theory) << ','
         << csv_num(row.stop_time_sim) << ',' << csv_num(row.stop_time_se) << ','
         << csv_num(row.histogram_tv) << '\n';
  }
  if (!file) throw IoError("write failed: " + path);
}

namespace {

std::vector<TokenId> trimmed_tokens(const RunTrace& trace, std::size_t max_tokens) {
  std::vector<TokenId> tokens = trace.tokens();
  if (tokens.size() > max_tokens) tokens.resize(max_tokens);
  return tokens;
}

struct MethodAggregate {
  std::vector<double> time_per_token;
  double total_time = 0.0;
  double total_flops = 0.0;
  std::uint64_t total_tokens = 0;
  std::uint64_t accepted = 0;
  std::uint64_t rounds = 0;
  double rouge_acc[3][3] = {};  // [variant][precision, recall, f1]
  double perplexity_sum = 0.0;

  void add_trace(const RunTrace& trace, std::uint64_t method_rounds) {
    time_per_token.push_back(trace.totals.simulated_time /
                             static_cast<double>(trace.steps.size()));
    total_time += trace.totals.simulated_time;
    total_flops += trace.totals.flops;
    total_tokens += trace.steps.size();
    // Draft-sampled tokens that ended up in the output: verifier-accepted ones
    // plus rejected-then-kept ones (the min(1, p/q) path).
    accepted += trace.count_source(TokenSource::draft_accepted) +
                trace.count_source(TokenSource::target_kept);
    rounds += method_rounds;
  }

  void add_quality(std::span<const TokenId> candidate, std::span<const TokenId> reference,
                   double ppl) {
    const RougeVariant variants[] = {RougeVariant::rouge1, RougeVariant::rouge2,
                                     RougeVariant::rougeL};
    for (int k = 0; k < 3; ++k) {
      const RougeScore s = rouge(candidate, reference, variants[k]);
      rouge_acc[k][0] += s.precision;
      rouge_acc[k][1] += s.recall;
      rouge_acc[k][2] += s.f1;
    }
    perplexity_sum += ppl;
  }

  BenchRow finish(const std::string& method, std::size_t n_prompts) const {
    BenchRow row;
    row.method = method;
    row.avg_accepted_per_round =
        rounds > 0 ? static_cast<double>(accepted) / static_cast<double>(rounds) : 0.0;
    const double n = static_cast<double>(n_prompts);
    double mean = 0.0;
    for (double t : time_per_token) mean += t;
    mean /= n;
    double var = 0.0;
    for (double t : time_per_token) var += (t - mean) * (t - mean);
    row.time_per_token_mean = mean;
    row.time_per_token_std = n_prompts > 1 ? std::sqrt(var / (n - 1)) : 0.0;
    row.total_flops = total_flops;
    row.total_simulated_time = total_time;
    row.tokens_emitted = total_tokens;
    auto mean_rouge = [&](int k) {
      return RougeScore{rouge_acc[k][0] / n, rouge_acc[k][1] / n, rouge_acc[k][2] / n};
    };
    row.rouge1 = mean_rouge(0);
    row.rouge2 = mean_rouge(1);
    row.rougeL = mean_rouge(2);
    row.perplexity = perplexity_sum / n;
    return row;
  }
};

std::uint64_t sprinter_rounds(const RunTrace& trace) {
  return trace.totals.target_calls + (trace.truncated_mid_draft ? 1 : 0);
}

// Exact per-position acceptability mass sum_x q(x|ctx) [q(x) <= lambda p(x)]
// replayed along an emitted trajectory.
void accumulate_acceptability(const LanguageModel& draft, const LanguageModel& target,
                              std::span<const TokenId> prompt, const RunTrace& trace,
                              double lambda, std::vector<double>& sums,
                              std::vector<std::uint64_t>& counts) {
  std::vector<TokenId> ctx(prompt.begin(), prompt.end());
  if (sums.size() < trace.steps.size()) {
    sums.resize(trace.steps.size(), 0.0);
    counts.resize(trace.steps.size(), 0);
  }
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const CategoricalDist q = draft.next_dist(ctx);
    const CategoricalDist p = target.next_dist(ctx);
    double mass = 0.0;
    for (std::uint32_t x = 0; x < q.vocab_size(); ++x) {
      if (q[x] > 0.0 && ground_truth_label(q[x], p[x], lambda) == 1) mass += q[x];
    }
    sums[t] += mass;
    counts[t] += 1;
    ctx.push_back(trace.steps[t].token);
  }
}

}  // namespace

BenchReport benchmark(const LanguageModel& draft, const LanguageModel& target,
                      const VerifierConfig& verifier_config,
                      const std::vector<std::vector<TokenId>>& prompts, std::size_t gamma,
                      std::size_t max_new_tokens, const CostModel& cost, RngStream& rng) {
  if (prompts.empty()) throw Error("benchmark needs at least one prompt");
  if (max_new_tokens == 0) throw Error("max_new_tokens must be >= 1");

  MethodAggregate sd_agg;
  MethodAggregate sprinter_agg;
  MethodAggregate target_agg;
  std::vector<double> accept_sums;
  std::vector<std::uint64_t> accept_counts;
  const auto* oracle = std::get_if<OracleVerifierSpec>(&verifier_config.verifier);
  const auto* logistic = std::get_if<const LogisticVerifier*>(&verifier_config.verifier);
  const double profile_lambda =
      oracle ? oracle->lambda : (logistic ? (*logistic)->lambda_train() : 1.0);

  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto& prompt = prompts[i];
    RngStream target_rng = rng.derive(3 * i);
    RngStream sd_rng = rng.derive(3 * i + 1);
    RngStream sprinter_rng = rng.derive(3 * i + 2);

    const RunTrace ref_trace = run_target_only(target, prompt, max_new_tokens, cost, target_rng);
    const RunTrace sd_trace = run_sd(draft, target, prompt, gamma, max_new_tokens, cost, sd_rng);
    const RunTrace sprinter_trace =
        run_sprinter(draft, target, verifier_config.verifier, prompt, max_new_tokens,
                     verifier_config.tau, cost, sprinter_rng);

    target_agg.add_trace(ref_trace, ref_trace.totals.target_rounds);
    sd_agg.add_trace(sd_trace, sd_trace.totals.target_rounds);
    sprinter_agg.add_trace(sprinter_trace, sprinter_rounds(sprinter_trace));
    accumulate_acceptability(draft, target, prompt, sprinter_trace, profile_lambda,
                             accept_sums, accept_counts);

    const std::vector<TokenId> reference = trimmed_tokens(ref_trace, max_new_tokens);
    const std::vector<TokenId> sd_tokens = trimmed_tokens(sd_trace, max_new_tokens);
    const std::vector<TokenId> sprinter_tokens = trimmed_tokens(sprinter_trace, max_new_tokens);

    target_agg.add_quality(reference, reference, perplexity(target, prompt, reference));
    sd_agg.add_quality(sd_tokens, reference, perplexity(target, prompt, sd_tokens));
    sprinter_agg.add_quality(sprinter_tokens, reference,
                             perplexity(target, prompt, sprinter_tokens));
  }

  BenchReport report;
  report.rows.push_back(sd_agg.finish("sd", prompts.size()));
  report.rows.push_back(sprinter_agg.finish("sprinter", prompts.size()));
  report.rows.push_back(target_agg.finish("target", prompts.size()));
  report.acceptability_profile.resize(accept_sums.size());
  for (std::size_t t = 0; t < accept_sums.size(); ++t)
    report.acceptability_profile[t] = accept_sums[t] / static_cast<double>(accept_counts[t]);

  const double sd_tpt = sd_agg.total_time / static_cast<double>(sd_agg.total_tokens);
  for (auto& row : report.rows) {
    const MethodAggregate& agg = row.method == "sd"         ? sd_agg
                                 : row.method == "sprinter" ? sprinter_agg
                                                            : target_agg;
    const double tpt = agg.total_time / static_cast<double>(agg.total_tokens);
    row.speedup = sd_tpt / tpt;
  }
  return report;
}

namespace {

nlohmann::json rouge_json(const RougeScore& s) {
  return nlohmann::json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1}};
}

}  // namespace

nlohmann::json BenchReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    rows_json.push_back(nlohmann::json{{"method", row.method},
                                       {"avg_accepted_per_round", row.avg_accepted_per_round},
                                       {"time_per_token_mean", row.time_per_token_mean},
                                       {"time_per_token_std", row.time_per_token_std},
                                       {"speedup", row.speedup},
                                       {"total_flops", row.total_flops},
                                       {"total_simulated_time", row.total_simulated_time},
                                       {"tokens_emitted", row.tokens_emitted},
                                       {"rouge1", rouge_json(row.rouge1)},
                                       {"rouge2", rouge_json(row.rouge2)},
                                       {"rougeL", rouge_json(row.rougeL)},
                                       {"perplexity", row.perplexity}});
  }
  return nlohmann::json{{"schema", "specdec.bench.v1"},
                        {"config", config.is_null() ? nlohmann::json::object() : config},
                        {"rows", rows_json},
                        {"acceptability_profile", acceptability_profile}};
}

std::string BenchReport::to_csv() const {
  std::string out = "# config: " + (config.is_null() ? "{}" : config.dump()) + "\n";
  out +=
      "method,avg_accepted_per_round,time_per_token_mean,time_per_token_std,speedup,total_flops,"
      "total_simulated_time,tokens_emitted,rouge1_f1,rouge2_f1,rougeL_f1,perplexity\n";
  for (const auto& row : rows) {
    out += row.method + ',' + csv_num(row.avg_accepted_per_round) + ',' +
           csv_num(row.time_per_token_mean) + ',' + csv_num(row.time_per_token_std) + ',' +
           csv_num(row.speedup) + ',' + csv_num(row.total_flops) + ',' +
           csv_num(row.total_simulated_time) + ',' + std::to_string(row.tokens_emitted) + ',' + csv_num(row.rouge1.f1) + ',' +
           csv_num(row.rouge2.f1) + ',' + csv_num(row.rougeL.f1) + ',' +
           csv_num(row.perplexity) + '\n';
  }
  return out;
}

}  // namespace specdec
