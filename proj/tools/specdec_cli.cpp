// Command-line front end: corpus ingestion, model/verifier training, decoding
// runs, theory validation, and benchmarking. Every command is a pure function
// of (config, input files); all randomness flows from --seed and re-runs
// produce byte-identical output files.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "specdec/engine.hpp"
#include "specdec/errors.hpp"
#include "specdec/harness.hpp"
#include "specdec/kernels.hpp"
#include "specdec/lm.hpp"
#include "specdec/theory.hpp"
#include "specdec/vocab.hpp"

namespace {

using nlohmann::json;
using namespace specdec;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void ensure_parent_dir(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
}

void write_text_file(const std::string& path, const std::string& content) {
  ensure_parent_dir(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("write failed: " + path);
}

struct CostFlags {
  CostModel cost;
  void attach(CLI::App* cmd) {
    cmd->add_option("--t-d", cost.t_d, "Simulated time per draft call")->capture_default_str();
    cmd->add_option("--t-t", cost.t_t, "Simulated time per target round")->capture_default_str();
    cmd->add_option("--t-v", cost.t_v, "Simulated time per verifier call")->capture_default_str();
    cmd->add_option("--f-d", cost.f_d, "FLOPs per draft call")->capture_default_str();
    cmd->add_option("--f-t", cost.f_t, "FLOPs per target call")->capture_default_str();
    cmd->add_option("--f-v", cost.f_v, "FLOPs per verifier call")->capture_default_str();
  }
  json to_json() const {
    return json{{"t_d", cost.t_d}, {"t_t", cost.t_t}, {"t_v", cost.t_v},
                {"f_d", cost.f_d}, {"f_t", cost.f_t}, {"f_v", cost.f_v}};
  }
};

// ---------------------------------------------------------------------------
// train-lm
// ---------------------------------------------------------------------------

struct TrainLmArgs {
  std::string corpus;
  std::string mode = "whitespace";
  std::uint32_t k_draft = 1;
  std::uint32_t k_target = 3;
  double alpha = 0.1;
  double holdout = 0.1;
  std::string out_draft = "out/draft.model";
  std::string out_target = "out/target.model";
  std::uint64_t seed = 42;
};

int cmd_train_lm(const TrainLmArgs& args) {
  const json config{{"command", "train-lm"},     {"corpus", args.corpus},
                    {"mode", args.mode},         {"k_draft", args.k_draft},
                    {"k_target", args.k_target}, {"alpha", args.alpha},
                    {"holdout", args.holdout},   {"seed", args.seed}};

  const auto mode = tokenize_mode_from_string(args.mode);
  const Tokenized corpus = tokenize(read_text_file(args.corpus), mode);

  const std::size_t holdout_tokens =
      static_cast<std::size_t>(args.holdout * static_cast<double>(corpus.tokens.size()));
  const std::size_t train_tokens = corpus.tokens.size() - holdout_tokens;
  const std::vector<TokenId> train(corpus.tokens.begin(), corpus.tokens.begin() + train_tokens);
  const std::vector<TokenId> heldout(corpus.tokens.begin() + train_tokens, corpus.tokens.end());

  const NGramModel draft = train_ngram(corpus.vocab, train, args.k_draft, args.alpha);
  const NGramModel target = train_ngram(corpus.vocab, train, args.k_target, args.alpha);
  ensure_parent_dir(args.out_draft);
  ensure_parent_dir(args.out_target);
  save_model(draft, args.out_draft, config.dump());
  save_model(target, args.out_target, config.dump());

  std::cout << "vocab_size " << corpus.vocab.size() << "\n";
  std::cout << "train_tokens " << train_tokens << " holdout_tokens " << holdout_tokens << "\n";
  if (!heldout.empty()) {
    const double ppl_draft = perplexity(draft, heldout);
    const double ppl_target = perplexity(target, heldout);
    std::cout << "draft  k=" << args.k_draft << " holdout_perplexity " << ppl_draft << "\n";
    std::cout << "target k=" << args.k_target << " holdout_perplexity " << ppl_target << "\n";
  }
  std::cout << "wrote " << args.out_draft << " and " << args.out_target << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// train-verifier
// ---------------------------------------------------------------------------

struct TrainVerifierArgs {
  std::string draft_path;
  std::string target_path;
  std::string corpus;
  std::string mode = "whitespace";
  std::vector<double> lambdas;
  double tau = 0.5;
  std::size_t per_category = 2000;
  std::uint32_t epochs = 500;
  double lr = 0.01;
  double holdout = 0.25;
  std::uint64_t seed = 42;
  std::string out_verifier = "out/verifier.model";
  std::string out_roc = "out/roc.csv";
};

std::vector<std::vector<TokenId>> draw_seed_prefixes(const std::vector<TokenId>& tokens,
                                                     std::size_t count, RngStream& rng) {
  std::vector<std::vector<TokenId>> prefixes;
  prefixes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t len = 2 + rng.next_below(10);
    const std::size_t start = rng.next_below(tokens.size() - std::min(len, tokens.size() - 1));
    const std::size_t end = std::min(start + len, tokens.size());
    prefixes.emplace_back(tokens.begin() + start, tokens.begin() + end);
  }
  return prefixes;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const auto dot = path.rfind('.');
  if (dot == std::string::npos || dot == 0) return path + suffix;
  return path.substr(0, dot) + suffix + path.substr(dot);
}

std::string format_lambda(double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", lambda);
  std::string s = buf;
  for (auto& c : s)
    if (c == '.') c = 'p';
  return s;
}

int cmd_train_verifier(const TrainVerifierArgs& args) {
  if (args.lambdas.empty()) throw Error("need at least one --lambda");
  const auto mode = tokenize_mode_from_string(args.mode);
  const NGramModel draft = load_model(args.draft_path);
  const NGramModel target = load_model(args.target_path);
  if (!(draft.vocab() == target.vocab()))
    throw VocabMismatchError("draft and target were trained on different vocabularies");

  const Tokenized corpus = tokenize(read_text_file(args.corpus), mode);
  const bool multi = args.lambdas.size() > 1;

  for (const double lambda : args.lambdas) {
    const json config{{"command", "train-verifier"},
                      {"draft", args.draft_path},
                      {"target", args.target_path},
                      {"corpus", args.corpus},
                      {"mode", args.mode},
                      {"lambda", lambda},
                      {"tau", args.tau},
                      {"per_category", args.per_category},
                      {"epochs", args.epochs},
                      {"lr", args.lr},
                      {"holdout", args.holdout},
                      {"seed", args.seed}};

    RngStream rng(args.seed, 0x7e51f1e5);
    const auto seeds = draw_seed_prefixes(corpus.tokens, 64, rng);
    const auto examples =
        build_training_set(draft, target, seeds, args.per_category, lambda, rng);

    // Deterministic interleaved split: categories stay balanced on both sides.
    std::vector<LabeledExample> train_set;
    std::vector<LabeledExample> heldout;
    const std::size_t holdout_every =
        std::max<std::size_t>(2, static_cast<std::size_t>(1.0 / std::max(args.holdout, 1e-9)));
    for (std::size_t i = 0; i < examples.size(); ++i) {
      (i % holdout_every == 0 ? heldout : train_set).push_back(examples[i]);
    }

    TrainOptions options;
    options.epochs = args.epochs;
    options.lr = args.lr;
    options.tau = args.tau;
    options.lambda = lambda;
    const TrainResult result = train_logistic(train_set, options);

    std::vector<double> scores;
    std::vector<int> labels;
    scores.reserve(heldout.size());
    for (const auto& ex : heldout) {
      scores.push_back(result.verifier.score(ex.features));
      labels.push_back(ex.label);
    }
    const RocCurve curve = roc_curve(scores, labels);
    const VerifierQuality quality = measure_quality(result.verifier, heldout);

    const std::string suffix = multi ? "_lambda" + format_lambda(lambda) : "";
    const std::string verifier_path = with_suffix(args.out_verifier, suffix);
    const std::string roc_path = with_suffix(args.out_roc, suffix);
    ensure_parent_dir(verifier_path);
    save_verifier(result.verifier, verifier_path, config.dump());

    std::ostringstream roc;
    roc << "# config: " << config.dump() << "\n";
    char auc_buf[32];
    std::snprintf(auc_buf, sizeof(auc_buf), "%.10g", curve.auc);
    roc << "# auc: " << auc_buf << "\n";
    roc << "threshold,fpr,tpr\n";
    for (const auto& point : curve.points) {
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", point.threshold, point.fpr,
                    point.tpr);
      roc << buf;
    }
    write_text_file(roc_path, roc.str());

    std::cout << "lambda " << lambda << " train_loss " << result.final_loss << " auc "
              << curve.auc << " eta_tp " << quality.eta_tp << " eta_fp " << quality.eta_fp
              << "\n";
    std::cout << "wrote " << verifier_path << " and " << roc_path << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunArgs {
  std::string mode;  // sprinter | sd | target
  std::string draft_path;
  std::string target_path;
  std::string verifier_path;
  std::optional<double> eta_tp;
  std::optional<double> eta_fp;
  double lambda = 1.0;
  std::string prompt;
  std::string tokenize_mode = "whitespace";
  std::size_t max_new_tokens = 20;
  std::size_t gamma = 4;
  std::optional<double> tau;
  std::uint64_t seed = 42;
  std::string out_trace;
  CostFlags cost;
};

EngineVerifier make_engine_verifier(const RunArgs& args,
                                    std::optional<LogisticVerifier>& storage, double& tau_out) {
  if (args.eta_tp.has_value() || args.eta_fp.has_value()) {
    OracleVerifierSpec spec;
    spec.quality.eta_tp = args.eta_tp.value_or(1.0);
    spec.quality.eta_fp = args.eta_fp.value_or(0.0);
    spec.lambda = args.lambda;
    tau_out = args.tau.value_or(0.5);
    return spec;
  }
  if (args.verifier_path.empty())
    throw Error("sprinter mode needs --verifier or oracle flags (--eta-tp/--eta-fp)");
  storage = load_verifier(args.verifier_path);
  tau_out = args.tau.value_or(storage->tau());
  return EngineVerifier{&*storage};
}

int cmd_run(const RunArgs& args) {
  const auto mode = tokenize_mode_from_string(args.tokenize_mode);
  const NGramModel target = load_model(args.target_path);
  std::optional<NGramModel> draft;
  if (args.mode != "target") {
    if (args.draft_path.empty()) throw Error("--draft is required for mode " + args.mode);
    draft = load_model(args.draft_path);
    if (!(draft->vocab() == target.vocab()))
      throw VocabMismatchError("draft and target were trained on different vocabularies");
  }

  const std::vector<TokenId> prompt_tokens =
      tokenize_with(target.vocab(), args.prompt, mode, /*skip_unknown=*/true);
  if (prompt_tokens.empty() && !args.prompt.empty())
    std::cerr << "warning: no prompt token is in the model vocabulary\n";

  json config{{"command", "run"},

              {"mode", args.mode},
              {"target", args.target_path},
              {"prompt", args.prompt},
              {"max_new_tokens", args.max_new_tokens},
              {"seed", args.seed},
              {"cost", args.cost.to_json()}};
  if (!args.draft_path.empty()) config["draft"] = args.draft_path;

  RngStream rng(args.seed, 0);
  RunTrace trace;
  if (args.mode == "target") {
    trace = run_target_only(target, prompt_tokens, args.max_new_tokens, args.cost.cost, rng);
  } else if (args.mode == "sd") {
    config["gamma"] = args.gamma;
    trace = run_sd(*draft, target, prompt_tokens, args.gamma, args.max_new_tokens,
                   args.cost.cost, rng);
  } else if (args.mode == "sprinter") {
    std::optional<LogisticVerifier> storage;
    double tau = 0.5;
    const EngineVerifier verifier = make_engine_verifier(args, storage, tau);
    config["tau"] = tau;
    if (args.eta_tp.has_value() || args.eta_fp.has_value()) {
      config["eta_tp"] = args.eta_tp.value_or(1.0);
      config["eta_fp"] = args.eta_fp.value_or(0.0);
      config["lambda"] = args.lambda;
    } else {
      config["verifier"] = args.verifier_path;
    }
    trace = run_sprinter(*draft, target, verifier, prompt_tokens, args.max_new_tokens, tau,
                         args.cost.cost, rng);
  } else {
    throw Error("unknown mode: " + args.mode);
  }
  trace.config = config;

  std::vector<TokenId> emitted = trace.tokens();
  if (emitted.size() > args.max_new_tokens) emitted.resize(args.max_new_tokens);
  std::cout << "completion: " << detokenize(target.vocab(), emitted, mode) << "\n";
  std::cout << "tokens " << trace.steps.size() << " draft_calls " << trace.totals.draft_calls
            << " target_calls " << trace.totals.target_calls << " verifier_calls "
            << trace.totals.verifier_calls << " target_rounds " << trace.totals.target_rounds
            << "\n";
  std::cout << "simulated_time " << trace.totals.simulated_time << " flops "
            << trace.totals.flops << " wall_seconds " << trace.wall_time_seconds << "\n";
  std::cout << "draft_accepted " << trace.count_source(TokenSource::draft_accepted)
            << " target_kept " << trace.count_source(TokenSource::target_kept)
            << " target_resampled " << trace.count_source(TokenSource::target_resampled)
            << "\n";
  if (trace.truncated_mid_draft)
    std::cout << "note: budget reached mid-draft without a rejection (trace flagged)\n";

  if (!args.out_trace.empty()) {
    ensure_parent_dir(args.out_trace);
    write_trace_jsonl(trace, args.out_trace);
    std::cout << "wrote " << args.out_trace << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// validate-theory
// ---------------------------------------------------------------------------

struct ValidateArgs {
  std::uint64_t trials = 100'000;
  std::uint64_t samples = 100'000;
  std::vector<std::uint32_t> r_values;
  std::optional<double> eta_fp_override;
  double t_d = 0.1;
  std::size_t pairs_per_vocab = 5;
  std::uint64_t seed = 42;
  std::string out_dir = "out";
};

struct CheckSummary {
  bool ok = true;
  void report(const std::string& name, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
    ok = ok && pass;
  }
};

int cmd_validate_theory(const ValidateArgs& args) {
  const json config{{"command", "validate-theory"},
                    {"trials", args.trials},
                    {"samples", args.samples},
                    {"t_d", args.t_d},
                    {"pairs_per_vocab", args.pairs_per_vocab},
                    {"seed", args.seed}};
  std::filesystem::create_directories(args.out_dir);

  std::vector<double> eta_fp_grid;
  for (int k = 0; k <= 9; ++k) eta_fp_grid.push_back(k / 10.0);
  if (args.eta_fp_override) eta_fp_grid = {*args.eta_fp_override};
  std::vector<double> eta_tp_grid;
  for (int k = 1; k <= 9; ++k) eta_tp_grid.push_back(k / 10.0);
  eta_tp_grid.push_back(1.0);
  std::vector<std::uint32_t> r_values = args.r_values;
  if (r_values.empty()) r_values = {1, 3, 5, 10};

  // Tolerances pinned at the reference sample counts and scaled by 1/sqrt(n),
  // plus a concentration slack for the histogram check (TV fluctuates by
  // about 1/sqrt(2n) around its mean).
  const double tol_tv_1 = 0.01 * std::sqrt(1e6 / static_cast<double>(args.samples));
  const std::size_t grid_points = 100 * (args.r_values.empty() ? 4 : args.r_values.size());
  const double tol_hist = 0.01 * std::sqrt(1e5 / static_cast<double>(args.trials)) +
                          familywise_sigma(grid_points) /
                              std::sqrt(2.0 * static_cast<double>(args.trials));
  const double tol_beta = 0.01 * std::sqrt(1e5 / static_cast<double>(args.samples));

  CheckSummary summary;
  RngStream root(args.seed, 0x7a11da7e);

  // Theorem 1 + Theorem 4: randomized (p, q) battery.
  const auto battery = random_dist_battery({2, 4, 8, 16}, args.pairs_per_vocab, args.seed);
  double max_tv_mix = 0.0;
  double max_tv_identity = 0.0;
  double max_beta_err = 0.0;
  bool beta_dominates = true;
  std::ostringstream t1_csv;
  t1_csv << "# config: " << config.dump() << "\n";
  t1_csv << "pair,vocab,eta_fp,tv_emp_to_mixture,tv_emp_to_target,eta_fp_times_dtv,"
            "beta_empirical,beta_theory\n";
  std::uint64_t stream_id = 1;
  std::vector<double> eta_fp_full = eta_fp_grid;
  if (!args.eta_fp_override) eta_fp_full.push_back(1.0);  // Theorem 1 includes the endpoint
  for (std::size_t pair_idx = 0; pair_idx < battery.size(); ++pair_idx) {
    const auto& [p, q] = battery[pair_idx];
    const double dtv = tv_distance(p, q);
    for (const double eta_fp : eta_fp_full) {
      RngStream rng = root.derive(stream_id++);
      const auto dist_check = validate_token_distribution(p, q, eta_fp, args.samples, rng);
      max_tv_mix = std::max(max_tv_mix, dist_check.tv_to_theory);
      max_tv_identity =
          std::max(max_tv_identity, std::fabs(dist_check.tv_to_target - eta_fp * dtv));

      const auto beta_check = validate_acceptance_rate(p, q, eta_fp, args.samples, rng);
      max_beta_err =
          std::max(max_beta_err, std::fabs(beta_check.beta_empirical - beta_check.beta_theory));
      if (beta_check.beta_theory < acceptance_rate_sd(p, q) - 1e-12) beta_dominates = false;

      char buf[256];
      std::snprintf(buf, sizeof(buf), "%zu,%u,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", pair_idx,
                    p.vocab_size(), eta_fp, dist_check.tv_to_theory, dist_check.tv_to_target,
                    eta_fp * dtv, beta_check.beta_empirical, beta_check.beta_theory);
      t1_csv << buf;
    }
  }
  write_text_file(args.out_dir + "/theorem1_battery.csv", t1_csv.str());
  {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "max TV(empirical, mixture) %.5f (tolerance %.5f)",
                  max_tv_mix, tol_tv_1);
    summary.report("theorem-1 token distribution", max_tv_mix <= tol_tv_1, buf);
    std::snprintf(buf, sizeof(buf), "max |TV(p, empirical) - eta_fp*dTV| %.5f (tolerance %.5f)",
                  max_tv_identity, tol_tv_1);
    summary.report("theorem-1 TV identity", max_tv_identity <= tol_tv_1, buf);
    std::snprintf(buf, sizeof(buf), "max |beta_emp - beta_theory| %.5f (tolerance %.5f)",
                  max_beta_err, tol_beta);
    summary.report("theorem-4 acceptance rate", max_beta_err <= tol_beta, buf);
    summary.report("theorem-4 dominance", beta_dominates,
                   "beta_sprinter >= beta_sd on every battery instance");
  }

  // Theorems 2-3: r-scenario grid; stop time uses t_v = 0 by construction.
  // Per-point deviations are judged at the sigma allowance that gives the
  // whole grid the same family-wise false-alarm rate as one 3-sigma test.
  const double sigma_allowance =
      familywise_sigma(eta_fp_grid.size() * eta_tp_grid.size() * r_values.size() * 2);
  for (const std::uint32_t r : r_values) {
    RngStream rng = root.derive(0x52000 + r);
    const auto rows =
        sweep_theory_curves(r, args.t_d, eta_fp_grid, eta_tp_grid, args.trials, rng);
    write_curves_csv(rows, config, args.out_dir + "/curves_r" + std::to_string(r) + ".csv");
    double worst_mean_sigma = 0.0;
    double worst_time_sigma = 0.0;
    double worst_hist_tv = 0.0;
    for (const auto& row : rows) {
      const double mean_err = std::fabs(row.expected_tokens_sim - row.expected_tokens_theory);
      const double time_err = std::fabs(row.stop_time_sim - row.stop_time_theory);
      // Deterministic points (se = 0) only carry float rounding; judge them
      // against an absolute 1e-12 floor instead.
      worst_mean_sigma =
          std::max(worst_mean_sigma, mean_err / std::max(row.expected_tokens_se, 1e-12));
      worst_time_sigma =
          std::max(worst_time_sigma, time_err / std::max(row.stop_time_se, 1e-12));
      worst_hist_tv = std::max(worst_hist_tv, row.histogram_tv);
    }
    char buf[240];
    std::snprintf(buf, sizeof(buf),
                  "r=%u worst |mean - E[N]| = %.2f sigma (allowance %.2f), hist TV %.5f", r,
                  worst_mean_sigma, sigma_allowance, worst_hist_tv);
    summary.report("theorem-2 token count",
                   worst_mean_sigma <= sigma_allowance && worst_hist_tv <= tol_hist, buf);
    std::snprintf(buf, sizeof(buf), "r=%u worst |time - E[T]| = %.2f sigma (allowance %.2f)",
                  r, worst_time_sigma, sigma_allowance);
    summary.report("theorem-3 stopping time", worst_time_sigma <= sigma_allowance, buf);
  }

  // Fig. 4 / Fig. 5 qualitative claims at r = 5.
  {
    bool fig4 = true;
    bool fig5 = true;
    for (const double tp : eta_tp_grid) {
      for (const double fp : eta_fp_grid) {
        if (fp > 0.5) continue;
        const double gap = expected_tokens({tp, fp, 5, args.t_d}) -
                           expected_tokens({tp, 0.0, 5, args.t_d});
        if (gap > 1.0 + 1e-12) fig4 = false;
        const double tgap = expected_stop_time({tp, fp, 5, args.t_d}) -
                            expected_stop_time({tp, 0.0, 5, args.t_d});
        if (tgap > args.t_d + 1e-12) fig5 = false;
      }
    }
    summary.report("fig-4 gap bound", fig4, "E[N] gap vs eta_fp=0 stays <= 1 for eta_fp <= 0.5");
    summary.report("fig-5 gap bound", fig5, "E[T] gap vs eta_fp=0 stays <= t_d for eta_fp <= 0.5");
  }

  std::cout << (summary.ok ? "all checks passed" : "some checks FAILED") << "\n";
  return summary.ok ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
  std::string draft_path;
  std::string target_path;
  std::string verifier_path;
  std::optional<double> eta_tp;
  std::optional<double> eta_fp;
  double lambda = 1.0;
  std::string prompts_path;
  std::string tokenize_mode = "whitespace";
  std::size_t gamma = 4;
  std::size_t max_new_tokens = 20;
  double prefix_fraction = 0.3;
  std::optional<double> tau;
  std::uint64_t seed = 42;
  std::string out_json = "out/bench.json";
  std::string out_csv = "out/bench.csv";
  CostFlags cost;
};

int cmd_bench(const BenchArgs& args) {
  const auto mode = tokenize_mode_from_string(args.tokenize_mode);
  const NGramModel draft = load_model(args.draft_path);
  const NGramModel target = load_model(args.target_path);
  if (!(draft.vocab() == target.vocab()))
    throw VocabMismatchError("draft and target were trained on different vocabularies");

  std::vector<std::vector<TokenId>> prompts;
  std::istringstream lines(read_text_file(args.prompts_path));
  std::string line;
  while (std::getline(lines, line)) {
    const auto tokens = tokenize_with(target.vocab(), line, mode, /*skip_unknown=*/true);
    if (tokens.empty()) continue;
    const std::size_t keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(args.prefix_fraction *
                                              static_cast<double>(tokens.size()))));
    prompts.emplace_back(tokens.begin(), tokens.begin() + std::min(keep, tokens.size()));
  }
  if (prompts.empty()) throw Error("no usable prompts in " + args.prompts_path);

  json config{{"command", "bench"},
              {"draft", args.draft_path},
              {"target", args.target_path},
              {"prompts", args.prompts_path},
              {"mode", args.tokenize_mode},
              {"gamma", args.gamma},
              {"max_new_tokens", args.max_new_tokens},
              {"prefix_fraction", args.prefix_fraction},
              {"n_prompts", prompts.size()},
              {"seed", args.seed},
              {"cost", args.cost.to_json()}};

  std::optional<LogisticVerifier> storage;
  VerifierConfig verifier_config{OracleVerifierSpec{}, 0.5};
  if (args.eta_tp.has_value() || args.eta_fp.has_value()) {
    OracleVerifierSpec spec;
    spec.quality.eta_tp = args.eta_tp.value_or(1.0);
    spec.quality.eta_fp = args.eta_fp.value_or(0.0);
    spec.lambda = args.lambda;
    verifier_config.verifier = spec;
    verifier_config.tau = args.tau.value_or(0.5);
    config["eta_tp"] = spec.quality.eta_tp;
    config["eta_fp"] = spec.quality.eta_fp;
    config["lambda"] = args.lambda;
  } else {
    if (args.verifier_path.empty())
      throw Error("bench needs --verifier or oracle flags (--eta-tp/--eta-fp)");
    storage = load_verifier(args.verifier_path);
    verifier_config.verifier = &*storage;
    verifier_config.tau = args.tau.value_or(storage->tau());
    config["verifier"] = args.verifier_path;
  }
  config["tau"] = verifier_config.tau;

  RngStream rng(args.seed, 0xbe7c4);
  BenchReport report = benchmark(draft, target, verifier_config, prompts, args.gamma,
                                 args.max_new_tokens, args.cost.cost, rng);
  report.config = config;

  write_text_file(args.out_json, report.to_json().dump(2) + "\n");
  write_text_file(args.out_csv, report.to_csv());

  std::printf("%-9s %8s %14s %9s %14s %9s %9s\n", "method", "avg_tok", "time/token", "speedup",
              "flops", "rouge1", "ppl");
  for (const auto& row : report.rows) {
    std::printf("%-9s %8.3f %7.3f±%-6.3f %8.2fx %14.4g %9.4f %9.3f\n", row.method.c_str(),
                row.avg_accepted_per_round, row.time_per_token_mean, row.time_per_token_std,
                row.speedup, row.total_flops, row.rouge1.f1, row.perplexity);
  }
  if (!report.acceptability_profile.empty()) {
    // Observational: the toy pair has no clean "first r acceptable" block, so
    // the per-position profile is reported rather than asserted.
    double mean = 0.0;
    for (double a : report.acceptability_profile) mean += a;
    mean /= static_cast<double>(report.acceptability_profile.size());
    std::printf("draft acceptability along emitted trajectories: mean %.3f, pos1 %.3f, last %.3f\n",
                mean, report.acceptability_profile.front(), report.acceptability_profile.back());
  }
  std::cout << "wrote " << args.out_json << " and " << args.out_csv << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Speculative decoding laboratory: sequential approximate verification, "
               "standard speculative decoding, theory validation, and benchmarking"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file; command-line flags take precedence");
  app.set_version_flag("--version", "specdec 1.0");

  TrainLmArgs train_lm;
  auto* lm_cmd = app.add_subcommand("train-lm", "Train draft and target n-gram models");
  lm_cmd->add_option("--corpus", train_lm.corpus, "UTF-8 plain text corpus")
      ->required()
      ->check(CLI::ExistingFile);
  lm_cmd->add_option("--mode", train_lm.mode, "Tokenization: whitespace | char")
      ->check(CLI::IsMember({"whitespace", "char"}))
      ->capture_default_str();
  lm_cmd->add_option("--k-draft", train_lm.k_draft, "Draft model order")
      ->check(CLI::Range(1u, 16u))
      ->capture_default_str();
  lm_cmd->add_option("--k-target", train_lm.k_target, "Target model order")
      ->check(CLI::Range(1u, 16u))
      ->capture_default_str();
  lm_cmd->add_option("--alpha", train_lm.alpha, "Additive smoothing")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  lm_cmd->add_option("--holdout", train_lm.holdout, "Held-out fraction for perplexity")
      ->check(CLI::Range(0.0, 0.9))
      ->capture_default_str();
  lm_cmd->add_option("--out-draft", train_lm.out_draft, "Draft model output path")
      ->capture_default_str();
  lm_cmd->add_option("--out-target", train_lm.out_target, "Target model output path")
      ->capture_default_str();
  lm_cmd->add_option("--seed", train_lm.seed, "Provenance seed")->capture_default_str();

  TrainVerifierArgs train_verifier;
  auto* tv_cmd = app.add_subcommand("train-verifier", "Train the logistic token verifier");
  tv_cmd->add_option("--draft", train_verifier.draft_path, "Draft model file")
      ->required()
      ->check(CLI::ExistingFile);
  tv_cmd->add_option("--target", train_verifier.target_path, "Target model file")
      ->required()
      ->check(CLI::ExistingFile);
  tv_cmd->add_option("--corpus", train_verifier.corpus, "Corpus for seed prefixes")
      ->required()
      ->check(CLI::ExistingFile);
  tv_cmd->add_option("--mode", train_verifier.mode, "Tokenization: whitespace | char")
      ->check(CLI::IsMember({"whitespace", "char"}))
      ->capture_default_str();
  tv_cmd->add_option("--lambda", train_verifier.lambdas,
                     "Label threshold(s); repeat for a sweep (default 1.2)")
      ->check(CLI::PositiveNumber);
  tv_cmd->add_option("--tau", train_verifier.tau, "Decision threshold")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9))
      ->capture_default_str();
  tv_cmd->add_option("--per-category", train_verifier.per_category, "Examples per category")
      ->check(CLI::Range(std::size_t{8}, std::size_t{1'000'000}))
      ->capture_default_str();
  tv_cmd->add_option("--epochs", train_verifier.epochs, "Training epochs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tv_cmd->add_option("--lr", train_verifier.lr, "Learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tv_cmd->add_option("--holdout", train_verifier.holdout, "Held-out fraction")
      ->check(CLI::Range(0.05, 0.5))
      ->capture_default_str();
  tv_cmd->add_option("--seed", train_verifier.seed, "Random seed")->capture_default_str();
  tv_cmd->add_option("--out-verifier", train_verifier.out_verifier, "Verifier output path")
      ->capture_default_str();
  tv_cmd->add_option("--out-roc", train_verifier.out_roc, "ROC CSV output path")
      ->capture_default_str();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Decode a completion for one prompt");
  run_cmd->add_option("--mode", run_args.mode, "sprinter | sd | target")
      ->required()
      ->check(CLI::IsMember({"sprinter", "sd", "target"}));
  run_cmd->add_option("--draft", run_args.draft_path, "Draft model file")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--target", run_args.target_path, "Target model file")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--verifier", run_args.verifier_path, "Trained verifier file")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--eta-tp", run_args.eta_tp, "Oracle verifier true-positive rate")
      ->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--eta-fp", run_args.eta_fp, "Oracle verifier false-positive rate")
      ->check(CLI::Range(0.0, 1.0));
  run_cmd->add_option("--lambda", run_args.lambda, "Oracle ground-truth threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--prompt", run_args.prompt, "Prompt text")->required();
  run_cmd->add_option("--tokenize-mode", run_args.tokenize_mode, "whitespace | char")
      ->check(CLI::IsMember({"whitespace", "char"}))
      ->capture_default_str();
  run_cmd->add_option("--max-new-tokens", run_args.max_new_tokens, "Generation budget")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1'000'000}))
      ->capture_default_str();
  run_cmd->add_option("--gamma", run_args.gamma, "SD draft window")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  run_cmd->add_option("--tau", run_args.tau, "Decision threshold override");
  run_cmd->add_option("--seed", run_args.seed, "Random seed")->capture_default_str();
  run_cmd->add_option("--out-trace", run_args.out_trace, "Trace JSONL output path");
  run_args.cost.attach(run_cmd);

  ValidateArgs validate_args;
  auto* val_cmd =
      app.add_subcommand("validate-theory", "Monte Carlo validation of the closed forms");
  val_cmd->add_option("--trials", validate_args.trials, "Trials per r-scenario grid point")
      ->check(CLI::Range(std::uint64_t{10}, std::uint64_t{100'000'000}))
      ->capture_default_str();
  val_cmd->add_option("--samples", validate_args.samples, "Samples per battery point")
      ->check(CLI::Range(std::uint64_t{10}, std::uint64_t{100'000'000}))
      ->capture_default_str();
  val_cmd->add_option("--r", validate_args.r_values, "r values (default 1 3 5 10)");
  val_cmd->add_option("--eta-fp", validate_args.eta_fp_override,
                      "Restrict the eta_fp grid to one value");
  val_cmd->add_option("--t-d", validate_args.t_d, "Draft time unit for stop times")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  val_cmd->add_option("--pairs", validate_args.pairs_per_vocab, "Battery pairs per vocab size")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000}))
      ->capture_default_str();
  val_cmd->add_option("--seed", validate_args.seed, "Random seed")->capture_default_str();
  val_cmd->add_option("--out-dir", validate_args.out_dir, "Directory for CSV outputs")
      ->capture_default_str();

  BenchArgs bench_args;
  auto* bench_cmd = app.add_subcommand("bench", "SD vs SPRINTER benchmark report");
  bench_cmd->add_option("--draft", bench_args.draft_path, "Draft model file")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--target", bench_args.target_path, "Target model file")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--verifier", bench_args.verifier_path, "Trained verifier file")
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--eta-tp", bench_args.eta_tp, "Oracle verifier true-positive rate")
      ->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--eta-fp", bench_args.eta_fp, "Oracle verifier false-positive rate")
      ->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--lambda", bench_args.lambda, "Oracle ground-truth threshold")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--prompts", bench_args.prompts_path, "Prompt file, one per line")
      ->required()
      ->check(CLI::ExistingFile);
  bench_cmd->add_option("--tokenize-mode", bench_args.tokenize_mode, "whitespace | char")
      ->check(CLI::IsMember({"whitespace", "char"}))
      ->capture_default_str();
  bench_cmd->add_option("--gamma", bench_args.gamma, "SD draft window")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--max-new-tokens", bench_args.max_new_tokens, "Tokens per prompt")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1'000'000}))
      ->capture_default_str();
  bench_cmd->add_option("--prefix-fraction", bench_args.prefix_fraction,
                        "Fraction of each prompt given as input")
      ->check(CLI::Range(0.01, 1.0))
      ->capture_default_str();
  bench_cmd->add_option("--tau", bench_args.tau, "Decision threshold override");
  bench_cmd->add_option("--seed", bench_args.seed, "Random seed")->capture_default_str();
  bench_cmd->add_option("--out-json", bench_args.out_json, "Report JSON path")
      ->capture_default_str();
  bench_cmd->add_option("--out-csv", bench_args.out_csv, "Report CSV path")
      ->capture_default_str();
  bench_args.cost.attach(bench_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train_verifier.lambdas.empty()) train_verifier.lambdas = {1.2};
    if (lm_cmd->parsed()) return cmd_train_lm(train_lm);
    if (tv_cmd->parsed()) return cmd_train_verifier(train_verifier);
    if (run_cmd->parsed()) return cmd_run(run_args);
    if (val_cmd->parsed()) return cmd_validate_theory(validate_args);
    if (bench_cmd->parsed()) return cmd_bench(bench_args);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
