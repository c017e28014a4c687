#include "specdec/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "specdec/errors.hpp"
#include "specdec/kernels.hpp"

namespace specdec {

int ground_truth_label(double q_x, double p_x, double lambda) {
  if (!(lambda > 0.0)) throw Error("lambda must be positive");
  if (p_x <= 0.0) return q_x > 0.0 ? 0 : 1;
  return q_x / p_x <= lambda ? 1 : 0;
}

int oracle_decide(int true_label, const VerifierQuality& quality, RngStream& rng) {
  const double accept_prob = true_label == 1 ? quality.eta_tp : quality.eta_fp;
  return rng.bernoulli(accept_prob) ? 1 : 0;
}

FeatureVector featurize(const CategoricalDist& q_dist, TokenId token, std::size_t prefix_len) {
  const std::uint32_t v = q_dist.vocab_size();
  const double q_x = q_dist[token];
  double top1 = 0.0;
  std::uint32_t greater = 0;
  for (std::uint32_t i = 0; i < v; ++i) {
    const double qi = q_dist[i];
    top1 = std::max(top1, qi);
    if (qi > q_x) ++greater;
  }
  const double len = static_cast<double>(prefix_len);
  return FeatureVector{
      std::log(std::max(q_x, 1e-12)),
      entropy(q_dist),
      q_x - top1,
      v > 1 ? static_cast<double>(greater) / (v - 1) : 0.0,
      top1,
      len / (len + 16.0),
  };
}

const char* to_string(PrefixCategory category) {
  switch (category) {
    case PrefixCategory::original: return "original";
    case PrefixCategory::draft_completed: return "draft-completed";
    case PrefixCategory::target_completed: return "target-completed";
    case PrefixCategory::mixed: return "mixed";
  }
  return "unknown";
}

std::vector<LabeledExample> build_training_set(const LanguageModel& draft,
                                               const LanguageModel& target,
                                               const std::vector<std::vector<TokenId>>& seed_prefixes,
                                               std::size_t per_category, double lambda,
                                               RngStream& rng) {
  if (draft.vocab_size() != target.vocab_size())
    throw VocabMismatchError("draft and target disagree on vocab size");
  if (seed_prefixes.empty()) throw Error("need at least one seed prefix");

  constexpr PrefixCategory kCategories[] = {PrefixCategory::original,
                                            PrefixCategory::draft_completed,
                                            PrefixCategory::target_completed, PrefixCategory::mixed};
  std::vector<LabeledExample> out;
  out.reserve(per_category * 4);
  for (const PrefixCategory category : kCategories) {
    for (std::size_t i = 0; i < per_category; ++i) {
      std::vector<TokenId> prefix = seed_prefixes[i % seed_prefixes.size()];
      if (category != PrefixCategory::original) {
        const std::size_t extra = 1 + rng.next_below(4);
        for (std::size_t j = 0; j < extra; ++j) {
          const bool from_draft = category == PrefixCategory::draft_completed ||
                                  (category == PrefixCategory::mixed && rng.bernoulli(0.5));
          const LanguageModel& source = from_draft ? draft : target;
          prefix.push_back(sample(source.next_dist(prefix), rng));
        }
      }
      const CategoricalDist q_dist = draft.next_dist(prefix);
      const TokenId x = sample(q_dist, rng);
      const double p_x = target.next_dist(prefix)[x];
      out.push_back(LabeledExample{featurize(q_dist, x, prefix.size()),
                                   ground_truth_label(q_dist[x], p_x, lambda), category});
    }
  }
  return out;
}

LogisticVerifier::LogisticVerifier(const FeatureVector& weights, double bias, double tau,
                                   double lambda_train)
    : weights_(weights), bias_(bias), tau_(tau), lambda_train_(lambda_train) {
  set_tau(tau);
}

void LogisticVerifier::set_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidTauError(tau);
  tau_ = tau;
}

double LogisticVerifier::score(const FeatureVector& f) const {
  const double z = kernels::dot(weights_.data(), f.data(), kFeatureDim) + bias_;
  return 1.0 / (1.0 + std::exp(-z));
}

int LogisticVerifier::decide(const FeatureVector& f) const { return score(f) > tau_ ? 1 : 0; }

namespace {

double mean_bce_loss(const std::vector<LabeledExample>& examples, const FeatureVector& w,
                     double b) {
  double loss = 0.0;
  for (const auto& ex : examples) {
    const double z = kernels::dot(w.data(), ex.features.data(), kFeatureDim) + b;
    // log(1 + e^-|z|) form keeps the loss finite for large |z|.
    loss += std::log1p(std::exp(-std::fabs(z))) + (z > 0 ? (1 - ex.label) * z : -ex.label * z);
  }
  return loss / static_cast<double>(examples.size());
}

}  // namespace

TrainResult train_logistic(const std::vector<LabeledExample>& examples,
                           const TrainOptions& options) {
  if (examples.empty()) throw Error("empty training set");
  const bool has_pos = std::any_of(examples.begin(), examples.end(),
                                   [](const LabeledExample& e) { return e.label == 1; });
  const bool has_neg = std::any_of(examples.begin(), examples.end(),
                                   [](const LabeledExample& e) { return e.label == 0; });
  if (!has_pos || !has_neg) throw DegenerateLabelsError();

  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  constexpr std::size_t kParams = kFeatureDim + 1;

  std::array<double, kParams> theta{};
  std::array<double, kParams> m{};
  std::array<double, kParams> v{};
  const double n = static_cast<double>(examples.size());

  FeatureVector w{};
  TrainResult result;
  result.initial_loss = mean_bce_loss(examples, w, 0.0);

  for (std::uint32_t epoch = 1; epoch <= options.epochs; ++epoch) {
    std::array<double, kParams> grad{};
    for (const auto& ex : examples) {
      double z = theta[kFeatureDim];
      for (std::size_t j = 0; j < kFeatureDim; ++j) z += theta[j] * ex.features[j];
      const double err = 1.0 / (1.0 + std::exp(-z)) - ex.label;
      for (std::size_t j = 0; j < kFeatureDim; ++j) grad[j] += err * ex.features[j];
      grad[kFeatureDim] += err;
    }
    const double bc1 = 1.0 - std::pow(kBeta1, epoch);
    const double bc2 = 1.0 - std::pow(kBeta2, epoch);
    for (std::size_t j = 0; j < kParams; ++j) {
      const double g = grad[j] / n;
      m[j] = kBeta1 * m[j] + (1.0 - kBeta1) * g;
      v[j] = kBeta2 * v[j] + (1.0 - kBeta2) * g * g;
      theta[j] -= options.lr * (m[j] / bc1) / (std::sqrt(v[j] / bc2) + kEps);
    }
  }

  std::copy_n(theta.begin(), kFeatureDim, w.begin());
  result.final_loss = mean_bce_loss(examples, w, theta[kFeatureDim]);
  result.verifier = LogisticVerifier(w, theta[kFeatureDim], options.tau, options.lambda);
  return result;
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw Error("scores and labels must align");
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  const auto negatives = static_cast<long>(labels.size()) - positives;
  if (positives == 0 || negatives == 0) throw SingleClassError();

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back(RocPoint{std::numeric_limits<double>::infinity(), 0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // Consume the whole tie group so each point is a realizable operating point.
    while (i < order.size() && scores[order[i]] == threshold) {
      if (labels[order[i]] == 1) ++tp;
      else ++fp;
      ++i;
    }
    curve.points.push_back(RocPoint{threshold, static_cast<double>(fp) / negatives,
                                    static_cast<double>(tp) / positives});
  }
  double auc = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

VerifierQuality measure_quality(const std::vector<int>& decisions,
                                const std::vector<int>& labels) {
  if (decisions.size() != labels.size()) throw Error("decisions and labels must align");
  std::size_t pos = 0;
  std::size_t neg = 0;
  std::size_t accepted_pos = 0;
  std::size_t accepted_neg = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == 1) {
      ++pos;
      accepted_pos += decisions[i];
    } else {
      ++neg;
      accepted_neg += decisions[i];
    }
  }
  if (pos == 0 || neg == 0) throw SingleClassError();
  return VerifierQuality{static_cast<double>(accepted_pos) / pos,
                         static_cast<double>(accepted_neg) / neg};
}

VerifierQuality measure_quality(const LogisticVerifier& verifier,
                                const std::vector<LabeledExample>& heldout) {
  std::vector<int> decisions;
  std::vector<int> labels;
  decisions.reserve(heldout.size());
  labels.reserve(heldout.size());
  for (const auto& ex : heldout) {
    decisions.push_back(verifier.decide(ex.features));
    labels.push_back(ex.label);
  }
  return measure_quality(decisions, labels);
}

namespace {

constexpr const char* kVerifierMagic = "specdec-verifier";
constexpr int kVerifierVersion = 1;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void save_verifier(const LogisticVerifier& verifier, const std::string& path,
                   const std::string& config_json) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path);
  file << kVerifierMagic << " v" << kVerifierVersion << "\n";
  file << "config " << (config_json.empty() ? "{}" : config_json) << "\n";
  file << "feature_schema " << kFeatureSchemaId << "\n";
  file << "tau " << format_double(verifier.tau()) << "\n";
  file << "lambda " << format_double(verifier.lambda_train()) << "\n";
  file << "bias " << format_double(verifier.bias()) << "\n";
  file << "weights";
  for (double w : verifier.weights()) file << " " << format_double(w);
  file << "\nend\n";
  if (!file) throw IoError("write failed: " + path);
}

LogisticVerifier load_verifier(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(file, line) ||
      line != std::string(kVerifierMagic) + " v" + std::to_string(kVerifierVersion))
    throw FormatError("bad magic or unsupported version");
  if (!std::getline(file, line) || line.rfind("config ", 0) != 0)
    throw FormatError("expected 'config' line");

  auto next_tokens = [&](const char* key) {
    if (!std::getline(file, line)) throw FormatError(std::string("truncated: expected ") + key);
    std::istringstream in(line);
    std::string k;
    in >> k;
    if (k != key) throw FormatError(std::string("expected '") + key + "' line");
    std::vector<std::string> values;
    std::string v;
    while (in >> v) values.push_back(v);
    if (values.empty()) throw FormatError(std::string("empty '") + key + "' line");
    return values;
  };

  if (std::stoi(next_tokens("feature_schema")[0]) != kFeatureSchemaId)
    throw FormatError("unsupported feature schema");
  const double tau = std::stod(next_tokens("tau")[0]);
  const double lambda = std::stod(next_tokens("lambda")[0]);
  const double bias = std::stod(next_tokens("bias")[0]);
  const auto weight_strs = next_tokens("weights");
  if (weight_strs.size() != kFeatureDim) throw FormatError("wrong weight count");
  FeatureVector w{};
  for (std::size_t i = 0; i < kFeatureDim; ++i) w[i] = std::stod(weight_strs[i]);
  if (!std::getline(file, line) || line != "end") throw FormatError("missing end marker");
  return LogisticVerifier(w, bias, tau, lambda);
}

}  // namespace specdec
