#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "specdec/dist.hpp"
#include "specdec/lm.hpp"
#include "specdec/rng.hpp"

namespace specdec {

// True-positive / false-positive rates of a token verifier: the probability
// that an acceptable (resp. unacceptable) draft token is accepted.
struct VerifierQuality {
  double eta_tp = 1.0;
  double eta_fp = 0.0;
};

// 1 iff q_x / p_x <= lambda (acceptable), else 0. A token that is impossible
// under the target (p_x = 0, q_x > 0) is labeled 0.
int ground_truth_label(double q_x, double p_x, double lambda);

// Simulated verifier with exact i.i.d. Bernoulli behavior: accepts a
// true-positive with probability eta_tp and a true-negative with eta_fp.
int oracle_decide(int true_label, const VerifierQuality& quality, RngStream& rng);

inline constexpr std::size_t kFeatureDim = 6;
inline constexpr int kFeatureSchemaId = 1;
using FeatureVector = std::array<double, kFeatureDim>;

// Probability-derived features of the draft distribution for the sampled
// token: [log q(x), entropy(q), q(x) - max_y q(y), normalized rank of x
// under q, top-1 prob, normalized prefix length]. Log probabilities are
// floored at 1e-12.
FeatureVector featurize(const CategoricalDist& q_dist, TokenId token, std::size_t prefix_len);

enum class PrefixCategory : std::uint8_t { original, draft_completed, target_completed, mixed };
const char* to_string(PrefixCategory category);

struct LabeledExample {
  FeatureVector features{};
  int label = 0;
  PrefixCategory category = PrefixCategory::original;
};

// Balanced four-category training set: per_category examples each for
// (a) an original prefix, (b) prefix + draft-only continuation, (c) prefix +
// target-only continuation, (d) prefix + interleaved continuation. Every
// example is a draft-sampled token labeled against the target at threshold
// lambda.
std::vector<LabeledExample> build_training_set(const LanguageModel& draft,
                                               const LanguageModel& target,
                                               const std::vector<std::vector<TokenId>>& seed_prefixes,
                                               std::size_t per_category, double lambda,
                                               RngStream& rng);

// Single linear layer + sigmoid over the feature vector.
class LogisticVerifier {
 public:
  LogisticVerifier() = default;
  LogisticVerifier(const FeatureVector& weights, double bias, double tau, double lambda_train);

  double score(const FeatureVector& f) const;   // sigmoid(w . f + b), in (0,1)
  int decide(const FeatureVector& f) const;     // 1 iff score > tau (strict)

  const FeatureVector& weights() const { return weights_; }
  double bias() const { return bias_; }
  double tau() const { return tau_; }
  double lambda_train() const { return lambda_train_; }
  void set_tau(double tau);

 private:
  FeatureVector weights_{};
  double bias_ = 0.0;
  double tau_ = 0.5;
  double lambda_train_ = 1.0;
};

struct TrainOptions {
  std::uint32_t epochs = 500;
  double lr = 0.01;
  double tau = 0.5;
  double lambda = 1.0;
};

struct TrainResult {
  LogisticVerifier verifier;
  double initial_loss = 0.0;
  double final_loss = 0.0;
};

// Full-batch binary cross entropy minimized with adaptive-moment gradient
// descent from a zero initialization; deterministic. Throws
// DegenerateLabelsError on a single-class training set.
TrainResult train_logistic(const std::vector<LabeledExample>& examples,
                           const TrainOptions& options);

struct RocPoint {
  double threshold = 0.0;
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // threshold sweep, (0,0) .. (1,1)
  double auc = 0.0;              // trapezoid rule
};

// Threshold sweep over all distinct scores (predict positive iff score >=
// threshold). Requires both classes present.
RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

// Empirical (eta_tp, eta_fp): accepted-positives / positives and
// accepted-negatives / negatives. Requires both classes present.
VerifierQuality measure_quality(const std::vector<int>& decisions,
                                const std::vector<int>& labels);
VerifierQuality measure_quality(const LogisticVerifier& verifier,
                                const std::vector<LabeledExample>& heldout);

// Versioned text format carrying weights, bias, tau, lambda_train and the
// feature schema id. Saves are byte-deterministic. `config_json` is an opaque
// provenance string stored in the header.
void save_verifier(const LogisticVerifier& verifier, const std::string& path,
                   const std::string& config_json = "{}");
LogisticVerifier load_verifier(const std::string& path);

}  // namespace specdec
