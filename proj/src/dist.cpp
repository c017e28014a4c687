#include "specdec/dist.hpp"

#include <cmath>
#include <utility>

#include "specdec/errors.hpp"
#include "specdec/kernels.hpp"

namespace specdec {

CategoricalDist::CategoricalDist(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw Error("distribution needs at least one entry");
  for (double v : probs_) {
    if (!std::isfinite(v) || v < 0.0)
      throw Error("distribution entries must be finite and non-negative");
  }
  const double total = kernels::sum(probs_.data(), probs_.size());
  if (total <= 0.0) throw AllZeroError();
  if (std::fabs(total - 1.0) > kSumTolerance)
    throw Error("distribution does not sum to one within tolerance");
  kernels::scale(probs_.data(), probs_.data(), 1.0 / total, probs_.size());
}

CategoricalDist CategoricalDist::uniform(std::uint32_t vocab_size) {
  if (vocab_size == 0) throw Error("vocab_size must be positive");
  return CategoricalDist(std::vector<double>(vocab_size, 1.0 / vocab_size));
}

CategoricalDist normalize(const std::vector<double>& weights) {
  if (weights.empty()) throw Error("normalize needs at least one weight");
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw Error("weights must be finite and non-negative");
  }
  const double total = kernels::sum(weights.data(), weights.size());
  if (total <= 0.0) throw AllZeroError();
  std::vector<double> probs(weights.size());
  kernels::scale(probs.data(), weights.data(), 1.0 / total, probs.size());
  return CategoricalDist(std::move(probs));
}

TokenId sample_weights(const double* weights, std::uint32_t n, double total_mass, RngStream& rng) {
  const double target = rng.next_double() * total_mass;
  double acc = 0.0;
  TokenId last_positive = 0;
  bool seen_positive = false;
  for (TokenId i = 0; i < n; ++i) {
    const double w = weights[i];
    if (w <= 0.0) continue;
    acc += w;
    last_positive = i;
    seen_positive = true;
    if (target < acc) return i;
  }
  // Rounding can leave target marginally above the accumulated mass.
  if (!seen_positive) throw AllZeroError();
  return last_positive;
}

TokenId sample(const CategoricalDist& dist, RngStream& rng) {
  return sample_weights(dist.data(), dist.vocab_size(), 1.0, rng);
}

double tv_distance(const CategoricalDist& p, const CategoricalDist& q) {
  if (p.vocab_size() != q.vocab_size())
    throw VocabMismatchError("tv_distance requires equal vocab sizes");
  return 0.5 * kernels::abs_diff_sum(p.data(), q.data(), p.vocab_size());
}

CategoricalDist residual_dist(const CategoricalDist& p, const CategoricalDist& q) {
  if (p.vocab_size() != q.vocab_size())
    throw VocabMismatchError("residual_dist requires equal vocab sizes");
  std::vector<double> weights(p.vocab_size());
  const double mass = kernels::clamped_diff(weights.data(), p.data(), q.data(), weights.size());
  if (mass <= 0.0) return p;  // p == q elementwise: any draw from p is target-consistent
  kernels::scale(weights.data(), weights.data(), 1.0 / mass, weights.size());
  return CategoricalDist(std::move(weights));
}

TokenId sample_residual(const CategoricalDist& p, const CategoricalDist& q, RngStream& rng) {
  if (p.vocab_size() != q.vocab_size())
    throw VocabMismatchError("sample_residual requires equal vocab sizes");
  const std::uint32_t n = p.vocab_size();
  const double mass = kernels::clamped_diff_sum(p.data(), q.data(), n);
  if (mass <= 0.0) return sample(p, rng);
  const double target = rng.next_double() * mass;
  double acc = 0.0;
  TokenId last_positive = 0;
  for (TokenId i = 0; i < n; ++i) {
    const double w = p[i] - q[i];
    if (w <= 0.0) continue;
    acc += w;
    last_positive = i;
    if (target < acc) return i;
  }
  return last_positive;
}

CategoricalDist sprinter_mixture(const CategoricalDist& p, const CategoricalDist& q,
                                 double eta_fp) {
  if (p.vocab_size() != q.vocab_size())
    throw VocabMismatchError("sprinter_mixture requires equal vocab sizes");
  if (!(eta_fp >= 0.0 && eta_fp <= 1.0)) throw Error("eta_fp must lie in [0,1]");
  std::vector<double> probs(p.vocab_size());
  kernels::mix(probs.data(), p.data(), q.data(), eta_fp, probs.size());
  return CategoricalDist(std::move(probs));
}

double entropy(const CategoricalDist& dist) {
  double h = 0.0;
  for (std::uint32_t i = 0; i < dist.vocab_size(); ++i) {
    const double v = dist[i];
    if (v > 0.0) h -= v * std::log(v);
  }
  return h;
}

}  // namespace specdec
