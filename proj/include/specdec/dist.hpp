#pragma once

#include <cstdint>
#include <vector>

#include "specdec/rng.hpp"

namespace specdec {

using TokenId = std::uint32_t;

// Finite next-token probability vector indexed by dense token ids 0..V-1.
// Immutable after construction. Entries are finite, non-negative, and sum to
// one: construction renormalizes when the deviation is within kSumTolerance
// and fails otherwise.
class CategoricalDist {
 public:
  static constexpr double kSumTolerance = 1e-9;

  explicit CategoricalDist(std::vector<double> probs);

  static CategoricalDist uniform(std::uint32_t vocab_size);

  std::uint32_t vocab_size() const { return static_cast<std::uint32_t>(probs_.size()); }
  double operator[](TokenId i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }
  const double* data() const { return probs_.data(); }

 private:
  std::vector<double> probs_;
};

// weights / sum(weights). Throws AllZeroError when the sum is zero.
CategoricalDist normalize(const std::vector<double>& weights);

// Inverse-CDF draw over raw weights with the given total mass. Never returns
// an index whose weight is zero.
TokenId sample_weights(const double* weights, std::uint32_t n, double total_mass, RngStream& rng);

TokenId sample(const CategoricalDist& dist, RngStream& rng);

// 0.5 * sum |p_i - q_i|. Requires matching vocab sizes.
double tv_distance(const CategoricalDist& p, const CategoricalDist& q);

// norm(max(0, p - q)): the corrected resampling distribution after a true
// rejection. Degenerate case p == q elementwise returns p itself.
CategoricalDist residual_dist(const CategoricalDist& p, const CategoricalDist& q);

// Single draw from residual_dist(p, q) without materializing it. Used on the
// hot rejection path; agrees with residual_dist in distribution.
TokenId sample_residual(const CategoricalDist& p, const CategoricalDist& q, RngStream& rng);

// (1 - eta_fp) * p + eta_fp * q: the token distribution under sequential
// approximate verification with a false-positive rate of eta_fp.
CategoricalDist sprinter_mixture(const CategoricalDist& p, const CategoricalDist& q, double eta_fp);

// Shannon entropy in nats; 0 log 0 := 0.
double entropy(const CategoricalDist& dist);

}  // namespace specdec
