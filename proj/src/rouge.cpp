#include "specdec/rouge.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "specdec/errors.hpp"

namespace specdec {

const char* to_string(RougeVariant variant) {
  switch (variant) {
    case RougeVariant::rouge1: return "rouge1";
    case RougeVariant::rouge2: return "rouge2";
    case RougeVariant::rougeL: return "rougeL";
  }
  return "unknown";
}

namespace {

using Ngram = std::vector<TokenId>;

std::map<Ngram, std::size_t> ngram_counts(std::span<const TokenId> tokens, std::size_t n) {
  std::map<Ngram, std::size_t> counts;
  if (tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i)
    counts[Ngram(tokens.begin() + i, tokens.begin() + i + n)] += 1;
  return counts;
}

RougeScore from_counts(double overlap, double candidate_total, double reference_total) {
  RougeScore score;
  score.precision = candidate_total > 0 ? overlap / candidate_total : 0.0;
  score.recall = reference_total > 0 ? overlap / reference_total : 0.0;
  score.f1 = (score.precision + score.recall) > 0
                 ? 2.0 * score.precision * score.recall / (score.precision + score.recall)
                 : 0.0;
  return score;
}

std::size_t lcs_length(std::span<const TokenId> a, std::span<const TokenId> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0);
  std::vector<std::size_t> curr(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      curr[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return prev[b.size()];
}

}  // namespace

RougeScore rouge(std::span<const TokenId> candidate, std::span<const TokenId> reference,
                 RougeVariant variant) {
  if (reference.empty()) throw EmptyReferenceError();
  if (variant == RougeVariant::rougeL) {
    const double lcs = static_cast<double>(lcs_length(candidate, reference));
    return from_counts(lcs, static_cast<double>(candidate.size()),
                       static_cast<double>(reference.size()));
  }
  const std::size_t n = variant == RougeVariant::rouge1 ? 1 : 2;
  const auto cand = ngram_counts(candidate, n);
  const auto ref = ngram_counts(reference, n);
  double overlap = 0.0;
  double cand_total = 0.0;
  double ref_total = 0.0;
  for (const auto& [gram, count] : cand) {
    cand_total += static_cast<double>(count);
    const auto it = ref.find(gram);
    if (it != ref.end()) overlap += static_cast<double>(std::min(count, it->second));
  }
  for (const auto& [gram, count] : ref) ref_total += static_cast<double>(count);
  return from_counts(overlap, cand_total, ref_total);
}

}  // namespace specdec
