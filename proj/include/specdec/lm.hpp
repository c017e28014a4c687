#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "specdec/dist.hpp"
#include "specdec/vocab.hpp"

namespace specdec {

// Anything that can play the draft or target role: exposes the conditional
// next-token distribution for a prefix. Implementations are immutable after
// construction and safe to share across threads.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;
  virtual std::uint32_t vocab_size() const = 0;
  virtual CategoricalDist next_dist(std::span<const TokenId> prefix) const = 0;
};

// Order-k Markov model with additive smoothing:
//   P(x | c) = (count(c, x) + alpha) / (count(c, .) + alpha * V)
// Contexts shorter than k are left-padded with BOS.
class NGramModel : public LanguageModel {
 public:
  using Context = std::vector<TokenId>;
  using CountTable = std::map<Context, std::map<TokenId, std::uint64_t>>;

  NGramModel(std::uint32_t order, Vocab vocab, double alpha, CountTable counts);

  std::uint32_t vocab_size() const override { return vocab_.size(); }
  CategoricalDist next_dist(std::span<const TokenId> prefix) const override;

  std::uint32_t order() const { return order_; }
  double alpha() const { return alpha_; }
  const Vocab& vocab() const { return vocab_; }
  const CountTable& counts() const { return counts_; }

  Context context_for(std::span<const TokenId> prefix) const;

 private:
  std::uint32_t order_;
  double alpha_;
  Vocab vocab_;
  CountTable counts_;
  std::map<Context, std::uint64_t> context_totals_;
};

// Fixed-table model for theory experiments: returns the configured
// distribution for any prefix (or, with a per-length table, the entry for
// min(prefix length, table size - 1)).
class SyntheticModel : public LanguageModel {
 public:
  explicit SyntheticModel(CategoricalDist fixed);
  explicit SyntheticModel(std::vector<CategoricalDist> by_prefix_len);

  std::uint32_t vocab_size() const override { return table_.front().vocab_size(); }
  CategoricalDist next_dist(std::span<const TokenId> prefix) const override;

 private:
  std::vector<CategoricalDist> table_;
};

// Training is a pure function of (corpus, k, alpha). Requires
// corpus.size() > k.
NGramModel train_ngram(const Vocab& vocab, const std::vector<TokenId>& corpus, std::uint32_t order,
                       double alpha);
NGramModel train_ngram(const Tokenized& corpus, std::uint32_t order, double alpha);

// exp(-mean log P(x_t | prefix_t)), evaluated from `context` onward. Raises
// ZeroProbabilityError on an impossible transition (alpha = 0 only).
double perplexity(const LanguageModel& model, std::span<const TokenId> context,
                  std::span<const TokenId> tokens);
double perplexity(const LanguageModel& model, std::span<const TokenId> tokens);

// Canonical text serialization: two saves of the same model are
// byte-identical, and load(save(m)) agrees with m on every context.
// `config_json` is an opaque provenance string stored in the header.
void save_model(const NGramModel& model, const std::string& path,
                const std::string& config_json = "{}");
NGramModel load_model(const std::string& path);

}  // namespace specdec
