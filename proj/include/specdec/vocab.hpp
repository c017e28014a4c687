#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "specdec/dist.hpp"

namespace specdec {

enum class TokenizeMode { whitespace, character };

const char* to_string(TokenizeMode mode);
TokenizeMode tokenize_mode_from_string(const std::string& name);

// Bijective symbol <-> dense token-id table. Id 0 is the reserved
// begin-of-sequence symbol.
class Vocab {
 public:
  static constexpr TokenId kBos = 0;
  static constexpr const char* kBosSymbol = "<s>";

  Vocab();

  // Get-or-insert; first-seen ordering.
  TokenId add(const std::string& symbol);
  std::optional<TokenId> find(const std::string& symbol) const;
  const std::string& symbol(TokenId id) const { return symbols_[id]; }
  std::uint32_t size() const { return static_cast<std::uint32_t>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  bool operator==(const Vocab& other) const { return symbols_ == other.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, TokenId> lookup_;
};

struct Tokenized {
  Vocab vocab;
  std::vector<TokenId> tokens;
};

// Builds a vocab from the text. Throws EmptyCorpusError when no tokens come
// out. Character mode tokenizes per byte, whitespace included, so round-trips
// are exact; whitespace mode round-trips up to whitespace normalization.
Tokenized tokenize(const std::string& text, TokenizeMode mode);

// Tokenizes against an existing vocab. Unknown symbols are dropped when
// skip_unknown is set, otherwise raise VocabMismatchError.
std::vector<TokenId> tokenize_with(const Vocab& vocab, const std::string& text, TokenizeMode mode,
                                   bool skip_unknown);

std::string detokenize(const Vocab& vocab, std::span<const TokenId> tokens, TokenizeMode mode);

}  // namespace specdec
