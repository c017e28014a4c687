#include "specdec/vocab.hpp"

#include <cctype>
#include <sstream>

#include "specdec/errors.hpp"

namespace specdec {

const char* to_string(TokenizeMode mode) {
  return mode == TokenizeMode::whitespace ? "whitespace" : "char";
}

TokenizeMode tokenize_mode_from_string(const std::string& name) {
  if (name == "whitespace" || name == "ws") return TokenizeMode::whitespace;
  if (name == "char" || name == "character") return TokenizeMode::character;
  throw Error("unknown tokenize mode: " + name);
}

Vocab::Vocab() {
  symbols_.push_back(kBosSymbol);
  lookup_.emplace(kBosSymbol, kBos);
}

TokenId Vocab::add(const std::string& symbol) {
  auto it = lookup_.find(symbol);
  if (it != lookup_.end()) return it->second;
  const TokenId id = static_cast<TokenId>(symbols_.size());
  symbols_.push_back(symbol);
  lookup_.emplace(symbol, id);
  return id;
}

std::optional<TokenId> Vocab::find(const std::string& symbol) const {
  auto it = lookup_.find(symbol);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

namespace {

std::vector<std::string> split_symbols(const std::string& text, TokenizeMode mode) {
  std::vector<std::string> out;
  if (mode == TokenizeMode::whitespace) {
    std::istringstream stream(text);
    std::string word;
    while (stream >> word) out.push_back(word);
  } else {
    out.reserve(text.size());
    for (char c : text) out.emplace_back(1, c);
  }
  return out;
}

}  // namespace

Tokenized tokenize(const std::string& text, TokenizeMode mode) {
  Tokenized result;
  const auto symbols = split_symbols(text, mode);
  if (symbols.empty()) throw EmptyCorpusError();
  result.tokens.reserve(symbols.size());
  for (const auto& s : symbols) result.tokens.push_back(result.vocab.add(s));
  return result;
}

std::vector<TokenId> tokenize_with(const Vocab& vocab, const std::string& text, TokenizeMode mode,
                                   bool skip_unknown) {
  std::vector<TokenId> out;
  for (const auto& s : split_symbols(text, mode)) {
    if (auto id = vocab.find(s)) {
      out.push_back(*id);
    } else if (!skip_unknown) {
      throw VocabMismatchError("symbol not in vocab: '" + s + "'");
    }
  }
  return out;
}

std::string detokenize(const Vocab& vocab, std::span<const TokenId> tokens, TokenizeMode mode) {
  std::string out;
  bool first = true;
  for (TokenId id : tokens) {
    if (mode == TokenizeMode::whitespace && !first) out += ' ';
    out += vocab.symbol(id);
    first = false;
  }
  return out;
}

}  // namespace specdec
