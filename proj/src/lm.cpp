#include "specdec/lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <utility>

#include "specdec/errors.hpp"

namespace specdec {

NGramModel::NGramModel(std::uint32_t order, Vocab vocab, double alpha, CountTable counts)
    : order_(order), alpha_(alpha), vocab_(std::move(vocab)), counts_(std::move(counts)) {
  if (order_ == 0) throw Error("n-gram order must be positive");
  if (!(alpha_ >= 0.0) || !std::isfinite(alpha_)) throw Error("alpha must be finite and >= 0");
  for (const auto& [ctx, row] : counts_) {
    std::uint64_t total = 0;
    for (const auto& [token, count] : row) total += count;
    context_totals_[ctx] = total;
  }
}

NGramModel::Context NGramModel::context_for(std::span<const TokenId> prefix) const {
  Context ctx(order_, Vocab::kBos);
  const std::size_t take = std::min<std::size_t>(order_, prefix.size());
  for (std::size_t i = 0; i < take; ++i) ctx[order_ - take + i] = prefix[prefix.size() - take + i];
  return ctx;
}

CategoricalDist NGramModel::next_dist(std::span<const TokenId> prefix) const {
  const std::uint32_t v = vocab_.size();
  const Context ctx = context_for(prefix);
  const auto row = counts_.find(ctx);
  const std::uint64_t total = row == counts_.end() ? 0 : context_totals_.at(ctx);
  const double denom = static_cast<double>(total) + alpha_ * v;
  if (denom <= 0.0) return CategoricalDist::uniform(v);  // unseen context, alpha = 0
  std::vector<double> probs(v, alpha_ / denom);
  if (row != counts_.end()) {
    for (const auto& [token, count] : row->second)
      probs[token] = (static_cast<double>(count) + alpha_) / denom;
  }
  return CategoricalDist(std::move(probs));
}

SyntheticModel::SyntheticModel(CategoricalDist fixed) { table_.push_back(std::move(fixed)); }

SyntheticModel::SyntheticModel(std::vector<CategoricalDist> by_prefix_len)
    : table_(std::move(by_prefix_len)) {
  if (table_.empty()) throw Error("synthetic model table must not be empty");
  for (const auto& d : table_) {
    if (d.vocab_size() != table_.front().vocab_size())
      throw VocabMismatchError("synthetic table entries disagree on vocab size");
  }
}

CategoricalDist SyntheticModel::next_dist(std::span<const TokenId> prefix) const {
  const std::size_t idx = std::min(prefix.size(), table_.size() - 1);
  return table_[idx];
}

NGramModel train_ngram(const Vocab& vocab, const std::vector<TokenId>& corpus, std::uint32_t order,
                       double alpha) {
  if (order == 0) throw Error("n-gram order must be positive");
  if (corpus.size() <= order)
    throw CorpusTooShortError("need more than " + std::to_string(order) + " tokens, got " +
                              std::to_string(corpus.size()));
  NGramModel::CountTable counts;
  NGramModel::Context ctx(order, Vocab::kBos);
  for (std::size_t t = 0; t < corpus.size(); ++t) {
    counts[ctx][corpus[t]] += 1;
    // Slide the context window.
    for (std::uint32_t i = 0; i + 1 < order; ++i) ctx[i] = ctx[i + 1];
    ctx[order - 1] = corpus[t];
  }
  return NGramModel(order, vocab, alpha, std::move(counts));
}

NGramModel train_ngram(const Tokenized& corpus, std::uint32_t order, double alpha) {
  return train_ngram(corpus.vocab, corpus.tokens, order, alpha);
}

double perplexity(const LanguageModel& model, std::span<const TokenId> context,
                  std::span<const TokenId> tokens) {
  if (tokens.empty()) throw Error("perplexity needs a non-empty token sequence");
  std::vector<TokenId> prefix(context.begin(), context.end());
  double log_sum = 0.0;
  for (TokenId token : tokens) {
    const CategoricalDist dist = model.next_dist(prefix);
    const double p = dist[token];
    if (p <= 0.0)
      throw ZeroProbabilityError("token " + std::to_string(token) + " has zero probability");
    log_sum += std::log(p);
    prefix.push_back(token);
  }
  return std::exp(-log_sum / static_cast<double>(tokens.size()));
}

double perplexity(const LanguageModel& model, std::span<const TokenId> tokens) {
  return perplexity(model, std::span<const TokenId>{}, tokens);
}

namespace {

constexpr const char* kModelMagic = "specdec-ngram";
constexpr int kModelVersion = 1;

std::string escape_symbol(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_symbol(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    switch (s[++i]) {
      case '\\': out += '\\'; break;
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 't': out += '\t'; break;
      default: throw FormatError("bad escape in symbol");
    }
  }
  return out;
}

// Shortest decimal that round-trips the double exactly.
std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string read_line_or_throw(std::istream& in, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(std::string("truncated file: expected ") + what);
  return line;
}

}  // namespace

void save_model(const NGramModel& model, const std::string& path,
                const std::string& config_json) {
  std::ostringstream out;
  out << kModelMagic << " v" << kModelVersion << "\n";
  out << "config " << (config_json.empty() ? "{}" : config_json) << "\n";
  out << "order " << model.order() << "\n";
  out << "alpha " << format_double(model.alpha()) << "\n";
  out << "vocab " << model.vocab().size() << "\n";
  for (const auto& s : model.vocab().symbols()) out << escape_symbol(s) << "\n";
  out << "contexts " << model.counts().size() << "\n";
  for (const auto& [ctx, row] : model.counts()) {
    for (std::size_t i = 0; i < ctx.size(); ++i) out << (i ? " " : "") << ctx[i];
    out << " |";
    for (const auto& [token, count] : row) out << " " << token << ":" << count;
    out << "\n";
  }
  out << "end\n";
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for writing: " + path);
  file << out.str();
  if (!file) throw IoError("write failed: " + path);
}

NGramModel load_model(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open for reading: " + path);

  std::string header = read_line_or_throw(file, "header");
  if (header != std::string(kModelMagic) + " v" + std::to_string(kModelVersion))
    throw FormatError("bad magic or unsupported version: '" + header + "'");
  const std::string config_line = read_line_or_throw(file, "config");
  if (config_line.rfind("config ", 0) != 0) throw FormatError("expected 'config' line");

  auto parse_kv = [&](const char* key) {
    std::istringstream line(read_line_or_throw(file, key));
    std::string k;
    std::string v;
    line >> k >> v;
    if (k != key || v.empty()) throw FormatError(std::string("expected '") + key + "' line");
    return v;
  };

  const std::uint32_t order = static_cast<std::uint32_t>(std::stoul(parse_kv("order")));
  const double alpha = std::stod(parse_kv("alpha"));
  const std::uint32_t vocab_size = static_cast<std::uint32_t>(std::stoul(parse_kv("vocab")));

  Vocab vocab;
  for (std::uint32_t i = 0; i < vocab_size; ++i) {
    const std::string sym = unescape_symbol(read_line_or_throw(file, "vocab symbol"));
    if (i == 0) {
      if (sym != Vocab::kBosSymbol) throw FormatError("vocab id 0 must be the BOS symbol");
      continue;
    }
    if (vocab.add(sym) != i) throw FormatError("duplicate vocab symbol: '" + sym + "'");
  }

  const std::uint64_t n_contexts = std::stoull(parse_kv("contexts"));
  NGramModel::CountTable counts;
  for (std::uint64_t c = 0; c < n_contexts; ++c) {
    std::istringstream line(read_line_or_throw(file, "context row"));
    NGramModel::Context ctx(order);
    for (auto& t : ctx) {
      if (!(line >> t)) throw FormatError("context row too short");
      if (t >= vocab_size) throw FormatError("context token out of range");
    }
    std::string sep;
    if (!(line >> sep) || sep != "|") throw FormatError("missing '|' separator in context row");
    auto& row = counts[ctx];
    std::string pair;
    while (line >> pair) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) throw FormatError("bad token:count pair: '" + pair + "'");
      const auto token = static_cast<TokenId>(std::stoul(pair.substr(0, colon)));
      if (token >= vocab_size) throw FormatError("count token out of range");
      row[token] = std::stoull(pair.substr(colon + 1));
    }
    if (row.empty()) throw FormatError("context row with no counts");
  }
  if (read_line_or_throw(file, "end marker") != "end") throw FormatError("missing end marker");
  return NGramModel(order, std::move(vocab), alpha, std::move(counts));
}

}  // namespace specdec
