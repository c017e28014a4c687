#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "specdec/errors.hpp"
#include "specdec/lm.hpp"

using namespace specdec;

namespace {

std::string temp_path(const char* name) {
  return std::string("/tmp/specdec_test_") + name;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE_BEGIN("lm");

TEST_CASE("tokenize whitespace mode: first-seen ordering with BOS at 0") {
  const auto t = tokenize("a b a", TokenizeMode::whitespace);
  CHECK(t.tokens == std::vector<TokenId>{1, 2, 1});
  CHECK(t.vocab.size() == 3);
  CHECK(t.vocab.symbol(0) == Vocab::kBosSymbol);
  CHECK(t.vocab.symbol(1) == "a");
  CHECK(t.vocab.symbol(2) == "b");
}

TEST_CASE("tokenize char mode") {
  const auto t = tokenize("ab", TokenizeMode::character);
  CHECK(t.tokens == std::vector<TokenId>{1, 2});
}

TEST_CASE("tokenize empty text raises EmptyCorpus") {
  CHECK_THROWS_AS(tokenize("", TokenizeMode::whitespace), EmptyCorpusError);
  CHECK_THROWS_AS(tokenize("   \n ", TokenizeMode::whitespace), EmptyCorpusError);
}

TEST_CASE("detokenize round-trips up to whitespace normalization") {
  const std::string text = "the cat  sat\non the mat";
  const auto t = tokenize(text, TokenizeMode::whitespace);
  CHECK(detokenize(t.vocab, t.tokens, TokenizeMode::whitespace) == "the cat sat on the mat");

  const std::string raw = "ab cd\n";
  const auto c = tokenize(raw, TokenizeMode::character);
  CHECK(detokenize(c.vocab, c.tokens, TokenizeMode::character) == raw);
}

TEST_CASE("tokenize_with: unknown symbols error or drop") {
  const auto t = tokenize("a b", TokenizeMode::whitespace);
  CHECK_THROWS_AS(tokenize_with(t.vocab, "a z", TokenizeMode::whitespace, false),
                  VocabMismatchError);
  CHECK(tokenize_with(t.vocab, "a z b", TokenizeMode::whitespace, true) ==
        std::vector<TokenId>{1, 2});
}

TEST_CASE("train_ngram on 'abababab': next after a is b with probability 1") {
  const auto t = tokenize("abababab", TokenizeMode::character);
  const auto m = train_ngram(t, 1, 0.0);
  const TokenId a = *t.vocab.find("a");
  const TokenId b = *t.vocab.find("b");
  const std::vector<TokenId> prefix{a};
  const auto d = m.next_dist(prefix);
  CHECK(d[b] == doctest::Approx(1.0));
  CHECK(d[a] == doctest::Approx(0.0));
}

TEST_CASE("train_ngram unseen context with alpha=1 is uniform") {
  const auto t = tokenize("ab", TokenizeMode::character);
  const auto m = train_ngram(t, 1, 1.0);
  const TokenId b = *t.vocab.find("b");
  const std::vector<TokenId> prefix{b};  // 'b' never appears as a context
  const auto d = m.next_dist(prefix);
  for (std::uint32_t i = 0; i < d.vocab_size(); ++i)
    CHECK(d[i] == doctest::Approx(1.0 / d.vocab_size()));
}

TEST_CASE("train_ngram on 'aab': after a both continuations are equally likely") {
  const auto t = tokenize("aab", TokenizeMode::character);
  const auto m = train_ngram(t, 1, 0.0);
  const TokenId a = *t.vocab.find("a");
  const TokenId b = *t.vocab.find("b");
  const std::vector<TokenId> prefix{a};
  const auto d = m.next_dist(prefix);
  CHECK(d[a] == doctest::Approx(0.5));
  CHECK(d[b] == doctest::Approx(0.5));
}

TEST_CASE("train_ngram rejects a corpus shorter than the order") {
  const auto t = tokenize("ab", TokenizeMode::character);
  CHECK_THROWS_AS(train_ngram(t, 2, 0.1), CorpusTooShortError);
}

TEST_CASE("synthetic model ignores the prefix when fixed") {
  SyntheticModel m(CategoricalDist({0.2, 0.8}));
  const std::vector<TokenId> a{};
  const std::vector<TokenId> b{1, 0, 1, 1};
  CHECK(m.next_dist(a)[1] == doctest::Approx(0.8));
  CHECK(m.next_dist(b)[1] == doctest::Approx(0.8));
}

TEST_CASE("synthetic model with a per-length table clamps at the last entry") {
  std::vector<CategoricalDist> table;
  table.emplace_back(CategoricalDist({1.0, 0.0}));
  table.emplace_back(CategoricalDist({0.0, 1.0}));
  SyntheticModel m(table);
  const std::vector<TokenId> empty{};
  const std::vector<TokenId> one{0};
  const std::vector<TokenId> many{0, 1, 0};
  CHECK(m.next_dist(empty)[0] == 1.0);
  CHECK(m.next_dist(one)[1] == 1.0);
  CHECK(m.next_dist(many)[1] == 1.0);
}

TEST_CASE("next_dist depends only on the last k tokens") {
  const auto t = tokenize("the cat sat on the mat and the cat ran", TokenizeMode::whitespace);
  const auto m = train_ngram(t, 2, 0.1);
  const std::vector<TokenId> long_prefix{5, 4, 3, 1, 2};
  const std::vector<TokenId> short_prefix{1, 2};
  const auto d1 = m.next_dist(long_prefix);
  const auto d2 = m.next_dist(short_prefix);
  for (std::uint32_t i = 0; i < d1.vocab_size(); ++i) CHECK(d1[i] == d2[i]);
}

TEST_CASE("short prefixes back off to BOS padding") {
  const auto t = tokenize("a b c", TokenizeMode::whitespace);
  const auto m = train_ngram(t, 2, 0.5);
  // Empty prefix uses the all-BOS context, which was trained on position 0.
  const std::vector<TokenId> empty{};
  const auto d = m.next_dist(empty);
  const TokenId a = *t.vocab.find("a");
  // Context (BOS, BOS) saw exactly one continuation: 'a'.
  CHECK(d[a] > d[*t.vocab.find("b")]);
}

TEST_CASE("perplexity of the uniform model is the vocab size") {
  SyntheticModel m(CategoricalDist::uniform(8));
  const std::vector<TokenId> tokens{0, 1, 2, 3, 4};
  CHECK(perplexity(m, tokens) == doctest::Approx(8.0));
}

TEST_CASE("perplexity of a deterministic model is 1") {
  SyntheticModel m(CategoricalDist({1.0, 0.0}));
  const std::vector<TokenId> tokens{0, 0, 0};
  CHECK(perplexity(m, tokens) == doctest::Approx(1.0));
}

TEST_CASE("perplexity with per-step probability 0.5 is 2") {
  SyntheticModel m(CategoricalDist({0.5, 0.5}));
  const std::vector<TokenId> tokens(10, 1);
  CHECK(perplexity(m, tokens) == doctest::Approx(2.0));
}

TEST_CASE("perplexity raises ZeroProbability on an impossible transition") {
  const auto t = tokenize("abab", TokenizeMode::character);
  const auto m = train_ngram(t, 1, 0.0);
  const TokenId a = *t.vocab.find("a");
  const std::vector<TokenId> tokens{a, a};  // 'a' never follows 'a'
  CHECK_THROWS_AS(perplexity(m, tokens), ZeroProbabilityError);
}

TEST_CASE("save/load round-trip preserves next_dist everywhere") {
  const auto t = tokenize("abab", TokenizeMode::character);
  const auto m = train_ngram(t, 1, 0.1);
  const auto path = temp_path("model_roundtrip");
  save_model(m, path);
  const auto loaded = load_model(path);
  CHECK(loaded.order() == m.order());
  CHECK(loaded.alpha() == m.alpha());
  CHECK(loaded.vocab() == m.vocab());
  for (TokenId c = 0; c < m.vocab().size(); ++c) {
    const std::vector<TokenId> prefix{c};
    const auto d1 = m.next_dist(prefix);
    const auto d2 = loaded.next_dist(prefix);
    for (std::uint32_t i = 0; i < d1.vocab_size(); ++i) CHECK(d1[i] == d2[i]);
  }
  std::remove(path.c_str());
}

TEST_CASE("two saves of the same model are byte-identical") {
  const auto t = tokenize("the cat sat on the mat", TokenizeMode::whitespace);
  const auto m = train_ngram(t, 2, 0.1);
  const auto path1 = temp_path("model_bytes1");
  const auto path2 = temp_path("model_bytes2");
  save_model(m, path1);
  save_model(m, path2);
  CHECK(read_file(path1) == read_file(path2));
  CHECK(!read_file(path1).empty());
  std::remove(path1.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("truncated model file raises FormatError") {
  const auto t = tokenize("abab", TokenizeMode::character);
  const auto m = train_ngram(t, 1, 0.1);
  const auto path = temp_path("model_truncated");
  save_model(m, path);
  const std::string full = read_file(path);
  std::ofstream out(path, std::ios::binary);
  out << full.substr(0, full.size() / 2);
  out.close();
  CHECK_THROWS_AS(load_model(path), FormatError);
  std::remove(path.c_str());
}

TEST_CASE("load rejects a bad magic line") {
  const auto path = temp_path("model_badmagic");
  std::ofstream out(path, std::ios::binary);
  out << "not-a-model v9\n";
  out.close();
  CHECK_THROWS_AS(load_model(path), FormatError);
  std::remove(path.c_str());
}

TEST_CASE("training is deterministic in (corpus, k, alpha)") {
  const auto t = tokenize("a b c a b c a b", TokenizeMode::whitespace);
  const auto m1 = train_ngram(t, 2, 0.3);
  const auto m2 = train_ngram(t, 2, 0.3);
  CHECK(m1.counts() == m2.counts());
}

TEST_CASE("demo corpus: draft and target disagree somewhere (pairing property)") {
  std::ifstream in(std::string(SPECDEC_DATA_DIR) + "/corpus.txt");
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto t = tokenize(text, TokenizeMode::whitespace);
  const auto draft = train_ngram(t, 1, 0.1);
  const auto target = train_ngram(t, 3, 0.1);
  double max_tv = 0.0;
  for (std::size_t start = 0; start + 3 < t.tokens.size() && start < 600; start += 7) {
    const std::span<const TokenId> prefix(t.tokens.data() + start, 3);
    max_tv = std::max(max_tv, tv_distance(target.next_dist(prefix), draft.next_dist(prefix)));
  }
  CHECK(max_tv > 0.0);
}

TEST_SUITE_END();
