#include <doctest.h>

#include <cmath>
#include <vector>

#include "specdec/dist.hpp"
#include "specdec/errors.hpp"
#include "specdec/rng.hpp"

using namespace specdec;

namespace {

CategoricalDist random_dist(std::uint32_t v, RngStream& rng) {
  std::vector<double> w(v);
  for (auto& x : w) x = -std::log(1.0 - rng.next_double());
  return normalize(w);
}

double empirical_tv(const std::vector<std::uint64_t>& counts, const CategoricalDist& dist,
                    std::uint64_t n) {
  double tv = 0.0;
  for (std::uint32_t i = 0; i < dist.vocab_size(); ++i)
    tv += std::fabs(static_cast<double>(counts[i]) / static_cast<double>(n) - dist[i]);
  return 0.5 * tv;
}

}  // namespace

TEST_SUITE_BEGIN("dist");

TEST_CASE("normalize divides by the weight sum") {
  CHECK(normalize({2, 2}).probs() == std::vector<double>{0.5, 0.5});
  CHECK(normalize({0.4, 0}).probs() == std::vector<double>{1.0, 0.0});
  const auto d = normalize({1, 2, 1});
  CHECK(d[0] == doctest::Approx(0.25));
  CHECK(d[1] == doctest::Approx(0.5));
  CHECK(d[2] == doctest::Approx(0.25));
}

TEST_CASE("normalize rejects all-zero and invalid weights") {
  CHECK_THROWS_AS(normalize({0.0, 0.0}), AllZeroError);
  CHECK_THROWS_AS(normalize({-1.0, 2.0}), Error);
  CHECK_THROWS_AS(normalize({}), Error);
}

TEST_CASE("construction renormalizes within tolerance only") {
  CHECK_NOTHROW(CategoricalDist({0.5, 0.5 + 5e-10}));
  CHECK_THROWS_AS(CategoricalDist({0.5, 0.6}), Error);
  const CategoricalDist d({0.5, 0.5 + 5e-10});
  double total = 0.0;
  for (double p : d.probs()) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("sample: degenerate distribution always returns its support") {
  CategoricalDist d({1.0, 0.0});
  RngStream rng(7, 0);
  for (int i = 0; i < 1000; ++i) CHECK(sample(d, rng) == 0);
}

TEST_CASE("sample: fair coin frequency within binomial 3-sigma at 1e6 draws") {
  CategoricalDist d({0.5, 0.5});
  RngStream rng(42, 0);
  std::uint64_t zeros = 0;
  constexpr std::uint64_t kDraws = 1'000'000;
  for (std::uint64_t i = 0; i < kDraws; ++i)
    if (sample(d, rng) == 0) ++zeros;
  const double freq = static_cast<double>(zeros) / kDraws;
  CHECK(freq >= 0.497);
  CHECK(freq <= 0.503);
}

TEST_CASE("sample: fixed seed reproduces the sequence") {
  CategoricalDist d({0.2, 0.8});
  RngStream a(42, 3);
  RngStream b(42, 3);
  for (int i = 0; i < 200; ++i) CHECK(sample(d, a) == sample(d, b));
}

TEST_CASE("sample never returns a zero-probability token") {
  RngStream rng(11, 0);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> w(8, 0.0);
    w[1] = 0.3;
    w[5] = 0.7;
    CategoricalDist d(std::move(w));
    for (int i = 0; i < 500; ++i) {
      const TokenId t = sample(d, rng);
      CHECK((t == 1 || t == 5));
    }
  }
}

TEST_CASE("tv_distance examples") {
  CategoricalDist p({0.6, 0.4});
  CategoricalDist q({0.2, 0.8});
  CHECK(tv_distance(p, p) == 0.0);
  CHECK(tv_distance(CategoricalDist({1, 0}), CategoricalDist({0, 1})) == 1.0);
  CHECK(tv_distance(p, q) == doctest::Approx(0.4));
  CHECK_THROWS_AS(tv_distance(p, CategoricalDist({1, 0, 0})), VocabMismatchError);
}

TEST_CASE("tv_distance is a metric on random triples") {
  RngStream rng(99, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto a = random_dist(6, rng);
    const auto b = random_dist(6, rng);
    const auto c = random_dist(6, rng);
    const double ab = tv_distance(a, b);
    CHECK(ab == doctest::Approx(tv_distance(b, a)));
    CHECK(tv_distance(a, a) == 0.0);
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
    CHECK(ab <= tv_distance(a, c) + tv_distance(c, b) + 1e-12);
  }
}

TEST_CASE("residual_dist examples") {
  const auto r1 = residual_dist(CategoricalDist({0.6, 0.4}), CategoricalDist({0.2, 0.8}));
  CHECK(r1[0] == doctest::Approx(1.0));
  CHECK(r1[1] == doctest::Approx(0.0));

  const auto r2 = residual_dist(CategoricalDist({0.5, 0.5}), CategoricalDist({0.5, 0.5}));
  CHECK(r2[0] == doctest::Approx(0.5));
  CHECK(r2[1] == doctest::Approx(0.5));

  const auto r3 =
      residual_dist(CategoricalDist({0.5, 0.3, 0.2}), CategoricalDist({0.1, 0.5, 0.4}));
  CHECK(r3[0] == doctest::Approx(1.0));
  CHECK(r3[1] == doctest::Approx(0.0));
  CHECK(r3[2] == doctest::Approx(0.0));
}

TEST_CASE("residual support is zero where p <= q and sums to one") {
  RngStream rng(5, 0);
  for (int rep = 0; rep < 100; ++rep) {
    const auto p = random_dist(9, rng);
    const auto q = random_dist(9, rng);
    const auto r = residual_dist(p, q);
    double total = 0.0;
    for (std::uint32_t i = 0; i < 9; ++i) {
      if (p[i] <= q[i]) CHECK(r[i] == 0.0);
      total += r[i];
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("sample_residual agrees with materialized residual in distribution") {
  RngStream rng(123, 0);
  const auto p = random_dist(8, rng);
  const auto q = random_dist(8, rng);
  const auto r = residual_dist(p, q);
  constexpr std::uint64_t kDraws = 200'000;
  std::vector<std::uint64_t> counts(8, 0);
  for (std::uint64_t i = 0; i < kDraws; ++i) counts[sample_residual(p, q, rng)] += 1;
  CHECK(empirical_tv(counts, r, kDraws) < 0.01);
}

TEST_CASE("sprinter_mixture endpoints and arithmetic") {
  CategoricalDist p({0.6, 0.4});
  CategoricalDist q({0.2, 0.8});
  const auto at0 = sprinter_mixture(p, q, 0.0);
  CHECK(at0[0] == doctest::Approx(0.6));
  const auto at1 = sprinter_mixture(p, q, 1.0);
  CHECK(at1[1] == doctest::Approx(0.8));
  const auto mid = sprinter_mixture(p, q, 0.2);
  CHECK(mid[0] == doctest::Approx(0.52));
  CHECK(mid[1] == doctest::Approx(0.48));
}

TEST_CASE("mixture TV identity: tv(p, mix) = eta_fp * tv(p, q)") {
  RngStream rng(77, 0);
  for (int rep = 0; rep < 50; ++rep) {
    const auto p = random_dist(10, rng);
    const auto q = random_dist(10, rng);
    const double base = tv_distance(p, q);
    for (int k = 0; k <= 10; ++k) {
      const double eta = k / 10.0;
      const double got = tv_distance(p, sprinter_mixture(p, q, eta));
      CHECK(std::fabs(got - eta * base) < 1e-12);
    }
  }
}

TEST_CASE("sampling chi-square proxy: empirical TV below 0.005 at 1e6 draws") {
  RngStream rng(2024, 0);
  for (const std::uint32_t v : {2u, 7u, 16u}) {
    const auto d = random_dist(v, rng);
    constexpr std::uint64_t kDraws = 1'000'000;
    std::vector<std::uint64_t> counts(v, 0);
    for (std::uint64_t i = 0; i < kDraws; ++i) counts[sample(d, rng)] += 1;
    CHECK(empirical_tv(counts, d, kDraws) < 0.005);
  }
}

TEST_CASE("rng streams: reproducible and pairwise distinct") {
  RngStream a(1, 2);
  RngStream b(1, 2);
  RngStream c(1, 3);
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    if (x != c.next_u64()) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("rng derive: children reproducible, distinct from parent") {
  RngStream parent(9, 1);
  RngStream child1 = parent.derive(0);
  RngStream child2 = parent.derive(0);
  RngStream child3 = parent.derive(1);
  bool differs = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = child1.next_u64();
    CHECK(x == child2.next_u64());
    if (x != child3.next_u64()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("entropy of the fair coin is log 2") {
  CHECK(entropy(CategoricalDist({0.5, 0.5})) == doctest::Approx(std::log(2.0)));
  CHECK(entropy(CategoricalDist({1.0, 0.0})) == 0.0);
}

TEST_SUITE_END();
