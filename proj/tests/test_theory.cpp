#include <doctest.h>

#include <cmath>
#include <vector>

#include "specdec/errors.hpp"
#include "specdec/rng.hpp"
#include "specdec/theory.hpp"

using namespace specdec;

TEST_SUITE_BEGIN("theory");

TEST_CASE("token_count_pmf: perfect verifier never rejects early") {
  const ScenarioParams params{1.0, 0.3, 5, 0.1};
  for (std::uint64_t i = 0; i < 5; ++i) CHECK(token_count_pmf(params, i) == 0.0);
  CHECK(token_count_pmf(params, 5) == doctest::Approx(0.7));
}

TEST_CASE("token_count_pmf: formula substitution at (0.9, 0.2, r=5)") {
  const ScenarioParams params{0.9, 0.2, 5, 0.1};
  CHECK(token_count_pmf(params, 0) == doctest::Approx(0.1));
  CHECK(token_count_pmf(params, 1) == doctest::Approx(0.9 * 0.1));
  CHECK(token_count_pmf(params, 5) == doctest::Approx(std::pow(0.9, 5) * 0.8));
  CHECK(token_count_pmf(params, 7) ==
        doctest::Approx(std::pow(0.9, 5) * std::pow(0.2, 2) * 0.8));
}

TEST_CASE("token_count_pmf sums to one across a parameter grid") {
  for (const double tp : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (const double fp : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      for (const std::uint32_t r : {1u, 3u, 5u, 10u}) {
        const ScenarioParams params{tp, fp, r, 0.1};
        // Closed-form series: sum_{i<r} + tp^r * sum_{j>=0} fp^j (1-fp) = 1.
        double total = 0.0;
        for (std::uint64_t i = 0; i < r; ++i) total += token_count_pmf(params, i);
        total += std::pow(tp, r);
        CHECK(std::fabs(total - 1.0) < 1e-9);
      }
    }
  }
}

TEST_CASE("expected_tokens boundary and derived values") {
  CHECK(expected_tokens({1.0, 0.0, 5, 0.1}) == doctest::Approx(5.0));
  CHECK(expected_tokens({0.9, 0.2, 5, 0.1}) == doctest::Approx(3.8332).epsilon(1e-4));
}

TEST_CASE("expected_tokens gap bound: fp=0.5 vs fp=0 never exceeds 1 at r=5") {
  for (int k = 0; k <= 100; ++k) {
    const double tp = k / 100.0;
    const double gap =
        expected_tokens({tp, 0.5, 5, 0.1}) - expected_tokens({tp, 0.0, 5, 0.1});
    CHECK(gap >= 0.0);
    CHECK(gap <= 1.0 + 1e-12);
  }
}

TEST_CASE("expected_tokens matches the truncated pmf mean across a grid") {
  for (const double tp : {0.1, 0.5, 0.9, 1.0}) {
    for (const double fp : {0.0, 0.2, 0.6, 0.9}) {
      for (const std::uint32_t r : {1u, 3u, 5u, 10u}) {
        const ScenarioParams params{tp, fp, r, 0.1};
        double mean = 0.0;
        double mass = 0.0;
        for (std::uint64_t i = 0; i < 4000 && 1.0 - mass > 1e-13; ++i) {
          const double p = token_count_pmf(params, i);
          mean += static_cast<double>(i) * p;
          mass += p;
        }
        CHECK(expected_tokens(params) == doctest::Approx(mean).epsilon(1e-6));
      }
    }
  }
}

TEST_CASE("expected_tokens is monotone in both rates") {
  double prev = -1.0;
  for (const double tp : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double v = expected_tokens({tp, 0.3, 5, 0.1});
    CHECK(v >= prev);
    prev = v;
  }
  prev = -1.0;
  for (const double fp : {0.0, 0.2, 0.4, 0.6, 0.8}) {
    const double v = expected_tokens({0.7, fp, 5, 0.1});
    CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("expected_tokens continuity at the eta_tp -> 1 limit") {
  for (const double fp : {0.0, 0.3, 0.7}) {
    for (const std::uint32_t r : {1u, 5u, 10u}) {
      const double at_limit = expected_tokens({1.0, fp, r, 0.1});
      const double near_limit = expected_tokens({1.0 - 1e-8, fp, r, 0.1});
      CHECK(std::fabs(at_limit - near_limit) < 1e-6);
    }
  }
}

TEST_CASE("expected_tokens diverges at eta_fp = 1") {
  CHECK_THROWS_AS(expected_tokens({0.9, 1.0, 5, 0.1}), DivergentError);
  CHECK_THROWS_AS(expected_stop_time({0.9, 1.0, 5, 0.1}), DivergentError);
}

TEST_CASE("expected_stop_time boundary and derived values") {
  CHECK(expected_stop_time({1.0, 0.0, 5, 0.1}) == doctest::Approx(0.6));
  CHECK(expected_stop_time({0.9, 0.2, 5, 0.1}) == doctest::Approx(0.48332).epsilon(1e-4));
}

TEST_CASE("expected_stop_time equals t_d * (E[N] + 1)") {
  for (const double tp : {0.2, 0.6, 1.0}) {
    for (const double fp : {0.0, 0.4, 0.8}) {
      const ScenarioParams params{tp, fp, 4, 0.25};
      CHECK(expected_stop_time(params) ==
            doctest::Approx(params.t_d * (expected_tokens(params) + 1.0)));
    }
  }
}

TEST_CASE("stop-time gap bound: fp=0.5 vs fp=0 never exceeds t_d at r=5") {
  const double t_d = 0.1;
  for (int k = 0; k <= 100; ++k) {
    const double tp = k / 100.0;
    const double gap =
        expected_stop_time({tp, 0.5, 5, t_d}) - expected_stop_time({tp, 0.0, 5, t_d});
    CHECK(gap >= 0.0);
    CHECK(gap <= t_d + 1e-12);
  }
}

TEST_CASE("expected_stop_time continuity at the eta_tp -> 1 limit") {
  for (const double fp : {0.0, 0.5}) {
    const double at_limit = expected_stop_time({1.0, fp, 5, 0.1});
    const double near_limit = expected_stop_time({1.0 - 1e-8, fp, 5, 0.1});
    CHECK(std::fabs(at_limit - near_limit) < 1e-6);
  }
}

TEST_CASE("acceptance rates: examples") {
  const CategoricalDist p({0.6, 0.4});
  const CategoricalDist q({0.2, 0.8});
  CHECK(acceptance_rate_sd(p, p) == doctest::Approx(1.0));
  CHECK(acceptance_rate_sd(CategoricalDist({1, 0}), CategoricalDist({0, 1})) == 0.0);
  CHECK(acceptance_rate_sd(p, q) == doctest::Approx(0.6));
  CHECK(acceptance_rate_sprinter(p, q, 0.0) == doctest::Approx(acceptance_rate_sd(p, q)));
  CHECK(acceptance_rate_sprinter(p, q, 1.0) == doctest::Approx(1.0));
  CHECK(acceptance_rate_sprinter(p, q, 0.2) == doctest::Approx(0.68));
}

TEST_CASE("sprinter acceptance dominates sd acceptance") {
  RngStream rng(61, 0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> wp(6), wq(6);
    for (auto& x : wp) x = rng.next_double() + 0.01;
    for (auto& x : wq) x = rng.next_double() + 0.01;
    const auto p = normalize(wp);
    const auto q = normalize(wq);
    for (const double fp : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double sd = acceptance_rate_sd(p, q);
      const double sp = acceptance_rate_sprinter(p, q, fp);
      CHECK(sp >= sd - 1e-12);
      if (fp == 0.0) CHECK(sp == doctest::Approx(sd));
      if (fp > 0.0 && tv_distance(p, q) > 0.0) CHECK(sp > sd);
    }
  }
}

TEST_CASE("flops formulas: boundary, paper rates, and asymptotics") {
  CostModel cost;
  cost.f_d = 1.0;
  cost.f_t = 9.0;
  cost.f_v = 0.001;
  CHECK(flops_savings(1, cost) == doctest::Approx(-cost.f_v));

  // Per-token rates derived from per-20-token model costs: 8.01e9 / 20 and
  // 64.66e9 / 20.
  CostModel rates;
  rates.f_d = 0.4005e9;
  rates.f_t = 3.233e9;
  rates.f_v = 0.0;
  CHECK(flops_sd(20, rates) == doctest::Approx(72.67e9).epsilon(1e-6));
  CHECK(flops_sprinter(20, rates) == doctest::Approx(11.243e9).epsilon(1e-6));
  CHECK(std::fabs(flops_sd(20, rates) - 72.67e9) < 0.01e9);
  CHECK(std::fabs(flops_sprinter(20, rates) - 11.24e9) < 0.01e9);
  // The implied ratio is ~6.5x, not the headline 8x.
  CHECK(flops_sd(20, rates) / flops_sprinter(20, rates) == doctest::Approx(6.46).epsilon(0.01));

  // With f_v << f_d << f_t the savings approach (gamma - 1) * f_t.
  CostModel tiny;
  tiny.f_d = 1e-3;
  tiny.f_t = 1.0;
  tiny.f_v = 1e-9;
  CHECK(flops_savings(20, tiny) == doctest::Approx(19.0).epsilon(1e-6));
}

TEST_CASE("sprinter_token_dist matches the core mixture") {
  const CategoricalDist p({0.6, 0.4});
  const CategoricalDist q({0.2, 0.8});
  const auto a = sprinter_token_dist(p, q, 0.3);
  const auto b = sprinter_mixture(p, q, 0.3);
  CHECK(a[0] == b[0]);
  CHECK(a[1] == b[1]);
}

TEST_SUITE_END();
