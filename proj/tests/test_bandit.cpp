#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "colbandit/bandit.hpp"
#include "colbandit/errors.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace colbandit;

namespace {

BanditConfig config(std::size_t k, ExploreMode mode = ExploreMode::EpsilonGreedy,
                    std::uint64_t seed = 0) {
  BanditConfig c;
  c.k = k;
  c.explore = mode;
  c.seed = seed;
  return c;
}

std::vector<std::size_t> sorted(std::vector<std::size_t> v) {
  std::sort(v.begin(), v.end());
  return v;
}

DecisionState interval(double lcb, double ucb) {
  DecisionState s;
  s.lcb = lcb;
  s.ucb = ucb;
  return s;
}

}  // namespace

TEST_SUITE("bandit") {
  TEST_CASE("hard bounds alone can separate before any reveal") {
    // Row intervals [2.0, 3.0] and [0.0, 1.5] from four cells each.
    const auto o = test::oracle_of({{0.6f, 0.7f, 0.55f, 0.65f}, {0.1f, 0.2f, 0.3f, 0.1f}});
    CellBounds b(2, 4, 0.0, 0.0);
    b.lo = {0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0};
    b.hi = {0.75, 0.75, 0.75, 0.75, 0.375, 0.375, 0.375, 0.375};
    for (auto mode : {ExploreMode::StaticWarmup, ExploreMode::UniformRow}) {
      const auto r = run(o, b, config(1, mode));
      CHECK(r.iterations == 1);
      CHECK(r.reveals.empty());
      CHECK(r.coverage == 0.0);
      CHECK(r.topk == std::vector<std::size_t>{0});
      CHECK(r.terminated_by == Termination::Separation);
    }
  }

  TEST_CASE("epsilon-greedy initialises one cell per row before the first check") {
    // Row intervals [2.0, 3.0] and [0.0, 1.5] from four cells each.
    const auto o = test::oracle_of({{0.6f, 0.7f, 0.55f, 0.65f}, {0.1f, 0.2f, 0.3f, 0.1f}});
    CellBounds b(2, 4, 0.0, 0.0);
    b.lo = {0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0};
    b.hi = {0.75, 0.75, 0.75, 0.75, 0.375, 0.375, 0.375, 0.375};
    const auto r = run(o, b, config(1));
    CHECK(r.reveals.size() == 2);
    CHECK(r.reveals[0].row == 0);
    CHECK(r.reveals[1].row == 1);
    CHECK(r.topk == std::vector<std::size_t>{0});
  }

  TEST_CASE("hard-only runs return the exact top-K") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto o = test::random_oracle(15, 12, seed);
      const auto b = CellBounds::generic(o);
      for (auto mode : {ExploreMode::EpsilonGreedy, ExploreMode::StaticWarmup, ExploreMode::UniformRow}) {
        for (std::size_t k : {1u, 3u, 7u}) {
          auto c = config(k, mode, seed);
          c.radius.hard_only = true;
          c.gamma_init = 0.1;
          const auto r = run(o, b, c);
          CHECK(sorted(r.topk) == sorted(exact_topk(o, k)));
          CHECK(r.terminated_by == Termination::Separation);
        }
      }
    }
  }

  TEST_CASE("separation certified by hard bounds is exact on replay") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      const auto o = test::random_oracle(10, 8, seed);
      const auto b = CellBounds::generic(o);
      auto c = config(3, ExploreMode::EpsilonGreedy, seed);
      c.radius.hard_only = true;
      const auto r = run(o, b, c);
      ObservationLedger ledger(10, 8);
      for (const auto& e : r.reveals) ledger.reveal(o, e.row, e.col);
      double min_in = kInfinity;
      double max_out = -kInfinity;
      double min_in_lcb = kInfinity;
      double max_out_ucb = -kInfinity;
      const std::set<std::size_t> in(r.topk.begin(), r.topk.end());
      for (std::size_t i = 0; i < 10; ++i) {
        const auto h = hard_bounds(ledger, b, i);
        if (in.count(i)) {
          min_in = std::min(min_in, o.full_score(i));
          min_in_lcb = std::min(min_in_lcb, h.lo);
        } else {
          max_out = std::max(max_out, o.full_score(i));
          max_out_ucb = std::max(max_out_ucb, h.hi);
        }
      }
      CHECK(min_in_lcb >= max_out_ucb);
      CHECK(min_in >= max_out);
    }
  }

  TEST_CASE("K = N stops immediately and K = 0 returns nothing") {
    const auto o = test::random_oracle(4, 5, 1);
    const auto b = CellBounds::generic(o);
    auto r = run(o, b, config(4));
    CHECK(r.reveals.empty());
    CHECK(r.iterations == 1);
    CHECK(sorted(r.topk) == std::vector<std::size_t>{0, 1, 2, 3});
    r = run(o, b, config(0));
    CHECK(r.topk.empty());
    CHECK(r.reveals.empty());
    CHECK_THROWS_AS(run(o, b, config(5)), UsageError);
  }

  TEST_CASE("run result invariants") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto o = test::random_oracle(20, 16, seed);
      const auto b = CellBounds::generic(o);
      for (auto mode : {ExploreMode::EpsilonGreedy, ExploreMode::StaticWarmup, ExploreMode::UniformRow}) {
        auto c = config(5, mode, seed);
        c.radius.alpha_ef = 0.05 + 0.3 * static_cast<double>(seed % 4);
        c.gamma_init = 0.05;
        const auto r = run(o, b, c);
        CHECK(r.topk.size() == 5);
        CHECK(std::set<std::size_t>(r.topk.begin(), r.topk.end()).size() == 5);
        CHECK(r.reveals.size() <= 20 * 16);
        CHECK(r.coverage == doctest::Approx(static_cast<double>(r.reveals.size()) / (20 * 16)));
        CHECK(r.terminated_by == Termination::Separation);
        std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
        for (const auto& e : r.reveals) {
          CHECK(e.value == o.maxsim(e.row, e.col));
          CHECK(seen.insert({e.row, e.col}).second);
        }
      }
    }
  }

  TEST_CASE("identical inputs give identical traces") {
    const auto o = test::random_oracle(25, 16, 3);
    const auto b = CellBounds::generic(o);
    auto c = config(5, ExploreMode::EpsilonGreedy, 77);
    c.radius.alpha_ef = 0.3;
    const auto a = run(o, b, c);
    const auto d = run(o, b, c);
    CHECK(a.topk == d.topk);
    CHECK(a.reveals == d.reveals);
    CHECK(a.iterations == d.iterations);
    c.seed = 78;
    CHECK_FALSE(run(o, b, c).reveals == a.reveals);
  }

  TEST_CASE("select_ambiguous picks the wider interval, ties to the winner") {
    CHECK(select_ambiguous(3, interval(0.0, 0.4), 7, interval(0.0, 0.9)) == 7);
    CHECK(select_ambiguous(3, interval(0.0, 0.5), 7, interval(1.0, 1.5)) == 3);
    CHECK(select_ambiguous(3, interval(2.0, 2.0), 7, interval(1.0, 1.1)) == 7);
  }

  TEST_CASE("select_token greedy branch takes the widest cell, lowest index on ties") {
    const auto o = test::oracle_of({{0.1f, 0.2f, 0.3f}});
    CellBounds b(1, 3, 0.0, 0.0);
    b.hi = {0.2, 0.9, 0.9};
    ObservationLedger ledger(1, 3);
    Rng rng(1);
    CHECK(select_token(ledger, b, 0, 0.0, false, rng) == 1);
    ledger.reveal(o, 0, 1);
    CHECK(select_token(ledger, b, 0, 0.0, false, rng) == 2);
    ledger.reveal(o, 0, 2);
    for (double eps : {0.0, 0.5, 1.0}) CHECK(select_token(ledger, b, 0, eps, false, rng) == 0);
    CHECK(select_token(ledger, b, 0, 0.0, true, rng) == 0);
    ledger.reveal(o, 0, 0);
    CHECK_THROWS_AS(select_token(ledger, b, 0, 0.0, false, rng), UsageError);
  }

  TEST_CASE("select_token with epsilon = 1 is uniform over unrevealed columns") {
    const auto o = test::random_oracle(1, 10, 2);
    CellBounds b(1, 10, 0.0, 1.0);
    b.hi[4] = 5.0;
    ObservationLedger ledger(1, 10);
    for (std::size_t t : {0u, 3u, 9u}) ledger.reveal(o, 0, t);
    const std::vector<std::size_t> open{1, 2, 4, 5, 6, 7, 8};
    for (bool uniform_only : {false, true}) {
      Rng rng(uniform_only ? 99 : 98);
      std::vector<double> counts(10, 0.0);
      constexpr int kDraws = 14000;
      for (int d = 0; d < kDraws; ++d) {
        counts[select_token(ledger, b, 0, uniform_only ? 0.0 : 1.0, uniform_only, rng)] += 1.0;
      }
      const double expected = static_cast<double>(kDraws) / open.size();
      double chi2 = 0.0;
      for (auto t : open) chi2 += (counts[t] - expected) * (counts[t] - expected) / expected;
      const double dof = static_cast<double>(open.size() - 1);
      CHECK(chi2 <= dof + 3.0 * std::sqrt(2.0 * dof));
      for (std::size_t t : {0u, 3u, 9u}) CHECK(counts[t] == 0.0);
    }
  }

  TEST_CASE("static warm-up reveals ceil(gamma N T) distinct cells") {
    const auto o = test::random_oracle(4, 8, 5);
    Rng rng(3);
    for (auto [gamma, expected] : std::vector<std::pair<double, std::size_t>>{
             {0.0, 0}, {0.25, 8}, {1.0, 32}, {0.1, 4}, {0.03, 1}}) {
      ObservationLedger ledger(4, 8);
      static_warmup(o, ledger, gamma, rng);
      CHECK(ledger.observed_count() == expected);
    }
    ObservationLedger bad(4, 8);
    CHECK_THROWS_AS(static_warmup(o, bad, 1.5, rng), UsageError);
  }

  TEST_CASE("static warm-up draws cells uniformly") {
    const auto o = test::random_oracle(3, 4, 5);
    std::vector<double> hits(12, 0.0);
    Rng rng(21);
    constexpr int kRuns = 6000;
    for (int run = 0; run < kRuns; ++run) {
      ObservationLedger ledger(3, 4);
      static_warmup(o, ledger, 0.25, rng);
      for (const auto& e : ledger.trace()) hits[e.row * 4 + e.col] += 1.0;
    }
    const double expected = kRuns * 3.0 / 12.0;
    double chi2 = 0.0;
    for (double h : hits) chi2 += (h - expected) * (h - expected) / expected;
    CHECK(chi2 <= 11.0 + 3.0 * std::sqrt(22.0));
  }

  TEST_CASE("init_one_per_row reveals exactly one cell in every row") {
    Rng rng(4);
    const auto o = test::random_oracle(5, 8, 6);
    ObservationLedger ledger(5, 8);
    init_one_per_row(o, ledger, rng);
    CHECK(ledger.observed_count() == 5);
    CHECK(ledger.coverage() == doctest::Approx(1.0 / 8));
    for (std::size_t i = 0; i < 5; ++i) CHECK(ledger.row_stats(i).count() == 1);

    const auto thin = test::random_oracle(6, 1, 7);
    ObservationLedger full(6, 1);
    init_one_per_row(thin, full, rng);
    CHECK(full.coverage() == 1.0);
  }

  TEST_CASE("ceil_fraction absorbs binary rounding") {
    CHECK(ceil_fraction(0.1, 30) == 3);
    CHECK(ceil_fraction(0.25, 32) == 8);
    CHECK(ceil_fraction(0.26, 32) == 9);
    CHECK(ceil_fraction(0.05, 32) == 2);
    CHECK(ceil_fraction(1.0, 32) == 32);
    CHECK(ceil_fraction(0.0, 32) == 0);
    CHECK(ceil_fraction(0.7, 10) == 7);
  }

  TEST_CASE("bandit config validation") {
    auto c = config(1);
    c.epsilon = 1.5;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.epsilon = 0.1;
    c.gamma_init = -0.1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.gamma_init = 0.0;
    c.radius.delta = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("smaller alpha spends less on average") {
    double low = 0.0;
    double high = 0.0;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      const auto o = test::random_oracle(30, 16, seed);
      const auto b = CellBounds::generic(o);
      auto c = config(5, ExploreMode::EpsilonGreedy, seed);
      c.radius.alpha_ef = 0.01;
      low += run(o, b, c).coverage;
      c.radius.alpha_ef = 1.0;
      high += run(o, b, c).coverage;
    }
    CHECK(low <= high);
  }
}
