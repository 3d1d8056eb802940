#include <algorithm>
#include <set>

#include "colbandit/bandit.hpp"
#include "colbandit/baselines.hpp"
#include "colbandit/errors.hpp"
#include "colbandit/eval.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace colbandit;

namespace {

std::set<std::size_t> cols_of_row(const RunResult& r, std::size_t row) {
  std::set<std::size_t> out;
  for (const auto& e : r.reveals) {
    if (e.row == row) out.insert(e.col);
  }
  return out;
}

}  // namespace

TEST_SUITE("baselines") {
  TEST_CASE("budget per row is ceil(gamma T)") {
    CHECK(BudgetConfig{0.5, 0}.cells_per_row(8) == 4);
    CHECK(BudgetConfig{0.05, 0}.cells_per_row(32) == 2);
    CHECK(BudgetConfig{1.0 / 32, 0}.cells_per_row(32) == 1);
    CHECK_THROWS_AS(BudgetConfig({0.0, 0}).cells_per_row(8), UsageError);
    CHECK_THROWS_AS(BudgetConfig({1.5, 0}).cells_per_row(8), UsageError);
  }

  TEST_CASE("doc_uniform spends exactly B cells per row") {
    const auto o = test::random_oracle(3, 8, 1);
    const auto r = doc_uniform(o, 2, BudgetConfig{0.5, 4});
    CHECK(r.reveals.size() == 12);
    CHECK(r.coverage == 0.5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(cols_of_row(r, i).size() == 4);
    const auto minimal = doc_uniform(o, 1, BudgetConfig{1.0 / 8, 4});
    CHECK(minimal.reveals.size() == 3);
    CHECK(minimal.coverage == 1.0 / 8);
  }

  TEST_CASE("doc_uniform ranks by partial sums") {
    const auto o = test::random_oracle(12, 6, 7);
    const auto r = doc_uniform(o, 4, BudgetConfig{0.5, 9});
    std::vector<double> partial(12, 0.0);
    for (const auto& e : r.reveals) partial[e.row] += e.value;
    CHECK(r.topk == topk_by_key(partial, 4));
  }

  TEST_CASE("doc_top_margin reveals the widest cells") {
    const auto o = test::random_oracle(2, 4, 2);
    CellBounds b(2, 4, 0.0, 0.0);
    b.hi = {0.1, 0.9, 0.5, 0.7, 0.3, 0.3, 0.3, 0.3};
    const auto r = doc_top_margin(o, b, 1, 0.5);
    CHECK(cols_of_row(r, 0) == std::set<std::size_t>{1, 3});
    CHECK(cols_of_row(r, 1) == std::set<std::size_t>{0, 1});
    const auto again = doc_top_margin(o, b, 1, 0.5);
    CHECK(again.reveals == r.reveals);
    CHECK(again.topk == r.topk);
  }

  TEST_CASE("full budget and full rerank return the exact top-K") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto o = test::random_oracle(15, 9, seed);
      const auto b = CellBounds::generic(o);
      const auto exact = exact_topk(o, 4);
      CHECK(doc_uniform(o, 4, BudgetConfig{1.0, seed}).topk == exact);
      CHECK(doc_top_margin(o, b, 4, 1.0).topk == exact);
      const auto full = full_rerank(o, 4);
      CHECK(full.topk == exact);
      CHECK(full.coverage == 1.0);
      CHECK(full.reveals.size() == 15 * 9);
    }
  }

  TEST_CASE("reveal count is N ceil(gamma T) across the grid") {
    const auto o = test::random_oracle(7, 13, 3);
    const auto b = CellBounds::generic(o);
    for (double g : default_gamma_grid()) {
      const std::size_t per_row = ceil_fraction(g, 13);
      const auto u = doc_uniform(o, 3, BudgetConfig{g, 5});
      const auto m = doc_top_margin(o, b, 3, g);
      CHECK(u.reveals.size() == 7 * per_row);
      CHECK(m.reveals.size() == 7 * per_row);
      CHECK(u.coverage == doctest::Approx(static_cast<double>(per_row) / 13));
      CHECK(u.terminated_by == Termination::Budget);
    }
  }

  TEST_CASE("doc_uniform is deterministic given the seed") {
    const auto o = test::random_oracle(10, 10, 4);
    const auto a = doc_uniform(o, 3, BudgetConfig{0.3, 11});
    CHECK(doc_uniform(o, 3, BudgetConfig{0.3, 11}).reveals == a.reveals);
    CHECK_FALSE(doc_uniform(o, 3, BudgetConfig{0.3, 12}).reveals == a.reveals);
  }

  TEST_CASE("K larger than N is a usage error") {
    const auto o = test::random_oracle(3, 4, 1);
    CHECK_THROWS_AS(doc_uniform(o, 4, BudgetConfig{0.5, 0}), UsageError);
    CHECK_THROWS_AS(full_rerank(o, 4), UsageError);
  }
}
