#include "colbandit/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "colbandit/errors.hpp"
#include "colbandit/rng.hpp"

namespace colbandit {

std::size_t BudgetConfig::cells_per_row(std::size_t cols) const {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw UsageError("coverage budget gamma must lie in (0, 1]");
  }
  const std::size_t b = ceil_fraction(gamma, cols);
  if (b < 1 || b > cols) {
    throw UsageError("budget ceil(gamma T) = " + std::to_string(b) + " outside [1, " +
                     std::to_string(cols) + "]");
  }
  return b;
}

namespace {

void check_k(const MaxSimOracle& oracle, std::size_t k) {
  if (k > oracle.rows()) {
    throw UsageError("K = " + std::to_string(k) + " exceeds N = " + std::to_string(oracle.rows()));
  }
}

// Sum of revealed values in column order, so a full row matches full_score exactly.
RunResult rank_by_partial_sums(const ObservationLedger& ledger, std::size_t k, Termination why) {
  std::vector<double> partial(ledger.rows(), 0.0);
  for (std::size_t i = 0; i < ledger.rows(); ++i) {
    for (std::size_t t = 0; t < ledger.cols(); ++t) {
      if (ledger.is_observed(i, t)) partial[i] += ledger.value(i, t);
    }
  }
  RunResult r;
  r.topk = topk_by_key(partial, k);
  r.reveals = ledger.trace();
  r.coverage = ledger.coverage();
  r.iterations = 0;
  r.terminated_by = why;
  return r;
}

}  // namespace

RunResult doc_uniform(const MaxSimOracle& oracle, std::size_t k, const BudgetConfig& budget) {
  check_k(oracle, k);
  const std::size_t cols = oracle.cols();
  const std::size_t b = budget.cells_per_row(cols);
  Rng rng(budget.seed);
  ObservationLedger ledger(oracle.rows(), cols);
  std::vector<std::size_t> perm(cols);
  for (std::size_t i = 0; i < oracle.rows(); ++i) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t j = 0; j < b; ++j) {
      std::swap(perm[j], perm[j + rng.uniform_index(cols - j)]);
      ledger.reveal(oracle, i, perm[j]);
    }
  }
  return rank_by_partial_sums(ledger, k, Termination::Budget);
}

RunResult doc_top_margin(const MaxSimOracle& oracle, const CellBounds& bounds, std::size_t k,
                         double gamma) {
  check_k(oracle, k);
  bounds.validate_for(oracle);
  const std::size_t cols = oracle.cols();
  const std::size_t b = BudgetConfig{gamma, 0}.cells_per_row(cols);
  ObservationLedger ledger(oracle.rows(), cols);
  std::vector<std::size_t> order(cols);
  for (std::size_t i = 0; i < oracle.rows(); ++i) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
      return bounds.width(i, a) > bounds.width(i, c);
    });
    for (std::size_t j = 0; j < b; ++j) {
      ledger.reveal(oracle, i, order[j]);
    }
  }
  return rank_by_partial_sums(ledger, k, Termination::Budget);
}

RunResult full_rerank(const MaxSimOracle& oracle, std::size_t k) {
  check_k(oracle, k);
  ObservationLedger ledger(oracle.rows(), oracle.cols());
  for (std::size_t i = 0; i < oracle.rows(); ++i) {
    for (std::size_t t = 0; t < oracle.cols(); ++t) {
      ledger.reveal(oracle, i, t);
    }
  }
  return rank_by_partial_sums(ledger, k, Termination::Budget);
}

}  // namespace colbandit
