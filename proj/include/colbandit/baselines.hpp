#pragma once

#include <cstddef>
#include <cstdint>

#include "colbandit/bandit.hpp"
#include "colbandit/bounds.hpp"
#include "colbandit/matrix_oracle.hpp"

namespace colbandit {

struct BudgetConfig {
  double gamma = 1.0;
  std::uint64_t seed = 0;  // Doc-Uniform only

  /// B = ceil(gamma T); throws UsageError unless 1 <= B <= T.
  std::size_t cells_per_row(std::size_t cols) const;
};

/// Static random reveal: B uniformly random cells per row, rows ranked by
/// the sum of their revealed values.
RunResult doc_uniform(const MaxSimOracle& oracle, std::size_t k, const BudgetConfig& budget);

/// Static top-margin reveal: the B widest-bound cells per row (ties to the
/// lower column), rows ranked by the sum of their revealed values.
RunResult doc_top_margin(const MaxSimOracle& oracle, const CellBounds& bounds, std::size_t k,
                         double gamma);

/// Exhaustive reranking; reveals all N * T cells.
RunResult full_rerank(const MaxSimOracle& oracle, std::size_t k);

}  // namespace colbandit
