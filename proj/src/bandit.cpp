#include "colbandit/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "colbandit/errors.hpp"

namespace colbandit {

void BanditConfig::validate() const {
  radius.validate();
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("epsilon must lie in [0, 1]");
  }
  if (!(gamma_init >= 0.0 && gamma_init <= 1.0)) {
    throw ConfigError("gamma_init must lie in [0, 1]");
  }
}

std::string_view to_string(Termination t) noexcept {
  switch (t) {
    case Termination::Separation: return "separation";
    case Termination::Exhaustion: return "exhaustion";
    case Termination::Budget: return "budget";
  }
  return "unknown";
}

std::string_view to_string(ExploreMode m) noexcept {
  switch (m) {
    case ExploreMode::EpsilonGreedy: return "epsilon-greedy";
    case ExploreMode::StaticWarmup: return "static-warmup";
    case ExploreMode::UniformRow: return "uniform-row";
  }
  return "unknown";
}

std::size_t select_ambiguous(std::size_t weakest_winner, const DecisionState& winner,
                             std::size_t strongest_loser, const DecisionState& loser) noexcept {
  return loser.width() > winner.width() ? strongest_loser : weakest_winner;
}

std::size_t select_token(const ObservationLedger& ledger, const CellBounds& bounds, std::size_t row,
                         double epsilon, bool uniform_only, Rng& rng) {
  const auto open = ledger.unrevealed(row);
  if (open.empty()) {
    throw UsageError("row " + std::to_string(row) + " has no unrevealed column");
  }
  if (uniform_only || rng.uniform01() < epsilon) {
    return open[rng.uniform_index(open.size())];
  }
  std::size_t best = ledger.cols();
  double best_width = -kInfinity;
  for (std::size_t t = 0; t < ledger.cols(); ++t) {
    if (ledger.is_observed(row, t)) continue;
    const double w = bounds.width(row, t);
    if (w > best_width) {
      best_width = w;
      best = t;
    }
  }
  return best;
}

std::size_t ceil_fraction(double gamma, std::size_t count) {
  const double x = gamma * static_cast<double>(count);
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, std::abs(x))) {
    return static_cast<std::size_t>(nearest);
  }
  return static_cast<std::size_t>(std::ceil(x));
}

void static_warmup(const MaxSimOracle& oracle, ObservationLedger& ledger, double gamma_init,
                   Rng& rng) {
  if (!(gamma_init >= 0.0 && gamma_init <= 1.0)) {
    throw UsageError("gamma_init must lie in [0, 1]");
  }
  const std::size_t cols = ledger.cols();
  std::vector<std::size_t> cells;
  cells.reserve(ledger.rows() * cols);
  for (std::size_t c = 0; c < ledger.rows() * cols; ++c) {
    if (!ledger.is_observed(c / cols, c % cols)) {
      cells.push_back(c);
    }
  }
  const std::size_t m = std::min(ceil_fraction(gamma_init, ledger.rows() * cols), cells.size());
  // Partial Fisher-Yates: the first m slots become a uniform sample without replacement.
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t pick = j + rng.uniform_index(cells.size() - j);
    std::swap(cells[j], cells[pick]);
    ledger.reveal(oracle, cells[j] / cols, cells[j] % cols);
  }
}

void init_one_per_row(const MaxSimOracle& oracle, ObservationLedger& ledger, Rng& rng) {
  for (std::size_t i = 0; i < ledger.rows(); ++i) {
    const auto open = ledger.unrevealed(i);
    if (open.empty()) continue;
    ledger.reveal(oracle, i, open[rng.uniform_index(open.size())]);
  }
}

RunResult run(const MaxSimOracle& oracle, const CellBounds& bounds, const BanditConfig& cfg) {
  cfg.validate();
  bounds.validate_for(oracle);
  const std::size_t rows = oracle.rows();
  const std::size_t cols = oracle.cols();
  if (cfg.k > rows) {
    throw UsageError("K = " + std::to_string(cfg.k) + " exceeds N = " + std::to_string(rows));
  }

  RunResult result;
  if (cfg.k == 0) {
    return result;
  }

  Rng rng(cfg.seed);
  ObservationLedger ledger(rows, cols);

  auto finish = [&](std::vector<double> const& keys, Termination why) {
    result.topk = topk_by_key(keys, cfg.k);
    result.reveals = ledger.trace();
    result.coverage = ledger.coverage();
    result.terminated_by = why;
  };

  std::vector<DecisionState> states(rows);
  std::vector<double> keys(rows);
  auto refresh = [&](std::size_t i) {
    states[i] = decision_state(ledger, bounds, i, cfg.radius);
    keys[i] = states[i].rank_key();
  };

  if (cfg.k == rows) {
    // No loser to separate from: max over the empty set is -infinity.
    for (std::size_t i = 0; i < rows; ++i) refresh(i);
    result.iterations = 1;
    finish(keys, Termination::Separation);
    return result;
  }

  switch (cfg.explore) {
    case ExploreMode::EpsilonGreedy: init_one_per_row(oracle, ledger, rng); break;
    case ExploreMode::StaticWarmup: static_warmup(oracle, ledger, cfg.gamma_init, rng); break;
    case ExploreMode::UniformRow: break;
  }
  for (std::size_t i = 0; i < rows; ++i) refresh(i);

  const bool uniform_only = cfg.explore == ExploreMode::UniformRow;
  const double epsilon = cfg.explore == ExploreMode::EpsilonGreedy ? cfg.epsilon : 0.0;
  std::vector<std::uint8_t> in_top(rows);

  while (true) {
    ++result.iterations;
    std::fill(in_top.begin(), in_top.end(), 0);
    for (std::size_t i : topk_by_key(keys, cfg.k)) in_top[i] = 1;

    std::size_t weakest = rows;
    std::size_t strongest = rows;
    for (std::size_t i = 0; i < rows; ++i) {
      if (in_top[i]) {
        if (weakest == rows || states[i].lcb < states[weakest].lcb) weakest = i;
      } else {
        if (strongest == rows || states[i].ucb > states[strongest].ucb) strongest = i;
      }
    }

    if (states[weakest].lcb >= states[strongest].ucb) {
      finish(keys, Termination::Separation);
      return result;
    }

    const std::size_t target =
        select_ambiguous(weakest, states[weakest], strongest, states[strongest]);
    if (ledger.unrevealed(target).empty()) {
      finish(keys, Termination::Exhaustion);
      return result;
    }
    const std::size_t t = select_token(ledger, bounds, target, epsilon, uniform_only, rng);
    ledger.reveal(oracle, target, t);
    refresh(target);
  }
}

}  // namespace colbandit
