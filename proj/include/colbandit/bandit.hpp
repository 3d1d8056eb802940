#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "colbandit/bounds.hpp"
#include "colbandit/matrix_oracle.hpp"
#include "colbandit/rng.hpp"

namespace colbandit {

enum class ExploreMode {
  EpsilonGreedy,  // one random cell per row up front, then epsilon-greedy token choice
  StaticWarmup,   // ceil(gamma_init N T) random cells up front, then max-width
  UniformRow,     // token always drawn uniformly from the row's unrevealed cells
};

struct BanditConfig {
  std::size_t k = 5;
  double epsilon = 0.1;
  ExploreMode explore = ExploreMode::EpsilonGreedy;
  double gamma_init = 0.0;
  std::uint64_t seed = 0;
  RadiusConfig radius;  // carries alpha_ef, delta, c and the union mode

  void validate() const;
};

enum class Termination {
  Separation,  // LCB of the weakest winner >= UCB of the strongest loser
  Exhaustion,  // no revealable cell left (never expected; see run())
  Budget,      // static baselines: fixed per-row budget spent
};

std::string_view to_string(Termination t) noexcept;
std::string_view to_string(ExploreMode m) noexcept;

struct RunResult {
  std::vector<std::size_t> topk;  // ordered by ranking key, best first
  double coverage = 0.0;
  std::vector<RevealEvent> reveals;
  std::size_t iterations = 0;
  Termination terminated_by = Termination::Separation;
};

/// Adaptive LUCB reveal loop.
///
/// Each iteration forms the tentative Top-K by ranking key, finds the
/// weakest winner (min LCB inside) and strongest loser (max UCB outside),
/// stops once they separate, and otherwise reveals one cell of whichever of
/// the two has the wider interval. Halts within N * T reveals.
RunResult run(const MaxSimOracle& oracle, const CellBounds& bounds, const BanditConfig& cfg);

/// Wider of the two intervals; ties go to the weakest winner.
std::size_t select_ambiguous(std::size_t weakest_winner, const DecisionState& winner,
                             std::size_t strongest_loser, const DecisionState& loser) noexcept;

/// Next column to reveal in `row`. With probability epsilon (always, when
/// `uniform_only`) a uniformly random unrevealed column; otherwise the
/// unrevealed column with the widest cell bound, ties to the lower index.
std::size_t select_token(const ObservationLedger& ledger, const CellBounds& bounds, std::size_t row,
                         double epsilon, bool uniform_only, Rng& rng);

/// ceil(gamma * count), guarded against binary rounding of gamma
/// (0.1 * 30 must give 3, not 4).
std::size_t ceil_fraction(double gamma, std::size_t count);

/// Reveals ceil(gamma_init N T) distinct cells uniformly at random.
void static_warmup(const MaxSimOracle& oracle, ObservationLedger& ledger, double gamma_init,
                   Rng& rng);

/// Reveals one uniformly random cell in every row.
void init_one_per_row(const MaxSimOracle& oracle, ObservationLedger& ledger, Rng& rng);

}  // namespace colbandit
