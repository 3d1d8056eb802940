#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "colbandit/matrix_oracle.hpp"
#include "colbandit/row_stats.hpp"

namespace colbandit {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Per-cell support [lo, hi] for unrevealed MaxSim values.
struct CellBounds {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> lo;
  std::vector<double> hi;

  CellBounds() = default;
  CellBounds(std::size_t n, std::size_t t, double lo_value, double hi_value);

  /// Same [lo, hi] for every cell.
  static CellBounds uniform(std::size_t n, std::size_t t, double lo_value, double hi_value) {
    return CellBounds(n, t, lo_value, hi_value);
  }
  /// The oracle's similarity support for every cell.
  static CellBounds generic(const MaxSimOracle& oracle);

  double lo_at(std::size_t i, std::size_t t) const { return lo[i * cols + t]; }
  double hi_at(std::size_t i, std::size_t t) const { return hi[i * cols + t]; }
  double width(std::size_t i, std::size_t t) const { return hi_at(i, t) - lo_at(i, t); }

  /// Throws ConfigError unless lo <= hi everywhere and the shape is consistent.
  void validate() const;
  /// Throws ConfigError unless the shape matches the oracle.
  void validate_for(const MaxSimOracle& oracle) const;
};

enum class UnionMode {
  PerDocument,         // log(c N / delta)
  PerDocumentAndSize,  // log(c N T / delta)
};

struct RadiusConfig {
  double alpha_ef = 1.0;
  double delta = 0.01;
  double c = 1.0;
  UnionMode union_mode = UnionMode::PerDocument;
  /// Drop the statistical radius (r = +infinity) so every stop is certified
  /// by the hard bounds alone; the returned set is then exact.
  bool hard_only = false;

  void validate() const;
};

struct HardBounds {
  double lo;
  double hi;
};

/// T * (sum / n); nullopt when the row has no observations.
std::optional<double> estimated_score(const RowStats& stats, std::size_t cols);

/// Observed values plus per-cell support for the unobserved cells.
/// Accumulated in column order so a fully observed row reproduces
/// MaxSimOracle::full_score bit for bit.
HardBounds hard_bounds(const ObservationLedger& ledger, const CellBounds& bounds, std::size_t i);

/// Sample standard deviation (n - 1 divisor); nullopt for n <= 1.
std::optional<double> empirical_std(const RowStats& stats);

/// Finite-population correction for n of T values sampled without
/// replacement: 1 - (n-1)/T for n <= T/2, else (1 - n/T)(1 + 1/n).
double fp_correction(std::size_t n, std::size_t cols);

/// Variance-adaptive radius on the row sum; +infinity for n <= 1 or hard_only.
double effective_radius(const RowStats& stats, std::size_t cols, const RadiusConfig& cfg,
                        std::size_t rows);

/// LCB = max(hard.lo, S - r), UCB = min(hard.hi, S + r).
///
/// The estimate is first clipped into the hard interval, so the result is
/// never inverted when S lies outside it. Without an estimate the hard
/// interval is returned unchanged.
std::pair<double, double> decision_interval(HardBounds hard, std::optional<double> estimate,
                                            double radius);

struct DecisionState {
  std::optional<double> est_score;
  double hard_lo = 0.0;
  double hard_hi = 0.0;
  double radius = kInfinity;
  double lcb = 0.0;
  double ucb = 0.0;

  /// Ranking proxy: the clipped estimate, or the hard-bound midpoint when
  /// nothing has been observed.
  double rank_key() const;
  double width() const noexcept { return ucb - lcb; }
};

DecisionState decision_state(const ObservationLedger& ledger, const CellBounds& bounds,
                             std::size_t i, const RadiusConfig& cfg);

}  // namespace colbandit
