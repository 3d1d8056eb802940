#include "colbandit/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>

#include "colbandit/errors.hpp"

namespace colbandit {

CellBounds::CellBounds(std::size_t n, std::size_t t, double lo_value, double hi_value)
    : rows(n), cols(t), lo(n * t, lo_value), hi(n * t, hi_value) {}

CellBounds CellBounds::generic(const MaxSimOracle& oracle) {
  const auto& sim = oracle.similarity();
  return uniform(oracle.rows(), oracle.cols(), sim.support_lo(), sim.support_hi());
}

void CellBounds::validate() const {
  if (lo.size() != rows * cols || hi.size() != rows * cols) {
    throw ConfigError("cell bounds do not match their N x T shape");
  }
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(lo[k] <= hi[k]) || !std::isfinite(lo[k]) || !std::isfinite(hi[k])) {
      throw ConfigError("cell bound (" + std::to_string(k / cols) + ", " +
                        std::to_string(k % cols) + ") is not a finite interval lo <= hi");
    }
  }
}

void CellBounds::validate_for(const MaxSimOracle& oracle) const {
  if (rows != oracle.rows() || cols != oracle.cols()) {
    throw ConfigError("cell bounds are " + std::to_string(rows) + " x " + std::to_string(cols) +
                      " but the matrix is " + std::to_string(oracle.rows()) + " x " +
                      std::to_string(oracle.cols()));
  }
  validate();
}

void RadiusConfig::validate() const {
  if (!(alpha_ef > 0.0 && alpha_ef <= 1.0)) {
    throw ConfigError("alpha_ef must lie in (0, 1]");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("delta must lie in (0, 1)");
  }
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw ConfigError("radius constant c must be positive");
  }
}

std::optional<double> estimated_score(const RowStats& stats, std::size_t cols) {
  if (stats.count() == 0) {
    return std::nullopt;
  }
  return static_cast<double>(cols) * (stats.sum() / static_cast<double>(stats.count()));
}

HardBounds hard_bounds(const ObservationLedger& ledger, const CellBounds& bounds, std::size_t i) {
  double lo = 0.0;
  double hi = 0.0;
  for (std::size_t t = 0; t < ledger.cols(); ++t) {
    if (ledger.is_observed(i, t)) {
      const double v = ledger.value(i, t);
      lo += v;
      hi += v;
    } else {
      lo += bounds.lo_at(i, t);
      hi += bounds.hi_at(i, t);
    }
  }
  return {lo, hi};
}

std::optional<double> empirical_std(const RowStats& stats) {
  const auto var = stats.sample_variance();
  if (!var) {
    return std::nullopt;
  }
  return std::sqrt(*var);
}

double fp_correction(std::size_t n, std::size_t cols) {
  if (n < 1 || n > cols) {
    throw UsageError("fp_correction requires 1 <= n <= T (n = " + std::to_string(n) +
                     ", T = " + std::to_string(cols) + ")");
  }
  const double nn = static_cast<double>(n);
  const double tt = static_cast<double>(cols);
  if (2 * n <= cols) {
    return 1.0 - (nn - 1.0) / tt;
  }
  return (1.0 - nn / tt) * (1.0 + 1.0 / nn);
}

double effective_radius(const RowStats& stats, std::size_t cols, const RadiusConfig& cfg,
                        std::size_t rows) {
  const std::size_t n = stats.count();
  if (n <= 1 || cfg.hard_only) {
    return kInfinity;
  }
  const double sigma = *empirical_std(stats);
  double log_arg = cfg.c * static_cast<double>(rows) / cfg.delta;
  if (cfg.union_mode == UnionMode::PerDocumentAndSize) {
    log_arg *= static_cast<double>(cols);
  }
  const double log_term = std::max(0.0, std::log(log_arg));
  const double nn = static_cast<double>(n);
  return cfg.alpha_ef * static_cast<double>(cols) * sigma * std::sqrt(2.0 * log_term / nn) *
         std::sqrt(fp_correction(n, cols));
}

std::pair<double, double> decision_interval(HardBounds hard, std::optional<double> estimate,
                                            double radius) {
  if (!estimate) {
    return {hard.lo, hard.hi};
  }
  const double s = std::clamp(*estimate, hard.lo, hard.hi);
  return {std::max(hard.lo, s - radius), std::min(hard.hi, s + radius)};
}

double DecisionState::rank_key() const {
  if (!est_score) {
    return 0.5 * (hard_lo + hard_hi);
  }
  return std::clamp(*est_score, hard_lo, hard_hi);
}

DecisionState decision_state(const ObservationLedger& ledger, const CellBounds& bounds,
                             std::size_t i, const RadiusConfig& cfg) {
  DecisionState s;
  const auto& stats = ledger.row_stats(i);
  s.est_score = estimated_score(stats, ledger.cols());
  const auto hard = hard_bounds(ledger, bounds, i);
  s.hard_lo = hard.lo;
  s.hard_hi = hard.hi;
  s.radius = effective_radius(stats, ledger.cols(), cfg, ledger.rows());
  std::tie(s.lcb, s.ucb) = decision_interval(hard, s.est_score, s.radius);
  return s;
}

}  // namespace colbandit
