#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "colbandit/embedding_io.hpp"
#include "colbandit/row_stats.hpp"

namespace colbandit {

enum class SimilarityKind {
  Cosine,  // dot product of pre-normalised vectors
  Dot,
};

struct SimilarityConfig {
  SimilarityKind kind = SimilarityKind::Cosine;
  double range_lo = -1.0;
  double range_hi = 1.0;
  /// Report max(sim, 0); the support becomes [max(range_lo, 0), range_hi].
  bool clamp_nonnegative = false;

  double support_lo() const noexcept { return clamp_nonnegative && range_lo < 0.0 ? 0.0 : range_lo; }
  double support_hi() const noexcept { return range_hi; }
  void validate() const;
};

/// Norm tolerance for vectors under cosine similarity.
inline constexpr double kNormTolerance = 1e-6;

/// Query token embeddings, T >= 1 vectors of a shared dimension M.
struct QueryTokens {
  EmbeddingMatrix vectors;

  std::size_t size() const noexcept { return vectors.count(); }
  std::uint32_t dim() const noexcept { return vectors.dim; }
};

/// Document token embeddings, L_d >= 1 vectors.
struct DocTokens {
  std::string doc_id;
  EmbeddingMatrix vectors;

  std::size_t size() const noexcept { return vectors.count(); }
  std::uint32_t dim() const noexcept { return vectors.dim; }
};

/// Dot product of two equal-length f32 vectors accumulated in f64.
double dot(std::span<const float> a, std::span<const float> b) noexcept;

/// Lazily evaluated N x T matrix of MaxSim values.
///
/// Read-only after construction and safe to share across threads. Reveal
/// cost is charged by an ObservationLedger, never by the oracle itself.
class MaxSimOracle {
 public:
  static MaxSimOracle from_embeddings(QueryTokens query, std::vector<DocTokens> docs,
                                      SimilarityConfig sim = {});
  /// Wraps a precomputed matrix; every value must lie in the configured support.
  static MaxSimOracle from_matrix(DenseMatrix matrix, SimilarityConfig sim = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  const SimilarityConfig& similarity() const noexcept { return sim_; }
  bool has_embeddings() const noexcept { return std::holds_alternative<Embedded>(storage_); }

  /// Max over the document's tokens of sim(doc token, query token t).
  double maxsim(std::size_t i, std::size_t t) const;

  /// Brute-force row sum, accumulated in column order.
  double full_score(std::size_t i) const;
  std::vector<double> full_scores() const;

  /// Document ids; synthesised as the row index for matrix-backed oracles.
  const std::vector<std::string>& doc_ids() const noexcept { return doc_ids_; }

 private:
  struct Embedded {
    QueryTokens query;
    std::vector<DocTokens> docs;
  };

  MaxSimOracle() = default;
  void check_index(std::size_t i, std::size_t t) const;

  std::variant<Embedded, DenseMatrix> storage_;
  SimilarityConfig sim_;
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::string> doc_ids_;
};

/// The K rows with the largest keys, ordered by key descending, ties to the
/// lower index.
std::vector<std::size_t> topk_by_key(std::span<const double> keys, std::size_t k);

/// Ground-truth Top-K by full_score.
std::vector<std::size_t> exact_topk(const MaxSimOracle& oracle, std::size_t k);

struct RevealEvent {
  std::uint32_t row;
  std::uint32_t col;
  double value;

  friend bool operator==(const RevealEvent&, const RevealEvent&) = default;
};

/// Revealed set of cells for one query run. Single writer.
class ObservationLedger {
 public:
  ObservationLedger(std::size_t rows, std::size_t cols);

  /// Charges one unit of cost and returns H[i][t]. Revealing a cell twice is
  /// a usage error.
  double reveal(const MaxSimOracle& oracle, std::size_t i, std::size_t t);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  bool is_observed(std::size_t i, std::size_t t) const { return observed_[i * cols_ + t] != 0; }
  /// Observed value; meaningful only when is_observed(i, t).
  double value(std::size_t i, std::size_t t) const { return values_[i * cols_ + t]; }

  const RowStats& row_stats(std::size_t i) const { return stats_[i]; }
  /// Unrevealed columns of row i, in no particular order.
  std::span<const std::uint32_t> unrevealed(std::size_t i) const { return unrevealed_[i]; }

  std::size_t observed_count() const noexcept { return trace_.size(); }
  std::size_t reveal_count() const noexcept { return trace_.size(); }
  /// Reveals in charge order.
  const std::vector<RevealEvent>& trace() const noexcept { return trace_; }

  double coverage() const noexcept;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint8_t> observed_;
  std::vector<double> values_;
  std::vector<RowStats> stats_;
  std::vector<std::vector<std::uint32_t>> unrevealed_;
  std::vector<std::uint32_t> slot_;  // position of each cell inside unrevealed_[i]
  std::vector<RevealEvent> trace_;
};

/// |observed| / (N * T); zero for an empty matrix.
double coverage(std::size_t observed, std::size_t rows, std::size_t cols) noexcept;
inline double coverage(const ObservationLedger& ledger) noexcept { return ledger.coverage(); }

}  // namespace colbandit
