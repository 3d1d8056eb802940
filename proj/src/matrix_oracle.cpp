#include "colbandit/matrix_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "colbandit/errors.hpp"

namespace colbandit {

void SimilarityConfig::validate() const {
  if (!(std::isfinite(range_lo) && std::isfinite(range_hi) && range_lo < range_hi)) {
    throw ConfigError("similarity range must satisfy range_lo < range_hi");
  }
}

double dot(std::span<const float> a, std::span<const float> b) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    acc += static_cast<double>(a[k]) * static_cast<double>(b[k]);
  }
  return acc;
}

namespace {

void check_normalised(const EmbeddingMatrix& m, const std::string& what) {
  for (std::size_t j = 0; j < m.count(); ++j) {
    const double norm = std::sqrt(dot(m.row(j), m.row(j)));
    if (std::abs(norm - 1.0) > kNormTolerance) {
      throw ConfigError(what + " vector " + std::to_string(j) + " has norm " +
                        std::to_string(norm) + "; cosine similarity expects unit vectors");
    }
  }
}

}  // namespace

MaxSimOracle MaxSimOracle::from_embeddings(QueryTokens query, std::vector<DocTokens> docs,
                                           SimilarityConfig sim) {
  sim.validate();
  if (query.size() == 0 || query.dim() == 0) {
    throw ConfigError("query must contain at least one token");
  }
  if (query.vectors.values.size() != query.size() * query.dim()) {
    throw ConfigError("query payload is not a whole number of vectors");
  }
  const bool cosine = sim.kind == SimilarityKind::Cosine;
  if (cosine) {
    check_normalised(query.vectors, "query");
  }
  MaxSimOracle o;
  o.doc_ids_.reserve(docs.size());
  for (const auto& d : docs) {
    if (d.dim() != query.dim()) {
      throw ConfigError("document '" + d.doc_id + "' has dimension " + std::to_string(d.dim()) +
                        ", query has " + std::to_string(query.dim()));
    }
    if (d.size() == 0) {
      throw ConfigError("document '" + d.doc_id + "' has no tokens");
    }
    if (cosine) {
      check_normalised(d.vectors, "document '" + d.doc_id + "'");
    }
    o.doc_ids_.push_back(d.doc_id);
  }
  o.rows_ = docs.size();
  o.cols_ = query.size();
  o.sim_ = sim;
  o.storage_ = Embedded{std::move(query), std::move(docs)};
  return o;
}

MaxSimOracle MaxSimOracle::from_matrix(DenseMatrix matrix, SimilarityConfig sim) {
  sim.validate();
  if (matrix.values.size() != static_cast<std::size_t>(matrix.rows) * matrix.cols) {
    throw ConfigError("matrix payload does not match its N x T header");
  }
  if (matrix.cols == 0) {
    throw ConfigError("matrix must have at least one column");
  }
  for (std::size_t k = 0; k < matrix.values.size(); ++k) {
    const double v = matrix.values[k];
    if (!(v >= sim.range_lo - kNormTolerance && v <= sim.range_hi + kNormTolerance)) {
      throw ConfigError("matrix cell (" + std::to_string(k / matrix.cols) + ", " +
                        std::to_string(k % matrix.cols) + ") = " + std::to_string(v) +
                        " lies outside the similarity range");
    }
  }
  MaxSimOracle o;
  o.rows_ = matrix.rows;
  o.cols_ = matrix.cols;
  o.sim_ = sim;
  o.doc_ids_.reserve(o.rows_);
  for (std::size_t i = 0; i < o.rows_; ++i) {
    o.doc_ids_.push_back(std::to_string(i));
  }
  o.storage_ = std::move(matrix);
  return o;
}

void MaxSimOracle::check_index(std::size_t i, std::size_t t) const {
  if (i >= rows_ || t >= cols_) {
    throw UsageError("cell (" + std::to_string(i) + ", " + std::to_string(t) +
                     ") outside " + std::to_string(rows_) + " x " + std::to_string(cols_));
  }
}

double MaxSimOracle::maxsim(std::size_t i, std::size_t t) const {
  check_index(i, t);
  double v;
  if (const auto* dense = std::get_if<DenseMatrix>(&storage_)) {
    v = dense->at(i, t);
  } else {
    const auto& emb = std::get<Embedded>(storage_);
    const auto q = emb.query.vectors.row(t);
    const auto& doc = emb.docs[i].vectors;
    v = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < doc.count(); ++j) {
      v = std::max(v, dot(doc.row(j), q));
    }
    if (sim_.kind == SimilarityKind::Cosine) {
      // f32 rounding can push a unit-vector dot product a hair past +-1.
      v = std::clamp(v, sim_.range_lo, sim_.range_hi);
    }
  }
  if (sim_.clamp_nonnegative) {
    v = std::max(v, 0.0);
  }
  return v;
}

double MaxSimOracle::full_score(std::size_t i) const {
  check_index(i, 0);
  double s = 0.0;
  for (std::size_t t = 0; t < cols_; ++t) {
    s += maxsim(i, t);
  }
  return s;
}

std::vector<double> MaxSimOracle::full_scores() const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    out[i] = full_score(i);
  }
  return out;
}

std::vector<std::size_t> topk_by_key(std::span<const double> keys, std::size_t k) {
  if (k > keys.size()) {
    throw UsageError("K = " + std::to_string(k) + " exceeds N = " + std::to_string(keys.size()));
  }
  std::vector<std::size_t> idx(keys.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  auto better = [&](std::size_t a, std::size_t b) {
    return keys[a] > keys[b] || (keys[a] == keys[b] && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
  idx.resize(k);
  return idx;
}

std::vector<std::size_t> exact_topk(const MaxSimOracle& oracle, std::size_t k) {
  if (k == 0 || k > oracle.rows()) {
    throw UsageError("exact_topk requires 1 <= K <= N (K = " + std::to_string(k) +
                     ", N = " + std::to_string(oracle.rows()) + ")");
  }
  const auto scores = oracle.full_scores();
  return topk_by_key(scores, k);
}

ObservationLedger::ObservationLedger(std::size_t rows, std::size_t cols)
    : rows_(rows),
      cols_(cols),
      observed_(rows * cols, 0),
      values_(rows * cols, 0.0),
      stats_(rows),
      unrevealed_(rows),
      slot_(rows * cols) {
  for (std::size_t i = 0; i < rows; ++i) {
    auto& u = unrevealed_[i];
    u.resize(cols);
    for (std::size_t t = 0; t < cols; ++t) {
      u[t] = static_cast<std::uint32_t>(t);
      slot_[i * cols + t] = static_cast<std::uint32_t>(t);
    }
  }
}

double ObservationLedger::reveal(const MaxSimOracle& oracle, std::size_t i, std::size_t t) {
  if (i >= rows_ || t >= cols_) {
    throw UsageError("reveal of cell (" + std::to_string(i) + ", " + std::to_string(t) +
                     ") outside the ledger");
  }
  if (oracle.rows() != rows_ || oracle.cols() != cols_) {
    throw UsageError("ledger shape does not match the oracle");
  }
  const std::size_t cell = i * cols_ + t;
  if (observed_[cell]) {
    throw UsageError("cell (" + std::to_string(i) + ", " + std::to_string(t) +
                     ") already revealed");
  }
  const double v = oracle.maxsim(i, t);
  observed_[cell] = 1;
  values_[cell] = v;
  stats_[i].push(v);

  auto& u = unrevealed_[i];
  const std::uint32_t pos = slot_[cell];
  const std::uint32_t last = u.back();
  u[pos] = last;
  slot_[i * cols_ + last] = pos;
  u.pop_back();

  trace_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(t), v});
  return v;
}

double ObservationLedger::coverage() const noexcept {
  return colbandit::coverage(trace_.size(), rows_, cols_);
}

double coverage(std::size_t observed, std::size_t rows, std::size_t cols) noexcept {
  const std::size_t total = rows * cols;
  return total == 0 ? 0.0 : static_cast<double>(observed) / static_cast<double>(total);
}

}  // namespace colbandit
