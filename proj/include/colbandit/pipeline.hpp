#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "colbandit/bounds.hpp"
#include "colbandit/matrix_oracle.hpp"
#include "json.hpp"

namespace colbandit {

enum class BoundsMode {
  Ann,      // per-cell bounds from the Stage-1 neighbour lists
  Generic,  // global similarity support for every cell
};

/// How ANN bounds handle similarities below zero, where lo = 0 is unsound.
enum class NegativePolicy {
  Clamp,  // similarities reported as max(sim, 0); lo = 0 stays sound
  Widen,  // raw similarities; lo = range_lo
};

struct PipelineConfig {
  std::size_t k_prime = 10;
  BoundsMode bounds = BoundsMode::Ann;
  NegativePolicy negatives = NegativePolicy::Clamp;
  SimilarityConfig similarity;

  /// Similarity used by the Stage-2 oracle and the bounds.
  SimilarityConfig effective_similarity() const;
};

struct Neighbor {
  std::uint32_t doc;    // corpus index
  std::uint32_t token;  // token index inside the document
  double similarity;
};

/// Exact top-k' corpus tokens for every query token, best first.
struct TokenNeighborList {
  std::vector<std::vector<Neighbor>> per_token;

  /// Similarity of the last (k'-th) neighbour of query token t.
  double kth_similarity(std::size_t t) const { return per_token.at(t).back().similarity; }
};

struct CandidateSet {
  std::vector<std::size_t> corpus_index;  // ascending corpus order
  std::vector<std::string> doc_ids;
  std::size_t cols = 0;
  /// Exact MaxSim for (candidate, token) pairs surfaced by Stage 1.
  std::vector<std::uint8_t> retrieved;  // N x T mask
  std::vector<double> retrieved_value;  // N x T, meaningful where retrieved

  std::size_t size() const noexcept { return corpus_index.size(); }
  bool was_retrieved(std::size_t i, std::size_t t) const { return retrieved[i * cols + t] != 0; }
  double retrieved_maxsim(std::size_t i, std::size_t t) const { return retrieved_value[i * cols + t]; }
};

struct StageOne {
  CandidateSet candidates;
  TokenNeighborList neighbors;
};

/// Stage 1: exact per-token kNN by full scan over every corpus token, then
/// the union of owning documents. Throws UsageError for an empty corpus or
/// k' = 0.
StageOne generate_candidates(std::span<const DocTokens> corpus, const QueryTokens& query,
                             const PipelineConfig& cfg);

/// Per-cell bounds for the candidate matrix. ANN mode: hi is the exact
/// MaxSim when the document was retrieved for the token, else the k'-th
/// neighbour similarity; lo is 0 (Clamp) or range_lo (Widen).
CellBounds derive_bounds(const StageOne& stage, const PipelineConfig& cfg);

/// Stage-2 oracle over the candidate documents, in candidate order.
MaxSimOracle candidate_oracle(std::span<const DocTokens> corpus, const QueryTokens& query,
                              const CandidateSet& candidates, const PipelineConfig& cfg);

/// Candidate-set artifact: doc ids, per-cell lo/hi, and s_k' per token.
nlohmann::json candidate_artifact(const StageOne& stage, const CellBounds& bounds,
                                  const PipelineConfig& cfg);

}  // namespace colbandit
