#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "colbandit/embedding_io.hpp"
#include "colbandit/matrix_oracle.hpp"

namespace colbandit {

enum class ScoreProfile {
  WellSeparated,          // row means on a ladder, gap >= 3 noise_scale
  ClusteredNearBoundary,  // ladder, but ranks K-1..K+1 within noise_scale
  UniformRandom,          // iid uniform cells over the value range
};

std::string_view to_string(ScoreProfile p) noexcept;
/// Throws ConfigError on unknown names.
ScoreProfile parse_profile(std::string_view name);

struct SynthSpec {
  std::size_t n = 50;
  std::size_t t = 32;
  ScoreProfile profile = ScoreProfile::UniformRandom;
  double lo = -1.0;
  double hi = 1.0;
  double noise_scale = 0.05;
  std::size_t k = 5;                  // boundary rank for the clustered profile
  std::optional<double> ladder_gap;   // default 3 * noise_scale; at least that when well-separated
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthMatrix {
  DenseMatrix values;
  std::vector<double> row_means;   // target mean per row
  std::vector<std::size_t> ladder; // ladder[r] = row holding rank r (best first)
};

/// Cells are drawn from a normal around the row mean, truncated to [lo, hi]
/// by rejection. Row-to-rank assignment is a seeded random permutation.
SynthMatrix gen_matrix(const SynthSpec& spec);

struct SynthEmbeddings {
  QueryTokens query;
  std::vector<DocTokens> docs;  // doc id = row index, as for matrix-backed oracles
  SynthMatrix target;
};

/// Unit-norm query and document embeddings whose induced cosine MaxSim
/// matrix approximates gen_matrix(spec). When dim > T and doc_len >= T the
/// query tokens are orthonormal, each document token carries one query
/// token's target, and every non-negative target cell is reproduced up to
/// f32 rounding. Shorter documents pack several targets into one token and
/// only approximate the ladder. Throws ConfigError for dim < 2 or doc_len < 1.
SynthEmbeddings gen_embeddings(const SynthSpec& spec, std::size_t dim, std::size_t doc_len);

}  // namespace colbandit
