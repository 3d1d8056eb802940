#include "colbandit/pipeline.hpp"

#include <algorithm>
#include <queue>
#include <string>

#include "colbandit/errors.hpp"

namespace colbandit {
namespace {

// Neighbour order: similarity descending, then (doc, token) ascending.
bool better(const Neighbor& a, const Neighbor& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  if (a.doc != b.doc) return a.doc < b.doc;
  return a.token < b.token;
}

// Applies the same post-processing as MaxSimOracle::maxsim to a raw dot product.
double effective(double raw, const SimilarityConfig& sim) {
  double v = raw;
  if (sim.kind == SimilarityKind::Cosine) {
    v = std::clamp(v, sim.range_lo, sim.range_hi);
  }
  if (sim.clamp_nonnegative) {
    v = std::max(v, 0.0);
  }
  return v;
}

}  // namespace

SimilarityConfig PipelineConfig::effective_similarity() const {
  SimilarityConfig s = similarity;
  s.clamp_nonnegative = bounds == BoundsMode::Ann && negatives == NegativePolicy::Clamp;
  return s;
}

StageOne generate_candidates(std::span<const DocTokens> corpus, const QueryTokens& query,
                             const PipelineConfig& cfg) {
  if (corpus.empty()) {
    throw UsageError("candidate generation needs a non-empty corpus");
  }
  if (cfg.k_prime == 0) {
    throw UsageError("k' must be at least 1");
  }
  if (query.size() == 0) {
    throw UsageError("query has no tokens");
  }
  for (const auto& d : corpus) {
    if (d.dim() != query.dim()) {
      throw ConfigError("document '" + d.doc_id + "' has dimension " + std::to_string(d.dim()) +
                        ", query has " + std::to_string(query.dim()));
    }
  }
  const auto sim = cfg.effective_similarity();
  const std::size_t cols = query.size();

  StageOne out;
  out.neighbors.per_token.resize(cols);
  for (std::size_t t = 0; t < cols; ++t) {
    const auto q = query.vectors.row(t);
    // Max-heap under `better`, so top() is the worst neighbour kept so far.
    std::priority_queue<Neighbor, std::vector<Neighbor>, decltype(&better)> heap(&better);
    for (std::size_t d = 0; d < corpus.size(); ++d) {
      const auto& vecs = corpus[d].vectors;
      for (std::size_t j = 0; j < vecs.count(); ++j) {
        Neighbor nb{static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(j),
                    dot(vecs.row(j), q)};
        if (heap.size() < cfg.k_prime) {
          heap.push(nb);
        } else if (better(nb, heap.top())) {
          heap.pop();
          heap.push(nb);
        }
      }
    }
    auto& list = out.neighbors.per_token[t];
    list.reserve(heap.size());
    while (!heap.empty()) {
      list.push_back(heap.top());
      heap.pop();
    }
    std::reverse(list.begin(), list.end());
  }

  std::vector<std::uint8_t> owned(corpus.size(), 0);
  for (const auto& list : out.neighbors.per_token) {
    for (const auto& nb : list) owned[nb.doc] = 1;
  }
  std::vector<std::size_t> row_of(corpus.size(), 0);
  auto& cand = out.candidates;
  cand.cols = cols;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    if (!owned[d]) continue;
    row_of[d] = cand.corpus_index.size();
    cand.corpus_index.push_back(d);
    cand.doc_ids.push_back(corpus[d].doc_id);
  }
  cand.retrieved.assign(cand.size() * cols, 0);
  cand.retrieved_value.assign(cand.size() * cols, 0.0);
  // Lists are sorted descending, so the first hit of a document for token t
  // is its best token: every better token of that document ranks earlier
  // and is therefore also inside the top-k'. That hit is the exact MaxSim.
  for (std::size_t t = 0; t < cols; ++t) {
    for (const auto& nb : out.neighbors.per_token[t]) {
      const std::size_t cell = row_of[nb.doc] * cols + t;
      if (cand.retrieved[cell]) continue;
      cand.retrieved[cell] = 1;
      cand.retrieved_value[cell] = effective(nb.similarity, sim);
    }
  }
  return out;
}

CellBounds derive_bounds(const StageOne& stage, const PipelineConfig& cfg) {
  const auto sim = cfg.effective_similarity();
  const auto& cand = stage.candidates;
  const std::size_t cols = cand.cols;
  if (cfg.bounds == BoundsMode::Generic) {
    return CellBounds::uniform(cand.size(), cols, sim.support_lo(), sim.support_hi());
  }
  const double lo = cfg.negatives == NegativePolicy::Clamp ? 0.0 : sim.range_lo;
  CellBounds b(cand.size(), cols, lo, 0.0);
  for (std::size_t t = 0; t < cols; ++t) {
    const double kth = effective(stage.neighbors.kth_similarity(t), sim);
    for (std::size_t i = 0; i < cand.size(); ++i) {
      b.hi[i * cols + t] = cand.was_retrieved(i, t) ? cand.retrieved_maxsim(i, t) : kth;
    }
  }
  return b;
}

MaxSimOracle candidate_oracle(std::span<const DocTokens> corpus, const QueryTokens& query,
                              const CandidateSet& candidates, const PipelineConfig& cfg) {
  std::vector<DocTokens> docs;
  docs.reserve(candidates.size());
  for (std::size_t d : candidates.corpus_index) docs.push_back(corpus[d]);
  return MaxSimOracle::from_embeddings(query, std::move(docs), cfg.effective_similarity());
}

nlohmann::json candidate_artifact(const StageOne& stage, const CellBounds& bounds,
                                  const PipelineConfig& cfg) {
  const auto sim = cfg.effective_similarity();
  nlohmann::json j;
  j["k_prime"] = cfg.k_prime;
  j["bounds"] = cfg.bounds == BoundsMode::Ann ? "ann" : "generic";
  j["negatives"] = cfg.negatives == NegativePolicy::Clamp ? "clamp" : "widen";
  j["doc_ids"] = stage.candidates.doc_ids;
  std::vector<double> skp;
  for (std::size_t t = 0; t < stage.neighbors.per_token.size(); ++t) {
    skp.push_back(effective(stage.neighbors.kth_similarity(t), sim));
  }
  j["s_kprime"] = skp;
  auto rows_of = [&](const std::vector<double>& flat) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < bounds.rows; ++i) {
      rows.push_back(std::vector<double>(flat.begin() + static_cast<std::ptrdiff_t>(i * bounds.cols),
                                         flat.begin() + static_cast<std::ptrdiff_t>((i + 1) * bounds.cols)));
    }
    return rows;
  };
  j["lo"] = rows_of(bounds.lo);
  j["hi"] = rows_of(bounds.hi);
  return j;
}

}  // namespace colbandit
