#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "colbandit/bandit.hpp"
#include "colbandit/bounds.hpp"
#include "colbandit/matrix_oracle.hpp"

namespace colbandit {

/// |approx ∩ exact| / K. Both sets must have exactly K distinct entries.
double overlap_at_k(std::span<const std::size_t> approx, std::span<const std::size_t> exact,
                    std::size_t k);

using RelevantSet = std::set<std::string>;

/// Binary relevance judgements, query id -> relevant doc ids.
struct QrelSet {
  std::map<std::string, RelevantSet> relevant;

  /// TREC lines "query_id 0 doc_id relevance"; relevance > 0 counts.
  static QrelSet parse(std::istream& in);
  static QrelSet load(const std::string& path);

  /// nullptr when the query has no relevant documents.
  const RelevantSet* find(const std::string& query_id) const;
};

// Ranked lists shorter than K are scored as-is (missing ranks contribute nothing).
double recall_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k);
double mrr_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k);
double ndcg_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k);

/// One query's Stage-2 problem.
struct EvalInstance {
  std::string query_id;
  MaxSimOracle oracle;
  CellBounds bounds;
  std::vector<std::size_t> exact;  // exact_topk(oracle, K), cached
  const RelevantSet* relevant = nullptr;

  EvalInstance(std::string id, MaxSimOracle o, CellBounds b, std::size_t k,
               const RelevantSet* rel = nullptr);
};

struct QueryOutcome {
  std::string query_id;
  RunResult run;
  double overlap = 0.0;
  std::optional<double> recall, ndcg, mrr;
};

struct FrontierPoint {
  std::string method;
  double param = 0.0;
  double mean_coverage = 0.0;
  double std_coverage = 0.0;  // population standard deviation over queries
  double mean_overlap = 0.0;
  std::optional<double> recall, ndcg, mrr;  // over queries with judgements
  std::size_t n_queries = 0;
  std::size_t n_unjudged = 0;  // queries skipped for IR metrics
};

struct Evaluation {
  FrontierPoint point;
  std::vector<QueryOutcome> queries;  // in instance order
};

/// Method under test: (instance, instance index) -> RunResult.
using Method = std::function<RunResult(const EvalInstance&, std::size_t)>;

/// Runs `method` on every instance (queries in parallel when workers > 1)
/// and reduces in instance order, so results do not depend on `workers`.
Evaluation evaluate(std::span<const EvalInstance> instances, std::size_t k,
                    const std::string& method_name, double param, const Method& method,
                    std::size_t workers = 1);

/// 16 log-spaced alpha_ef values over [1e-3, 1].
std::vector<double> default_alpha_grid();
/// {0.05, 0.10, ..., 1.00}.
std::vector<double> default_gamma_grid();

/// Per-instance seed: template seed split by the instance index.
std::uint64_t instance_seed(std::uint64_t seed, std::size_t index);

std::vector<Evaluation> sweep_alpha_detailed(std::span<const EvalInstance> instances,
                                             const BanditConfig& tmpl, std::span<const double> grid,
                                             std::size_t workers = 1);
std::vector<FrontierPoint> sweep_alpha(std::span<const EvalInstance> instances,
                                       const BanditConfig& tmpl, std::span<const double> grid,
                                       std::size_t workers = 1);

/// Doc-Uniform and Doc-TopMargin at every gamma (all Doc-Uniform points
/// first, then all Doc-TopMargin points).
std::vector<Evaluation> sweep_budgets_detailed(std::span<const EvalInstance> instances,
                                               std::size_t k, std::span<const double> grid,
                                               std::uint64_t seed, std::size_t workers = 1);
std::vector<FrontierPoint> sweep_budgets(std::span<const EvalInstance> instances, std::size_t k,
                                         std::span<const double> grid, std::uint64_t seed,
                                         std::size_t workers = 1);

/// Cheapest operating point (smallest mean coverage) whose mean overlap
/// reaches `target`; no interpolation between points.
std::optional<FrontierPoint> coverage_to_reach(std::span<const FrontierPoint> points,
                                               double target);

/// CSV: method,param,mean_coverage,std_coverage,overlap@K,recall@K,ndcg@K,mrr@K,n_queries
void write_frontier_csv(std::ostream& out, std::span<const FrontierPoint> points, std::size_t k);

}  // namespace colbandit
