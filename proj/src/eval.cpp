#include "colbandit/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "colbandit/baselines.hpp"
#include "colbandit/errors.hpp"
#include "colbandit/parallel.hpp"
#include "colbandit/rng.hpp"

namespace colbandit {

double overlap_at_k(std::span<const std::size_t> approx, std::span<const std::size_t> exact,
                    std::size_t k) {
  if (k == 0 || approx.size() != k || exact.size() != k) {
    throw UsageError("overlap_at_k needs two sets of exactly K = " + std::to_string(k) +
                     " entries (got " + std::to_string(approx.size()) + " and " +
                     std::to_string(exact.size()) + ")");
  }
  const std::unordered_set<std::size_t> a(approx.begin(), approx.end());
  const std::unordered_set<std::size_t> e(exact.begin(), exact.end());
  if (a.size() != k || e.size() != k) {
    throw UsageError("overlap_at_k inputs must not contain duplicates");
  }
  std::size_t hits = 0;
  for (std::size_t x : a) hits += e.count(x);
  return static_cast<double>(hits) / static_cast<double>(k);
}

QrelSet QrelSet::parse(std::istream& in) {
  QrelSet q;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string qid, iter, did;
    double rel;
    if (!(ls >> qid)) continue;  // blank line
    if (!(ls >> iter >> did >> rel)) {
      throw FormatError("qrels line " + std::to_string(lineno) +
                        ": expected 'query_id 0 doc_id relevance'");
    }
    if (rel > 0) {
      q.relevant[qid].insert(did);
    } else {
      q.relevant.try_emplace(qid);
    }
  }
  return q;
}

QrelSet QrelSet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw FormatError("cannot open qrels " + path);
  }
  return parse(in);
}

const RelevantSet* QrelSet::find(const std::string& query_id) const {
  const auto it = relevant.find(query_id);
  if (it == relevant.end() || it->second.empty()) return nullptr;
  return &it->second;
}

double recall_at_k(std::span<const std::string> ranked, const RelevantSet& relevant,
                   std::size_t k) {
  if (relevant.empty()) {
    throw UsageError("recall@K needs at least one relevant document");
  }
  std::size_t hits = 0;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
    hits += relevant.count(ranked[r]);
  }
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

double mrr_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k) {
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
    if (relevant.count(ranked[r])) return 1.0 / static_cast<double>(r + 1);
  }
  return 0.0;
}

double ndcg_at_k(std::span<const std::string> ranked, const RelevantSet& relevant, std::size_t k) {
  if (relevant.empty()) {
    throw UsageError("nDCG@K needs at least one relevant document");
  }
  double dcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, ranked.size()); ++r) {
    if (relevant.count(ranked[r])) dcg += 1.0 / std::log2(static_cast<double>(r + 2));
  }
  double ideal = 0.0;
  for (std::size_t r = 0; r < std::min(k, relevant.size()); ++r) {
    ideal += 1.0 / std::log2(static_cast<double>(r + 2));
  }
  return dcg / ideal;
}

EvalInstance::EvalInstance(std::string id, MaxSimOracle o, CellBounds b, std::size_t k,
                           const RelevantSet* rel)
    : query_id(std::move(id)),
      oracle(std::move(o)),
      bounds(std::move(b)),
      exact(exact_topk(oracle, k)),
      relevant(rel) {
  bounds.validate_for(oracle);
}

Evaluation evaluate(std::span<const EvalInstance> instances, std::size_t k,
                    const std::string& method_name, double param, const Method& method,
                    std::size_t workers) {
  Evaluation ev;
  ev.queries.resize(instances.size());
  parallel_for(instances.size(), workers, [&](std::size_t q) {
    const auto& inst = instances[q];
    if (inst.exact.size() != k) {
      throw UsageError("instance '" + inst.query_id + "' was prepared for a different K");
    }
    auto& out = ev.queries[q];
    out.query_id = inst.query_id;
    out.run = method(inst, q);
    out.overlap = overlap_at_k(out.run.topk, inst.exact, k);
    if (inst.relevant) {
      std::vector<std::string> ranked;
      for (std::size_t i : out.run.topk) ranked.push_back(inst.oracle.doc_ids()[i]);
      out.recall = recall_at_k(ranked, *inst.relevant, k);
      out.ndcg = ndcg_at_k(ranked, *inst.relevant, k);
      out.mrr = mrr_at_k(ranked, *inst.relevant, k);
    }
  });

  auto& p = ev.point;
  p.method = method_name;
  p.param = param;
  p.n_queries = instances.size();
  if (instances.empty()) return ev;
  double cov = 0.0, ovl = 0.0, rec = 0.0, nd = 0.0, mr = 0.0;
  std::size_t judged = 0;
  for (const auto& o : ev.queries) {
    cov += o.run.coverage;
    ovl += o.overlap;
    if (o.recall) {
      ++judged;
      rec += *o.recall;
      nd += *o.ndcg;
      mr += *o.mrr;
    }
  }
  const double n = static_cast<double>(instances.size());
  p.mean_coverage = cov / n;
  p.mean_overlap = ovl / n;
  double var = 0.0;
  for (const auto& o : ev.queries) {
    const double d = o.run.coverage - p.mean_coverage;
    var += d * d;
  }
  p.std_coverage = std::sqrt(var / n);
  p.n_unjudged = instances.size() - judged;
  if (judged > 0) {
    const double j = static_cast<double>(judged);
    p.recall = rec / j;
    p.ndcg = nd / j;
    p.mrr = mr / j;
  }
  return ev;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> g(16);
  for (std::size_t j = 0; j < g.size(); ++j) {
    g[j] = std::pow(10.0, -3.0 + 3.0 * static_cast<double>(j) / 15.0);
  }
  g.back() = 1.0;
  return g;
}

std::vector<double> default_gamma_grid() {
  std::vector<double> g;
  for (int j = 1; j <= 20; ++j) g.push_back(static_cast<double>(j) / 20.0);
  return g;
}

std::uint64_t instance_seed(std::uint64_t seed, std::size_t index) {
  return Rng(seed).split(index).seed();
}

std::vector<Evaluation> sweep_alpha_detailed(std::span<const EvalInstance> instances,
                                             const BanditConfig& tmpl, std::span<const double> grid,
                                             std::size_t workers) {
  if (grid.empty()) {
    throw UsageError("alpha grid must not be empty");
  }
  std::vector<Evaluation> out;
  for (double alpha : grid) {
    BanditConfig cfg = tmpl;
    cfg.radius.alpha_ef = alpha;
    cfg.validate();
    out.push_back(evaluate(instances, cfg.k, "col-bandit", alpha,
                           [&](const EvalInstance& inst, std::size_t q) {
                             BanditConfig local = cfg;
                             local.seed = instance_seed(cfg.seed, q);
                             return run(inst.oracle, inst.bounds, local);
                           },
                           workers));
  }
  return out;
}

std::vector<FrontierPoint> sweep_alpha(std::span<const EvalInstance> instances,
                                       const BanditConfig& tmpl, std::span<const double> grid,
                                       std::size_t workers) {
  std::vector<FrontierPoint> pts;
  for (auto& e : sweep_alpha_detailed(instances, tmpl, grid, workers)) pts.push_back(e.point);
  return pts;
}

std::vector<Evaluation> sweep_budgets_detailed(std::span<const EvalInstance> instances,
                                               std::size_t k, std::span<const double> grid,
                                               std::uint64_t seed, std::size_t workers) {
  if (grid.empty()) {
    throw UsageError("gamma grid must not be empty");
  }
  std::vector<Evaluation> out;
  for (double gamma : grid) {
    out.push_back(evaluate(instances, k, "doc-uniform", gamma,
                           [&](const EvalInstance& inst, std::size_t q) {
                             return doc_uniform(inst.oracle, k,
                                                BudgetConfig{gamma, instance_seed(seed, q)});
                           },
                           workers));
  }
  for (double gamma : grid) {
    out.push_back(evaluate(instances, k, "doc-top-margin", gamma,
                           [&](const EvalInstance& inst, std::size_t) {
                             return doc_top_margin(inst.oracle, inst.bounds, k, gamma);
                           },
                           workers));
  }
  return out;
}

std::vector<FrontierPoint> sweep_budgets(std::span<const EvalInstance> instances, std::size_t k,
                                         std::span<const double> grid, std::uint64_t seed,
                                         std::size_t workers) {
  std::vector<FrontierPoint> pts;
  for (auto& e : sweep_budgets_detailed(instances, k, grid, seed, workers)) pts.push_back(e.point);
  return pts;
}

std::optional<FrontierPoint> coverage_to_reach(std::span<const FrontierPoint> points,
                                               double target) {
  std::optional<FrontierPoint> best;
  for (const auto& p : points) {
    if (p.mean_overlap >= target && (!best || p.mean_coverage < best->mean_coverage)) {
      best = p;
    }
  }
  return best;
}

void write_frontier_csv(std::ostream& out, std::span<const FrontierPoint> points, std::size_t k) {
  out << "method,param,mean_coverage,std_coverage,overlap@" << k << ",recall@" << k << ",ndcg@"
      << k << ",mrr@" << k << ",n_queries\n";
  // Shortest representation that round-trips to the same double.
  auto num = [&](double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.write(buf, res.ptr - buf);
  };
  auto opt = [&](const std::optional<double>& v) {
    if (v) num(*v);
  };
  for (const auto& p : points) {
    out << p.method << ',';
    num(p.param);
    out << ',';
    num(p.mean_coverage);
    out << ',';
    num(p.std_coverage);
    out << ',';
    num(p.mean_overlap);
    out << ',';
    opt(p.recall);
    out << ',';
    opt(p.ndcg);
    out << ',';
    opt(p.mrr);
    out << ',' << p.n_queries << '\n';
  }
}

}  // namespace colbandit
