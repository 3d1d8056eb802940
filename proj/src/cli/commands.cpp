#include "colbandit/cli/commands.hpp"

#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "colbandit/baselines.hpp"
#include "colbandit/errors.hpp"
#include "colbandit/parallel.hpp"
#include "colbandit/rng.hpp"

namespace colbandit::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string query_name(std::size_t q) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "q%04zu", q);
  return buf;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<json> lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      lines.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!lines.back().is_object()) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected an object");
    }
  }
  return lines;
}

std::string string_field(const json& j, const char* key, const fs::path& where) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw FormatError(where.string() + ": missing string field '" + key + "'");
  }
  return j.at(key).get<std::string>();
}

bool has_magic(const fs::path& path, const char (&magic)[4]) {
  std::ifstream in(path, std::ios::binary);
  char head[4] = {};
  in.read(head, 4);
  return in.gcount() == 4 && std::equal(head, head + 4, magic);
}

QueryTokens load_query(const fs::path& path) { return QueryTokens{read_embeddings(path)}; }

std::vector<DocTokens> load_corpus(const fs::path& manifest) {
  std::vector<DocTokens> docs;
  for (const auto& entry : read_manifest(manifest)) {
    docs.push_back(DocTokens{entry.doc_id, read_embeddings(entry.path)});
  }
  return docs;
}

// One Stage-1 + Stage-2 problem built from embeddings.
struct Staged {
  MaxSimOracle oracle;
  CellBounds bounds;
  json artifact;
};

Staged stage_embeddings(std::span<const DocTokens> corpus, const QueryTokens& query,
                        const PipelineConfig& pipeline) {
  auto stage = generate_candidates(corpus, query, pipeline);
  auto oracle = candidate_oracle(corpus, query, stage.candidates, pipeline);
  auto bounds = pipeline.bounds == BoundsMode::Ann ? derive_bounds(stage, pipeline)
                                                   : CellBounds::generic(oracle);
  auto artifact = candidate_artifact(stage, bounds, pipeline);
  return {std::move(oracle), std::move(bounds), std::move(artifact)};
}

json similarity_json(const SimilarityConfig& sim) {
  return json{{"kind", sim.kind == SimilarityKind::Cosine ? "cosine" : "dot"},
              {"range", {sim.range_lo, sim.range_hi}},
              {"clamp_nonnegative", sim.clamp_nonnegative}};
}

SimilarityConfig similarity_from_json(const json& j) {
  SimilarityConfig sim;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "cosine") {
    sim.kind = SimilarityKind::Cosine;
  } else if (kind == "dot") {
    sim.kind = SimilarityKind::Dot;
  } else {
    throw FormatError("unknown similarity kind '" + kind + "'");
  }
  sim.range_lo = j.at("range").at(0).get<double>();
  sim.range_hi = j.at("range").at(1).get<double>();
  sim.clamp_nonnegative = j.value("clamp_nonnegative", false);
  return sim;
}

// Writes through a sibling temp file so a failed run never leaves partial output.
template <class Fn>
void write_atomically(const fs::path& path, Fn&& fill) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    fill(out);
    out.flush();
    if (!out) throw ConfigError("write failed for " + path.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg, std::size_t workers) {
  PreparedData data;
  if (cfg.qrels) data.qrels = QrelSet::load(cfg.qrels->string());
  const std::size_t k = cfg.bandit.k;

  struct Raw {
    std::string id;
    std::optional<MaxSimOracle> oracle;
    CellBounds bounds;
    json artifact;
  };
  std::vector<Raw> raw;

  if (const auto* s = std::get_if<SynthSource>(&cfg.data)) {
    raw.resize(s->num_queries);
    parallel_for(s->num_queries, workers, [&](std::size_t q) {
      SynthSpec spec = s->spec;
      spec.seed = instance_seed(s->spec.seed, q);
      auto& r = raw[q];
      r.id = query_name(q);
      if (s->embed_dim) {
        auto emb = gen_embeddings(spec, *s->embed_dim, s->doc_len);
        auto staged = stage_embeddings(emb.docs, emb.query, cfg.pipeline);
        r.oracle = std::move(staged.oracle);
        r.bounds = std::move(staged.bounds);
      } else {
        SimilarityConfig sim = cfg.pipeline.similarity;
        sim.range_lo = std::min(sim.range_lo, spec.lo);
        sim.range_hi = std::max(sim.range_hi, spec.hi);
        r.oracle = MaxSimOracle::from_matrix(gen_matrix(spec).values, sim);
        r.bounds = CellBounds::generic(*r.oracle);
      }
    });
  } else if (const auto* m = std::get_if<MatrixSource>(&cfg.data)) {
    std::vector<std::pair<std::string, fs::path>> items;
    if (has_magic(m->path, kMatrixMagic)) {
      items.emplace_back(m->path.stem().string(), m->path);
    } else {
      const auto base = m->path.parent_path();
      for (const auto& line : read_jsonl(m->path)) {
        items.emplace_back(string_field(line, "query_id", m->path),
                           resolve(base, string_field(line, "matrix", m->path)));
      }
    }
    raw.resize(items.size());
    parallel_for(items.size(), workers, [&](std::size_t q) {
      raw[q].id = items[q].first;
      raw[q].oracle = MaxSimOracle::from_matrix(read_matrix(items[q].second),
                                                cfg.pipeline.effective_similarity());
      raw[q].bounds = CellBounds::generic(*raw[q].oracle);
    });
  } else {
    const auto& e = std::get<EmbeddingSource>(cfg.data);
    const auto base = e.path.parent_path();
    const auto lines = read_jsonl(e.path);
    struct Item {
      std::string id;
      fs::path query, manifest;
    };
    std::vector<Item> items;
    std::map<fs::path, std::size_t> corpus_slot;
    std::vector<fs::path> manifests;
    for (const auto& line : lines) {
      Item it{string_field(line, "query_id", e.path),
              resolve(base, string_field(line, "path", e.path)),
              resolve(base, string_field(line, "manifest", e.path))};
      if (corpus_slot.emplace(it.manifest, manifests.size()).second) manifests.push_back(it.manifest);
      items.push_back(std::move(it));
    }
    std::vector<std::vector<DocTokens>> corpora(manifests.size());
    parallel_for(manifests.size(), workers,
                 [&](std::size_t c) { corpora[c] = load_corpus(manifests[c]); });
    raw.resize(items.size());
    parallel_for(items.size(), workers, [&](std::size_t q) {
      const auto& it = items[q];
      auto staged = stage_embeddings(corpora[corpus_slot.at(it.manifest)], load_query(it.query),
                                     cfg.pipeline);
      raw[q].id = it.id;
      raw[q].oracle = std::move(staged.oracle);
      raw[q].bounds = std::move(staged.bounds);
      staged.artifact["query_id"] = it.id;
      staged.artifact["query"] = fs::absolute(it.query).string();
      staged.artifact["manifest"] = fs::absolute(it.manifest).string();
      staged.artifact["similarity"] = similarity_json(cfg.pipeline.effective_similarity());
      raw[q].artifact = std::move(staged.artifact);
    });
  }

  data.instances.reserve(raw.size());
  for (auto& r : raw) {
    if (k > r.oracle->rows()) {
      throw ConfigError("config field 'bandit.k': K = " + std::to_string(k) + " exceeds the " +
                        std::to_string(r.oracle->rows()) + " candidates of query " + r.id);
    }
    const RelevantSet* rel = data.qrels.find(r.id);
    data.instances.emplace_back(r.id, std::move(*r.oracle), std::move(r.bounds), k, rel);
    if (!r.artifact.is_null()) data.candidate_artifacts.push_back(std::move(r.artifact));
  }
  spdlog::info("prepared {} queries", data.instances.size());
  return data;
}

std::vector<Evaluation> run_experiment(const ExperimentConfig& cfg,
                                       std::span<const EvalInstance> instances,
                                       std::size_t workers) {
  const std::size_t k = cfg.bandit.k;
  std::vector<Evaluation> evals;
  switch (cfg.mode) {
    case RunMode::Bandit: {
      const auto grid = cfg.alpha_grid.value_or(std::vector<double>{cfg.bandit.radius.alpha_ef});
      evals = sweep_alpha_detailed(instances, cfg.bandit, grid, workers);
      break;
    }
    case RunMode::DocUniform:
    case RunMode::DocTopMargin: {
      const auto grid = cfg.gamma_grid.value_or(std::vector<double>{cfg.gamma});
      const bool uniform = cfg.mode == RunMode::DocUniform;
      const std::uint64_t seed = cfg.bandit.seed;
      for (double gamma : grid) {
        Method method = [&, gamma](const EvalInstance& inst, std::size_t idx) {
          if (uniform) return doc_uniform(inst.oracle, k, BudgetConfig{gamma, instance_seed(seed, idx)});
          return doc_top_margin(inst.oracle, inst.bounds, k, gamma);
        };
        evals.push_back(evaluate(instances, k, std::string(to_string(cfg.mode)), gamma, method,
                                 workers));
      }
      break;
    }
    case RunMode::Full: {
      Method method = [k](const EvalInstance& inst, std::size_t) {
        return full_rerank(inst.oracle, k);
      };
      evals.push_back(evaluate(instances, k, "full", 1.0, method, workers));
      break;
    }
  }
  return evals;
}

void write_results_jsonl(std::ostream& out, std::span<const Evaluation> evals,
                         std::span<const EvalInstance> instances, bool with_trace) {
  for (const auto& ev : evals) {
    for (std::size_t q = 0; q < ev.queries.size(); ++q) {
      const auto& qo = ev.queries[q];
      const auto& ids = instances[q].oracle.doc_ids();
      json j;
      j["query_id"] = qo.query_id;
      j["method"] = ev.point.method;
      j["param"] = ev.point.param;
      json topk = json::array();
      for (auto i : qo.run.topk) topk.push_back(ids[i]);
      j["topk"] = std::move(topk);
      j["coverage"] = qo.run.coverage;
      j["reveals"] = qo.run.reveals.size();
      j["iterations"] = qo.run.iterations;
      j["terminated_by"] = std::string(to_string(qo.run.terminated_by));
      j["overlap"] = qo.overlap;
      if (qo.recall) j["recall"] = *qo.recall;
      if (qo.ndcg) j["ndcg"] = *qo.ndcg;
      if (qo.mrr) j["mrr"] = *qo.mrr;
      if (with_trace) {
        json trace = json::array();
        for (const auto& ev2 : qo.run.reveals) trace.push_back({ev2.row, ev2.col, ev2.value});
        j["trace"] = std::move(trace);
      }
      out << j.dump() << '\n';
    }
  }
}

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  try {
    auto cfg = ExperimentConfig::load(opts.config);
    if (opts.seed) {
      cfg.bandit.seed = *opts.seed;
      if (auto* s = std::get_if<SynthSource>(&cfg.data)) s->spec.seed = *opts.seed;
    }
    const std::size_t workers = std::max<std::size_t>(1, opts.workers);
    auto data = prepare_data(cfg, workers);
    const auto evals = run_experiment(cfg, data.instances, workers);

    std::vector<FrontierPoint> points;
    for (const auto& ev : evals) points.push_back(ev.point);

    write_atomically(cfg.results, [&](std::ostream& o) {
      write_results_jsonl(o, evals, data.instances, opts.trace);
    });
    write_atomically(cfg.frontier,
                     [&](std::ostream& o) { write_frontier_csv(o, points, cfg.bandit.k); });
    if (cfg.candidates_dir) {
      for (const auto& art : data.candidate_artifacts) {
        const auto name = art.at("query_id").get<std::string>() + ".json";
        write_atomically(*cfg.candidates_dir / name,
                         [&](std::ostream& o) { o << art.dump() << '\n'; });
      }
    }
    for (const auto& p : points) {
      out << p.method << " param=" << p.param << " coverage=" << p.mean_coverage
          << " overlap@" << cfg.bandit.k << "=" << p.mean_overlap << " queries=" << p.n_queries
          << '\n';
    }
    spdlog::info("wrote {} and {}", cfg.results.string(), cfg.frontier.string());
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

void write_dataset(const GenConfig& cfg) {
  const auto& root = cfg.output_dir;
  fs::create_directories(root);
  std::ostringstream queries, qrels;
  for (std::size_t q = 0; q < cfg.num_queries; ++q) {
    SynthSpec spec = cfg.spec;
    spec.seed = instance_seed(cfg.spec.seed, q);
    const auto id = query_name(q);
    const fs::path dir = root / id;
    fs::create_directories(dir);
    json line{{"query_id", id}, {"matrix", id + "/matrix.cbh"}};
    std::size_t top_row = 0;
    if (cfg.embed_dim) {
      auto emb = gen_embeddings(spec, *cfg.embed_dim, cfg.doc_len);
      top_row = emb.target.ladder.front();
      write_embeddings(dir / "query.cbm", emb.query.vectors);
      fs::create_directories(dir / "docs");
      std::vector<ManifestEntry> entries;
      for (const auto& d : emb.docs) {
        const fs::path rel = fs::path("docs") / ("d" + d.doc_id + ".cbm");
        write_embeddings(dir / rel, d.vectors);
        entries.push_back({d.doc_id, rel});
      }
      write_manifest(dir / "manifest.jsonl", entries);
      const auto oracle = MaxSimOracle::from_embeddings(emb.query, emb.docs);
      DenseMatrix h(static_cast<std::uint32_t>(oracle.rows()),
                    static_cast<std::uint32_t>(oracle.cols()));
      for (std::size_t i = 0; i < oracle.rows(); ++i) {
        for (std::size_t t = 0; t < oracle.cols(); ++t) {
          h.at(i, t) = static_cast<float>(oracle.maxsim(i, t));
        }
      }
      write_matrix(dir / "matrix.cbh", h);
      line["path"] = id + "/query.cbm";
      line["manifest"] = id + "/manifest.jsonl";
    } else {
      const auto synth = gen_matrix(spec);
      top_row = synth.ladder.front();
      write_matrix(dir / "matrix.cbh", synth.values);
    }
    queries << line.dump() << '\n';
    if (spec.profile != ScoreProfile::UniformRandom) {
      qrels << id << " 0 " << top_row << " 1\n";
    }
  }
  write_atomically(root / "queries.jsonl", [&](std::ostream& o) { o << queries.str(); });
  write_atomically(root / "qrels.txt", [&](std::ostream& o) { o << qrels.str(); });
}

int cmd_gen(const fs::path& spec_path, std::optional<std::uint64_t> seed, std::ostream& out,
            std::ostream& err) {
  try {
    auto cfg = GenConfig::load(spec_path);
    if (seed) cfg.spec.seed = *seed;
    write_dataset(cfg);
    out << "wrote " << cfg.num_queries << " queries to " << cfg.output_dir.string() << '\n';
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

namespace {

class Verifier {
 public:
  explicit Verifier(SimilarityConfig sim) : sim_(sim) {}

  void fail(const std::string& msg) { violations_.push_back(msg); }
  std::size_t violations() const { return violations_.size(); }
  const std::vector<std::string>& messages() const { return violations_; }
  std::size_t files = 0;
  std::size_t cells = 0;

  // Runs a file-level check, recording format errors (short reads, bad magic) as violations.
  template <class Fn>
  void guarded(const fs::path& path, Fn&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      fail(path.string() + ": " + e.what());
    }
  }

  std::optional<EmbeddingMatrix> embeddings(const fs::path& path) {
    std::optional<EmbeddingMatrix> m;
    guarded(path, [&] {
      m = read_embeddings(path);
      ++files;
      if (m->dim == 0) fail(path.string() + ": zero dimension");
      if (m->count() == 0) fail(path.string() + ": no vectors");
      if (sim_.kind == SimilarityKind::Cosine) {
        for (std::size_t j = 0; j < m->count(); ++j) {
          const double norm = std::sqrt(dot(m->row(j), m->row(j)));
          if (std::abs(norm - 1.0) > kNormTolerance) {
            fail(path.string() + ": vector " + std::to_string(j) + " has norm " +
                 std::to_string(norm));
          }
        }
      }
    });
    return m;
  }

  std::optional<DenseMatrix> matrix(const fs::path& path) {
    std::optional<DenseMatrix> m;
    guarded(path, [&] {
      m = read_matrix(path);
      ++files;
      cells += static_cast<std::size_t>(m->rows) * m->cols;
      for (std::size_t i = 0; i < m->rows; ++i) {
        for (std::size_t t = 0; t < m->cols; ++t) {
          const double v = m->at(i, t);
          if (!std::isfinite(v) || v < sim_.range_lo - kNormTolerance ||
              v > sim_.range_hi + kNormTolerance) {
            fail(path.string() + ": cell (" + std::to_string(i) + "," + std::to_string(t) +
                 ") = " + std::to_string(v) + " outside the similarity range");
          }
        }
      }
    });
    return m;
  }

  std::optional<std::vector<DocTokens>> manifest(const fs::path& path) {
    std::optional<std::vector<DocTokens>> docs;
    guarded(path, [&] {
      const auto entries = read_manifest(path);
      ++files;
      std::vector<DocTokens> out;
      std::uint32_t dim = 0;
      for (const auto& e : entries) {
        auto m = embeddings(e.path);
        if (!m) continue;
        if (dim == 0) dim = m->dim;
        if (m->dim != dim) {
          fail(e.path.string() + ": dimension " + std::to_string(m->dim) + " differs from " +
               std::to_string(dim));
        }
        out.push_back(DocTokens{e.doc_id, std::move(*m)});
      }
      if (out.size() == entries.size()) docs = std::move(out);
    });
    return docs;
  }

  // Matrix cells against brute-force scoring of the embeddings on a sampled subset.
  void consistency(const fs::path& where, const DenseMatrix& h, const QueryTokens& query,
                   const std::vector<DocTokens>& docs) {
    if (h.rows != docs.size() || h.cols != query.vectors.count()) {
      fail(where.string() + ": matrix is " + std::to_string(h.rows) + "x" +
           std::to_string(h.cols) + " but embeddings give " + std::to_string(docs.size()) + "x" +
           std::to_string(query.vectors.count()));
      return;
    }
    for (const auto& d : docs) {
      if (d.vectors.dim != query.vectors.dim) {
        fail(where.string() + ": document " + d.doc_id + " dimension differs from the query");
        return;
      }
    }
    SimilarityConfig raw = sim_;
    raw.clamp_nonnegative = false;
    const auto oracle = MaxSimOracle::from_embeddings(query, docs, raw);
    for (const auto& [i, t] : sample(h.rows, h.cols)) {
      ++cells;
      const double truth = oracle.maxsim(i, t);
      if (std::abs(truth - h.at(i, t)) > 1e-5) {
        fail(where.string() + ": cell (" + std::to_string(i) + "," + std::to_string(t) +
             ") stores " + std::to_string(h.at(i, t)) + " but scores " + std::to_string(truth));
      }
    }
  }

  void queries(const fs::path& path) {
    std::vector<json> lines;
    guarded(path, [&] { lines = read_jsonl(path); });
    ++files;
    const auto base = path.parent_path();
    for (const auto& line : lines) {
      guarded(path, [&] {
        const auto id = string_field(line, "query_id", path);
        std::optional<DenseMatrix> h;
        if (line.contains("matrix")) h = matrix(resolve(base, string_field(line, "matrix", path)));
        if (line.contains("path") || line.contains("manifest")) {
          auto q = embeddings(resolve(base, string_field(line, "path", path)));
          auto docs = manifest(resolve(base, string_field(line, "manifest", path)));
          if (q && docs && h) consistency(path.string() + " " + id, *h, QueryTokens{*q}, *docs);
        } else if (!line.contains("matrix")) {
          fail(path.string() + ": query " + id + " names no data file");
        }
      });
    }
  }

  void artifact(const fs::path& path) {
    guarded(path, [&] {
      const auto j = read_json_file(path);
      ++files;
      const auto doc_ids = j.at("doc_ids").get<std::vector<std::string>>();
      const auto lo = j.at("lo").get<std::vector<std::vector<double>>>();
      const auto hi = j.at("hi").get<std::vector<std::vector<double>>>();
      if (lo.size() != doc_ids.size() || hi.size() != doc_ids.size()) {
        fail(path.string() + ": bound rows do not match doc_ids");
        return;
      }
      const SimilarityConfig sim =
          j.contains("similarity") ? similarity_from_json(j.at("similarity")) : sim_;
      const auto query = load_query(resolve(path.parent_path(), j.at("query").get<std::string>()));
      const auto corpus =
          load_corpus(resolve(path.parent_path(), j.at("manifest").get<std::string>()));
      std::map<std::string, const DocTokens*> by_id;
      for (const auto& d : corpus) by_id[d.doc_id] = &d;
      std::vector<DocTokens> docs;
      for (const auto& id : doc_ids) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) {
          fail(path.string() + ": doc " + id + " is not in the manifest");
          return;
        }
        docs.push_back(*it->second);
      }
      const std::size_t cols = query.vectors.count();
      for (std::size_t i = 0; i < docs.size(); ++i) {
        if (lo[i].size() != cols || hi[i].size() != cols) {
          fail(path.string() + ": row " + std::to_string(i) + " has the wrong token count");
          return;
        }
      }
      const auto oracle = MaxSimOracle::from_embeddings(query, std::move(docs), sim);
      for (const auto& [i, t] : sample(oracle.rows(), cols)) {
        ++cells;
        const double h = oracle.maxsim(i, t);
        if (lo[i][t] > h + kNormTolerance || h > hi[i][t] + kNormTolerance) {
          fail(path.string() + ": unsound bound for doc " + doc_ids[i] + " token " +
               std::to_string(t) + ": [" + std::to_string(lo[i][t]) + ", " +
               std::to_string(hi[i][t]) + "] excludes " + std::to_string(h));
        }
      }
    });
  }

 private:
  static constexpr std::size_t kMaxSampled = 4096;

  // Every cell for small matrices, otherwise a fixed-seed sample.
  static std::vector<std::pair<std::size_t, std::size_t>> sample(std::size_t rows,
                                                                 std::size_t cols) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t total = rows * cols;
    if (total <= kMaxSampled) {
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t t = 0; t < cols; ++t) out.emplace_back(i, t);
      }
      return out;
    }
    Rng rng(0);
    for (std::size_t s = 0; s < kMaxSampled; ++s) {
      const auto c = rng.uniform_index(total);
      out.emplace_back(c / cols, c % cols);
    }
    return out;
  }

  SimilarityConfig sim_;
  std::vector<std::string> violations_;
};

}  // namespace

int cmd_verify(const fs::path& data, std::ostream& out, std::ostream& err) {
  if (!fs::exists(data)) {
    err << "error: " << data.string() << " does not exist\n";
    return 2;
  }
  Verifier v{SimilarityConfig{}};
  if (fs::is_directory(data)) {
    if (fs::exists(data / "queries.jsonl")) {
      v.queries(data / "queries.jsonl");
    } else {
      for (const auto& entry : fs::directory_iterator(data)) {
        if (entry.path().extension() == ".json") v.artifact(entry.path());
      }
      if (v.files == 0) v.fail(data.string() + ": no queries.jsonl or candidate artifacts found");
    }
  } else if (has_magic(data, kEmbeddingMagic)) {
    v.embeddings(data);
  } else if (has_magic(data, kMatrixMagic)) {
    v.matrix(data);
  } else if (data.extension() == ".jsonl") {
    std::vector<json> lines;
    v.guarded(data, [&] { lines = read_jsonl(data); });
    if (!lines.empty() && lines.front().contains("doc_id")) {
      v.manifest(data);
    } else if (!lines.empty()) {
      v.queries(data);
    } else if (v.violations() == 0) {
      v.fail(data.string() + ": empty file");
    }
  } else if (data.extension() == ".json") {
    v.artifact(data);
  } else {
    // Binary file whose magic did not match: let the reader produce the diagnosis.
    v.matrix(data);
  }

  if (v.violations() == 0) {
    out << "verify: PASS (" << v.files << " files, " << v.cells << " cells checked)\n";
    return 0;
  }
  out << "verify: FAIL (" << v.violations() << " violations)\n";
  const auto& msgs = v.messages();
  for (std::size_t i = 0; i < std::min<std::size_t>(10, msgs.size()); ++i) {
    out << "  " << msgs[i] << '\n';
  }
  return 1;
}

void configure_logging() {
  auto logger = spdlog::get("colbandit");
  if (!logger) logger = spdlog::stderr_logger_mt("colbandit");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("COL_BANDIT_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
  }
}

}  // namespace colbandit::cli
