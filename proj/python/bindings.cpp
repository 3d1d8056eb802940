#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <string>
#include <vector>

#include "colbandit/bandit.hpp"
#include "colbandit/baselines.hpp"
#include "colbandit/bounds.hpp"
#include "colbandit/errors.hpp"
#include "colbandit/eval.hpp"
#include "colbandit/matrix_oracle.hpp"
#include "colbandit/pipeline.hpp"
#include "colbandit/synth.hpp"

namespace py = pybind11;
using namespace colbandit;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

EmbeddingMatrix to_embeddings(const FloatArray& a) {
  if (a.ndim() != 2) throw UsageError("embeddings must be a 2-d array (count, dim)");
  EmbeddingMatrix m;
  m.dim = static_cast<std::uint32_t>(a.shape(1));
  m.values.assign(a.data(), a.data() + a.size());
  return m;
}

py::array_t<float> from_embeddings(const EmbeddingMatrix& m) {
  py::array_t<float> out({m.count(), static_cast<std::size_t>(m.dim)});
  std::memcpy(out.mutable_data(), m.values.data(), m.values.size() * sizeof(float));
  return out;
}

DenseMatrix to_matrix(const FloatArray& a) {
  if (a.ndim() != 2) throw UsageError("matrix must be a 2-d array (N, T)");
  DenseMatrix m(static_cast<std::uint32_t>(a.shape(0)), static_cast<std::uint32_t>(a.shape(1)));
  m.values.assign(a.data(), a.data() + a.size());
  return m;
}

py::array_t<double> grid(const std::vector<double>& flat, std::size_t rows, std::size_t cols) {
  py::array_t<double> out({rows, cols});
  std::memcpy(out.mutable_data(), flat.data(), flat.size() * sizeof(double));
  return out;
}

SimilarityConfig make_similarity(const std::string& kind, double lo, double hi, bool clamp) {
  SimilarityConfig s;
  if (kind == "cosine") {
    s.kind = SimilarityKind::Cosine;
  } else if (kind == "dot") {
    s.kind = SimilarityKind::Dot;
  } else {
    throw UsageError("similarity must be 'cosine' or 'dot'");
  }
  s.range_lo = lo;
  s.range_hi = hi;
  s.clamp_nonnegative = clamp;
  return s;
}

std::vector<DocTokens> to_docs(const std::vector<FloatArray>& docs,
                               const std::vector<std::string>& ids) {
  if (!ids.empty() && ids.size() != docs.size()) throw UsageError("doc_ids and docs differ in length");
  std::vector<DocTokens> out;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    out.push_back(DocTokens{ids.empty() ? std::to_string(i) : ids[i], to_embeddings(docs[i])});
  }
  return out;
}

SynthSpec make_spec(std::size_t n, std::size_t t, const std::string& profile, double lo, double hi,
                    double noise_scale, std::size_t k, std::optional<double> ladder_gap,
                    std::uint64_t seed) {
  SynthSpec s;
  s.n = n;
  s.t = t;
  s.profile = parse_profile(profile);
  s.lo = lo;
  s.hi = hi;
  s.noise_scale = noise_scale;
  s.k = k;
  s.ladder_gap = ladder_gap;
  s.seed = seed;
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adaptive Top-K reranking over MaxSim matrices";

  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);

  py::class_<MaxSimOracle>(m, "MaxSimOracle")
      .def_static(
          "from_matrix",
          [](const FloatArray& h, const std::string& kind, double lo, double hi) {
            return MaxSimOracle::from_matrix(to_matrix(h), make_similarity(kind, lo, hi, false));
          },
          py::arg("matrix"), py::arg("similarity") = "cosine", py::arg("range_lo") = -1.0,
          py::arg("range_hi") = 1.0)
      .def_static(
          "from_embeddings",
          [](const FloatArray& query, const std::vector<FloatArray>& docs,
             const std::vector<std::string>& doc_ids, const std::string& kind, double lo,
             double hi, bool clamp) {
            return MaxSimOracle::from_embeddings(QueryTokens{to_embeddings(query)},
                                                 to_docs(docs, doc_ids),
                                                 make_similarity(kind, lo, hi, clamp));
          },
          py::arg("query"), py::arg("docs"), py::arg("doc_ids") = std::vector<std::string>{},
          py::arg("similarity") = "cosine", py::arg("range_lo") = -1.0,
          py::arg("range_hi") = 1.0, py::arg("clamp_nonnegative") = false)
      .def_property_readonly("rows", &MaxSimOracle::rows)
      .def_property_readonly("cols", &MaxSimOracle::cols)
      .def_property_readonly("doc_ids", &MaxSimOracle::doc_ids)
      .def("maxsim", &MaxSimOracle::maxsim, py::arg("i"), py::arg("t"))
      .def("full_score", &MaxSimOracle::full_score, py::arg("i"))
      .def("full_scores", &MaxSimOracle::full_scores);

  py::class_<CellBounds>(m, "CellBounds")
      .def_static("uniform", &CellBounds::uniform, py::arg("rows"), py::arg("cols"),
                  py::arg("lo"), py::arg("hi"))
      .def_static("generic", &CellBounds::generic, py::arg("oracle"))
      .def_static(
          "from_arrays",
          [](const DoubleArray& lo, const DoubleArray& hi) {
            if (lo.ndim() != 2 || hi.ndim() != 2 || lo.shape(0) != hi.shape(0) ||
                lo.shape(1) != hi.shape(1)) {
              throw UsageError("lo and hi must be 2-d arrays of the same shape");
            }
            CellBounds b(static_cast<std::size_t>(lo.shape(0)),
                         static_cast<std::size_t>(lo.shape(1)), 0.0, 0.0);
            b.lo.assign(lo.data(), lo.data() + lo.size());
            b.hi.assign(hi.data(), hi.data() + hi.size());
            b.validate();
            return b;
          },
          py::arg("lo"), py::arg("hi"))
      .def_readonly("rows", &CellBounds::rows)
      .def_readonly("cols", &CellBounds::cols)
      .def_property_readonly("lo", [](const CellBounds& b) { return grid(b.lo, b.rows, b.cols); })
      .def_property_readonly("hi", [](const CellBounds& b) { return grid(b.hi, b.rows, b.cols); });

  py::class_<BanditConfig>(m, "BanditConfig")
      .def(py::init([](std::size_t k, double alpha_ef, double delta, double epsilon,
                       const std::string& explore, double gamma_init, std::uint64_t seed,
                       double c, const std::string& union_mode, bool hard_only) {
             BanditConfig cfg;
             cfg.k = k;
             cfg.epsilon = epsilon;
             if (explore == "epsilon-greedy") {
               cfg.explore = ExploreMode::EpsilonGreedy;
             } else if (explore == "static-warmup") {
               cfg.explore = ExploreMode::StaticWarmup;
             } else if (explore == "uniform-row") {
               cfg.explore = ExploreMode::UniformRow;
             } else {
               throw UsageError("explore must be epsilon-greedy, static-warmup or uniform-row");
             }
             cfg.gamma_init = gamma_init;
             cfg.seed = seed;
             cfg.radius.alpha_ef = alpha_ef;
             cfg.radius.delta = delta;
             cfg.radius.c = c;
             cfg.radius.hard_only = hard_only;
             if (union_mode == "per-document") {
               cfg.radius.union_mode = UnionMode::PerDocument;
             } else if (union_mode == "per-document-and-size") {
               cfg.radius.union_mode = UnionMode::PerDocumentAndSize;
             } else {
               throw UsageError("union_mode must be per-document or per-document-and-size");
             }
             cfg.validate();
             return cfg;
           }),
           py::arg("k") = 5, py::arg("alpha_ef") = 1.0, py::arg("delta") = 0.01,
           py::arg("epsilon") = 0.1, py::arg("explore") = "epsilon-greedy",
           py::arg("gamma_init") = 0.0, py::arg("seed") = 0, py::arg("c") = 1.0,
           py::arg("union_mode") = "per-document", py::arg("hard_only") = false)
      .def_readonly("k", &BanditConfig::k)
      .def_readonly("epsilon", &BanditConfig::epsilon)
      .def_readonly("seed", &BanditConfig::seed)
      .def_property_readonly("alpha_ef", [](const BanditConfig& c) { return c.radius.alpha_ef; })
      .def_property_readonly("delta", [](const BanditConfig& c) { return c.radius.delta; });

  py::class_<RunResult>(m, "RunResult")
      .def_readonly("topk", &RunResult::topk)
      .def_readonly("coverage", &RunResult::coverage)
      .def_readonly("iterations", &RunResult::iterations)
      .def_property_readonly("terminated_by",
                             [](const RunResult& r) { return std::string(to_string(r.terminated_by)); })
      .def_property_readonly("reveals", [](const RunResult& r) {
        std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> out;
        out.reserve(r.reveals.size());
        for (const auto& e : r.reveals) out.emplace_back(e.row, e.col, e.value);
        return out;
      });

  m.def("run", &colbandit::run, py::arg("oracle"), py::arg("bounds"), py::arg("config"),
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "doc_uniform",
      [](const MaxSimOracle& o, std::size_t k, double gamma, std::uint64_t seed) {
        return doc_uniform(o, k, BudgetConfig{gamma, seed});
      },
      py::arg("oracle"), py::arg("k"), py::arg("gamma"), py::arg("seed") = 0);
  m.def("doc_top_margin", &doc_top_margin, py::arg("oracle"), py::arg("bounds"), py::arg("k"),
        py::arg("gamma"));
  m.def("full_rerank", &full_rerank, py::arg("oracle"), py::arg("k"));
  m.def("exact_topk", &exact_topk, py::arg("oracle"), py::arg("k"));

  m.def(
      "overlap_at_k",
      [](const std::vector<std::size_t>& approx, const std::vector<std::size_t>& exact,
         std::size_t k) { return overlap_at_k(approx, exact, k); },
      py::arg("approx"), py::arg("exact"), py::arg("k"));
  m.def(
      "recall_at_k",
      [](const std::vector<std::string>& ranked, const RelevantSet& rel, std::size_t k) {
        return recall_at_k(ranked, rel, k);
      },
      py::arg("ranked"), py::arg("relevant"), py::arg("k"));
  m.def(
      "mrr_at_k",
      [](const std::vector<std::string>& ranked, const RelevantSet& rel, std::size_t k) {
        return mrr_at_k(ranked, rel, k);
      },
      py::arg("ranked"), py::arg("relevant"), py::arg("k"));
  m.def(
      "ndcg_at_k",
      [](const std::vector<std::string>& ranked, const RelevantSet& rel, std::size_t k) {
        return ndcg_at_k(ranked, rel, k);
      },
      py::arg("ranked"), py::arg("relevant"), py::arg("k"));

  m.def("fp_correction", &fp_correction, py::arg("n"), py::arg("cols"));
  m.def(
      "effective_radius",
      [](const std::vector<double>& observed, std::size_t cols, std::size_t rows, double alpha_ef,
         double delta, double c, const std::string& union_mode) {
        RowStats stats;
        for (double v : observed) stats.push(v);
        RadiusConfig cfg;
        cfg.alpha_ef = alpha_ef;
        cfg.delta = delta;
        cfg.c = c;
        cfg.union_mode = union_mode == "per-document-and-size" ? UnionMode::PerDocumentAndSize
                                                               : UnionMode::PerDocument;
        cfg.validate();
        return effective_radius(stats, cols, cfg, rows);
      },
      py::arg("observed"), py::arg("cols"), py::arg("rows"), py::arg("alpha_ef") = 1.0,
      py::arg("delta") = 0.01, py::arg("c") = 1.0, py::arg("union_mode") = "per-document");

  m.def(
      "gen_matrix",
      [](std::size_t n, std::size_t t, const std::string& profile, double lo, double hi,
         double noise_scale, std::size_t k, std::optional<double> ladder_gap, std::uint64_t seed) {
        const auto s = gen_matrix(make_spec(n, t, profile, lo, hi, noise_scale, k, ladder_gap, seed));
        py::array_t<float> values({static_cast<std::size_t>(s.values.rows),
                                   static_cast<std::size_t>(s.values.cols)});
        std::memcpy(values.mutable_data(), s.values.values.data(),
                    s.values.values.size() * sizeof(float));
        return py::make_tuple(values, s.row_means, s.ladder);
      },
      py::arg("n") = 50, py::arg("t") = 32, py::arg("profile") = "uniform-random",
      py::arg("lo") = -1.0, py::arg("hi") = 1.0, py::arg("noise_scale") = 0.05,
      py::arg("k") = 5, py::arg("ladder_gap") = py::none(), py::arg("seed") = 0);
  m.def(
      "gen_embeddings",
      [](std::size_t n, std::size_t t, const std::string& profile, double lo, double hi,
         double noise_scale, std::size_t k, std::optional<double> ladder_gap, std::uint64_t seed,
         std::size_t dim, std::size_t doc_len) {
        const auto e = gen_embeddings(
            make_spec(n, t, profile, lo, hi, noise_scale, k, ladder_gap, seed), dim, doc_len);
        py::list docs;
        for (const auto& d : e.docs) docs.append(from_embeddings(d.vectors));
        return py::make_tuple(from_embeddings(e.query.vectors), docs, e.target.ladder);
      },
      py::arg("n") = 50, py::arg("t") = 32, py::arg("profile") = "uniform-random",
      py::arg("lo") = 0.0, py::arg("hi") = 1.0, py::arg("noise_scale") = 0.05,
      py::arg("k") = 5, py::arg("ladder_gap") = py::none(), py::arg("seed") = 0,
      py::arg("dim") = 48, py::arg("doc_len") = 32);

  m.def(
      "generate_candidates",
      [](const FloatArray& query, const std::vector<FloatArray>& docs,
         const std::vector<std::string>& doc_ids, std::size_t k_prime, const std::string& bounds,
         const std::string& negatives) {
        PipelineConfig cfg;
        cfg.k_prime = k_prime;
        cfg.bounds = bounds == "generic" ? BoundsMode::Generic : BoundsMode::Ann;
        cfg.negatives = negatives == "widen" ? NegativePolicy::Widen : NegativePolicy::Clamp;
        const QueryTokens q{to_embeddings(query)};
        const auto corpus = to_docs(docs, doc_ids);
        const auto stage = generate_candidates(corpus, q, cfg);
        auto oracle = candidate_oracle(corpus, q, stage.candidates, cfg);
        auto cell = cfg.bounds == BoundsMode::Ann ? derive_bounds(stage, cfg)
                                                  : CellBounds::generic(oracle);
        return py::make_tuple(std::move(oracle), std::move(cell), stage.candidates.corpus_index);
      },
      py::arg("query"), py::arg("docs"), py::arg("doc_ids") = std::vector<std::string>{},
      py::arg("k_prime") = 10, py::arg("bounds") = "ann", py::arg("negatives") = "clamp");
}
