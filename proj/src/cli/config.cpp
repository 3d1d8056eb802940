#include "colbandit/cli/config.hpp"

#include <fstream>
#include <set>

#include "colbandit/errors.hpp"
#include "colbandit/eval.hpp"

namespace colbandit::cli {

using nlohmann::json;

std::string_view to_string(RunMode m) noexcept {
  switch (m) {
    case RunMode::Bandit: return "bandit";
    case RunMode::DocUniform: return "doc-uniform";
    case RunMode::DocTopMargin: return "doc-top-margin";
    case RunMode::Full: return "full";
  }
  return "unknown";
}

namespace {

// Typed access to one JSON object with field paths in every error message.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(where_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& field, const std::string& msg) {
    throw ConfigError("config field '" + field + "': " + msg);
  }

  std::string path(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) const { return j_.at(key); }

  void only(std::initializer_list<const char*> allowed) const {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j_.items()) {
      if (!ok.count(key)) fail(path(key), "unknown field");
    }
  }

  double number(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(path(key), "expected a number");
    return v.get<double>();
  }

  std::size_t count(const std::string& key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      fail(path(key), "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  std::uint64_t seed(const std::string& key, std::uint64_t fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      fail(path(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(path(key), "expected a string");
    return v.get<std::string>();
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail(path(key), "expected true or false");
    return v.get<bool>();
  }

  std::pair<double, double> range(const std::string& key, std::pair<double, double> fallback) const {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(path(key), "expected [lo, hi]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  std::filesystem::path file(const std::string& key, const std::filesystem::path& base) const {
    auto p = std::filesystem::path(text(key, ""));
    if (p.empty()) fail(path(key), "expected a path");
    return p.is_relative() ? base / p : p;
  }

  std::optional<std::vector<double>> grid(const std::string& key,
                                          std::vector<double> (*fallback)()) const {
    if (!has(key)) return std::nullopt;
    const auto& v = j_.at(key);
    if (v.is_string() && v.get<std::string>() == "default") return fallback();
    if (!v.is_array() || v.empty()) fail(path(key), "expected \"default\" or a non-empty array");
    std::vector<double> g;
    for (const auto& x : v) {
      if (!x.is_number()) fail(path(key), "grid entries must be numbers");
      g.push_back(x.get<double>());
    }
    return g;
  }

 private:
  const json& j_;
  std::string where_;
};

template <class Fn>
void rethrow_as(const std::string& field, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    if (msg.rfind("config field", 0) == 0) throw;
    Fields::fail(field, msg);
  }
}

SimilarityConfig parse_similarity(const Fields& root) {
  SimilarityConfig sim;
  if (!root.has("similarity")) return sim;
  Fields f(root.raw("similarity"), root.path("similarity"));
  f.only({"kind", "range"});
  const auto kind = f.text("kind", "cosine");
  if (kind == "cosine") {
    sim.kind = SimilarityKind::Cosine;
  } else if (kind == "dot") {
    sim.kind = SimilarityKind::Dot;
  } else {
    Fields::fail(f.path("kind"), "expected \"cosine\" or \"dot\"");
  }
  std::tie(sim.range_lo, sim.range_hi) = f.range("range", {sim.range_lo, sim.range_hi});
  rethrow_as(f.path("range"), [&] { sim.validate(); });
  return sim;
}

BanditConfig parse_bandit(const Fields& root) {
  BanditConfig b;
  if (!root.has("bandit")) return b;
  Fields f(root.raw("bandit"), root.path("bandit"));
  f.only({"k", "delta", "alpha_ef", "epsilon", "explore", "gamma_init", "seed", "c", "union",
          "hard_only"});
  b.k = f.count("k", b.k);
  b.radius.delta = f.number("delta", b.radius.delta);
  b.radius.alpha_ef = f.number("alpha_ef", b.radius.alpha_ef);
  b.radius.c = f.number("c", b.radius.c);
  b.epsilon = f.number("epsilon", b.epsilon);
  b.gamma_init = f.number("gamma_init", b.gamma_init);
  b.seed = f.seed("seed", b.seed);
  b.radius.hard_only = f.flag("hard_only", b.radius.hard_only);
  const auto explore = f.text("explore", "epsilon-greedy");
  if (explore == "epsilon-greedy") {
    b.explore = ExploreMode::EpsilonGreedy;
  } else if (explore == "static-warmup") {
    b.explore = ExploreMode::StaticWarmup;
  } else if (explore == "uniform-row") {
    b.explore = ExploreMode::UniformRow;
  } else {
    Fields::fail(f.path("explore"), "expected epsilon-greedy, static-warmup or uniform-row");
  }
  const auto uni = f.text("union", "per-document");
  if (uni == "per-document") {
    b.radius.union_mode = UnionMode::PerDocument;
  } else if (uni == "per-document-and-size") {
    b.radius.union_mode = UnionMode::PerDocumentAndSize;
  } else {
    Fields::fail(f.path("union"), "expected per-document or per-document-and-size");
  }
  if (b.k < 1) Fields::fail(f.path("k"), "must be at least 1");
  rethrow_as(f.path("alpha_ef/delta/c/epsilon/gamma_init"), [&] { b.validate(); });
  return b;
}

PipelineConfig parse_pipeline(const Fields& root, SimilarityConfig sim) {
  PipelineConfig p;
  p.similarity = sim;
  if (!root.has("pipeline")) return p;
  Fields f(root.raw("pipeline"), root.path("pipeline"));
  f.only({"k_prime", "bounds", "negatives"});
  p.k_prime = f.count("k_prime", p.k_prime);
  if (p.k_prime < 1) Fields::fail(f.path("k_prime"), "must be at least 1");
  const auto bounds = f.text("bounds", "ann");
  if (bounds == "ann") {
    p.bounds = BoundsMode::Ann;
  } else if (bounds == "generic") {
    p.bounds = BoundsMode::Generic;
  } else {
    Fields::fail(f.path("bounds"), "expected \"ann\" or \"generic\"");
  }
  const auto neg = f.text("negatives", "clamp");
  if (neg == "clamp") {
    p.negatives = NegativePolicy::Clamp;
  } else if (neg == "widen") {
    p.negatives = NegativePolicy::Widen;
  } else {
    Fields::fail(f.path("negatives"), "expected \"clamp\" or \"widen\"");
  }
  return p;
}

struct SynthExtras {
  std::size_t num_queries = 1;
  std::optional<std::size_t> embed_dim;
  std::size_t doc_len = 32;
};

SynthExtras parse_synth_extras(const Fields& f) {
  SynthExtras x;
  x.num_queries = f.count("num_queries", 1);
  if (x.num_queries < 1) Fields::fail(f.path("num_queries"), "must be at least 1");
  if (f.has("embeddings")) {
    Fields e(f.raw("embeddings"), f.path("embeddings"));
    e.only({"dim", "doc_len"});
    x.embed_dim = e.count("dim", 48);
    x.doc_len = e.count("doc_len", 32);
    if (*x.embed_dim < 2) Fields::fail(e.path("dim"), "must be at least 2");
    if (x.doc_len < 1) Fields::fail(e.path("doc_len"), "must be at least 1");
  }
  return x;
}

}  // namespace

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
}

SynthSpec parse_synth_spec(const json& j, const std::string& where) {
  Fields f(j, where);
  f.only({"n", "t", "profile", "value_range", "noise_scale", "k", "ladder_gap", "seed"});
  SynthSpec s;
  s.n = f.count("n", s.n);
  s.t = f.count("t", s.t);
  rethrow_as(f.path("profile"), [&] { s.profile = parse_profile(f.text("profile", "uniform-random")); });
  std::tie(s.lo, s.hi) = f.range("value_range", {s.lo, s.hi});
  s.noise_scale = f.number("noise_scale", s.noise_scale);
  s.k = f.count("k", s.k);
  if (f.has("ladder_gap")) s.ladder_gap = f.number("ladder_gap", 0.0);
  s.seed = f.seed("seed", s.seed);
  rethrow_as(where, [&] { s.validate(); });
  return s;
}

ExperimentConfig ExperimentConfig::from_json(const json& j, const std::filesystem::path& base) {
  Fields root(j, "");
  root.only({"mode", "data", "qrels", "similarity", "pipeline", "bandit", "budget", "sweep",
             "output"});
  ExperimentConfig c;

  const auto mode = root.text("mode", "bandit");
  if (mode == "bandit") {
    c.mode = RunMode::Bandit;
  } else if (mode == "doc-uniform") {
    c.mode = RunMode::DocUniform;
  } else if (mode == "doc-top-margin") {
    c.mode = RunMode::DocTopMargin;
  } else if (mode == "full") {
    c.mode = RunMode::Full;
  } else {
    Fields::fail("mode", "expected bandit, doc-uniform, doc-top-margin or full");
  }

  if (!root.has("data")) Fields::fail("data", "missing");
  Fields data(root.raw("data"), "data");
  const int sources = int(data.has("synth")) + int(data.has("matrix")) +
                      int(data.has("embeddings") && !data.has("synth"));
  if (sources != 1) {
    Fields::fail("data", "exactly one of synth, matrix, embeddings is required");
  }
  if (data.has("synth")) {
    data.only({"synth", "num_queries", "embeddings"});
    SynthSource s;
    s.spec = parse_synth_spec(data.raw("synth"), "data.synth");
    const auto extras = parse_synth_extras(data);
    s.num_queries = extras.num_queries;
    s.embed_dim = extras.embed_dim;
    s.doc_len = extras.doc_len;
    c.data = s;
  } else if (data.has("matrix")) {
    data.only({"matrix"});
    c.data = MatrixSource{data.file("matrix", base)};
    if (!std::filesystem::exists(std::get<MatrixSource>(c.data).path)) {
      Fields::fail("data.matrix", "file does not exist");
    }
  } else {
    data.only({"embeddings"});
    c.data = EmbeddingSource{data.file("embeddings", base)};
    if (!std::filesystem::exists(std::get<EmbeddingSource>(c.data).path)) {
      Fields::fail("data.embeddings", "file does not exist");
    }
  }

  if (root.has("qrels")) {
    c.qrels = root.file("qrels", base);
    if (!std::filesystem::exists(*c.qrels)) Fields::fail("qrels", "file does not exist");
  }

  const auto sim = parse_similarity(root);
  c.pipeline = parse_pipeline(root, sim);
  c.bandit = parse_bandit(root);

  if (root.has("budget")) {
    Fields b(root.raw("budget"), "budget");
    b.only({"gamma"});
    c.gamma = b.number("gamma", c.gamma);
  }
  if (!(c.gamma > 0.0 && c.gamma <= 1.0)) Fields::fail("budget.gamma", "must lie in (0, 1]");

  if (root.has("sweep")) {
    Fields s(root.raw("sweep"), "sweep");
    s.only({"alpha", "gamma"});
    c.alpha_grid = s.grid("alpha", &default_alpha_grid);
    c.gamma_grid = s.grid("gamma", &default_gamma_grid);
    if (c.alpha_grid) {
      for (double a : *c.alpha_grid) {
        if (!(a > 0.0 && a <= 1.0)) Fields::fail("sweep.alpha", "values must lie in (0, 1]");
      }
    }
    if (c.gamma_grid) {
      for (double g : *c.gamma_grid) {
        if (!(g > 0.0 && g <= 1.0)) Fields::fail("sweep.gamma", "values must lie in (0, 1]");
      }
    }
  }

  c.results = base / c.results;
  c.frontier = base / c.frontier;
  if (root.has("output")) {
    Fields o(root.raw("output"), "output");
    o.only({"results", "frontier", "candidates"});
    if (o.has("results")) c.results = o.file("results", base);
    if (o.has("frontier")) c.frontier = o.file("frontier", base);
    if (o.has("candidates")) c.candidates_dir = o.file("candidates", base);
  }

  const bool has_embeddings =
      std::holds_alternative<EmbeddingSource>(c.data) ||
      (std::holds_alternative<SynthSource>(c.data) && std::get<SynthSource>(c.data).embed_dim);
  if (!has_embeddings && c.pipeline.bounds == BoundsMode::Ann && root.has("pipeline") &&
      Fields(root.raw("pipeline"), "pipeline").has("bounds")) {
    Fields::fail("pipeline.bounds", "ann bounds need an embedding data source");
  }
  if (!has_embeddings) c.pipeline.bounds = BoundsMode::Generic;
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path), path.parent_path());
}

GenConfig GenConfig::from_json(const json& j, const std::filesystem::path& base) {
  Fields root(j, "");
  root.only({"synth", "num_queries", "embeddings", "output_dir"});
  if (!root.has("synth")) Fields::fail("synth", "missing");
  GenConfig g;
  g.spec = parse_synth_spec(root.raw("synth"), "synth");
  const auto extras = parse_synth_extras(root);
  g.num_queries = extras.num_queries;
  g.embed_dim = extras.embed_dim;
  g.doc_len = extras.doc_len;
  g.output_dir = root.has("output_dir") ? root.file("output_dir", base) : base / "data";
  return g;
}

GenConfig GenConfig::load(const std::filesystem::path& path) {
  return from_json(read_json_file(path), path.parent_path());
}

}  // namespace colbandit::cli
