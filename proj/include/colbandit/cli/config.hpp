#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "colbandit/bandit.hpp"
#include "colbandit/pipeline.hpp"
#include "colbandit/synth.hpp"
#include "json.hpp"

namespace colbandit::cli {

enum class RunMode { Bandit, DocUniform, DocTopMargin, Full };

std::string_view to_string(RunMode m) noexcept;

/// Synthetic queries generated from one spec; query j uses
/// instance_seed(spec.seed, j). With `embed_dim` set, embeddings are
/// generated and sent through the Stage-1 pipeline.
struct SynthSource {
  SynthSpec spec;
  std::size_t num_queries = 1;
  std::optional<std::size_t> embed_dim;
  std::size_t doc_len = 32;
};

/// A single "CBH1" file, or a JSON-lines query list with a "matrix" path per line.
struct MatrixSource {
  std::filesystem::path path;
};

/// JSON-lines query list: {"query_id", "path" (CBM1 query), "manifest"}.
struct EmbeddingSource {
  std::filesystem::path path;
};

using DataSource = std::variant<SynthSource, MatrixSource, EmbeddingSource>;

struct ExperimentConfig {
  RunMode mode = RunMode::Bandit;
  DataSource data;
  std::optional<std::filesystem::path> qrels;
  PipelineConfig pipeline;
  BanditConfig bandit;
  double gamma = 1.0;  // single-budget runs of the static baselines
  std::optional<std::vector<double>> alpha_grid;
  std::optional<std::vector<double>> gamma_grid;
  std::filesystem::path results = "results.jsonl";
  std::filesystem::path frontier = "frontier.csv";
  std::optional<std::filesystem::path> candidates_dir;

  /// Relative paths are resolved against `base_dir`. Throws ConfigError
  /// naming the offending field.
  static ExperimentConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static ExperimentConfig load(const std::filesystem::path& path);
};

/// Parses a synth spec object ({"n", "t", "profile", "value_range", ...}).
SynthSpec parse_synth_spec(const nlohmann::json& j, const std::string& where);

struct GenConfig {
  SynthSpec spec;
  std::size_t num_queries = 1;
  std::optional<std::size_t> embed_dim;
  std::size_t doc_len = 32;
  std::filesystem::path output_dir = "data";

  static GenConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  static GenConfig load(const std::filesystem::path& path);
};

/// Reads a JSON file; throws ConfigError with the file name on parse errors.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace colbandit::cli
