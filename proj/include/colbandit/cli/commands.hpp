#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "colbandit/cli/config.hpp"
#include "colbandit/eval.hpp"

namespace colbandit::cli {

/// Stage-2 instances built from the configured data source, in query order.
struct PreparedData {
  std::vector<EvalInstance> instances;
  QrelSet qrels;
  std::vector<nlohmann::json> candidate_artifacts;  // file-backed embedding sources only
};

PreparedData prepare_data(const ExperimentConfig& cfg, std::size_t workers = 1);

/// Every operating point the configured mode and sweep call for.
std::vector<Evaluation> run_experiment(const ExperimentConfig& cfg,
                                       std::span<const EvalInstance> instances,
                                       std::size_t workers = 1);

/// One JSON object per (operating point, query).
void write_results_jsonl(std::ostream& out, std::span<const Evaluation> evals,
                         std::span<const EvalInstance> instances, bool with_trace);

struct RunOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;  // overrides bandit.seed and the synth seed
  std::size_t workers = 1;
  bool trace = false;
};

/// Exit codes: 0 success, 1 failed checks (verify), 2 configuration or I/O error.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gen(const std::filesystem::path& spec_path, std::optional<std::uint64_t> seed,
            std::ostream& out, std::ostream& err);
int cmd_verify(const std::filesystem::path& data, std::ostream& out, std::ostream& err);

/// Writes the generated dataset: queries.jsonl, per-query matrix (and
/// embedding files plus manifest when embed_dim is set) and qrels.txt
/// marking each query's top ladder row relevant.
void write_dataset(const GenConfig& cfg);

/// Log level from COL_BANDIT_LOG (trace, debug, info, warn, error, off).
void configure_logging();

}  // namespace colbandit::cli
