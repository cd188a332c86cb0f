#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "treevote/ensemble.hpp"
#include "treevote/serialize.hpp"

namespace treevote {

struct ModelConfig {
  std::string name;
  LearnerSpec spec;
};

struct EvaluationMode {
  bool split = false;
  double test_fraction = 0.3;
  std::uint64_t seed = 0;
};

struct PipelineConfig {
  /// "synthetic(seed,n)" or a CSV path.
  std::string input = "synthetic(7,121)";
  std::filesystem::path schema;
  double alpha = 0.05;
  EvaluationMode evaluation;
  std::vector<ModelConfig> models;
  std::vector<std::string> committee_members;
  std::filesystem::path output_dir = "treevote_out";
  std::uint64_t master_seed = 1;
  bool parallel = false;
  bool svg = true;
};

/// Random forest, boosted, CART and CHAID with default parameters.
std::vector<ModelConfig> default_models();

/// Relative paths are resolved against base_dir. Unknown keys, bad values
/// and committee members that name no model are Config errors.
PipelineConfig parse_pipeline_config(const Json& doc, const std::filesystem::path& base_dir);
Json pipeline_config_to_json(const PipelineConfig& config);

LearnerSpec learner_spec_from_json(const std::string& kind, const Json& params);
Json learner_spec_to_json(const LearnerSpec& spec);

/// Output files keyed by path relative to the output directory.
struct ReportBundle {
  std::map<std::string, std::string> files;
  /// Accuracy table printed to the console.
  std::string console;
};

/// Generate or load data, screen features, train every model, evaluate,
/// vote, and assemble the bundle. Nothing is written here.
ReportBundle run_pipeline(const PipelineConfig& config);

/// Writes every bundle file under dir, creating directories. OutputWrite on failure.
void write_bundle(const ReportBundle& bundle, const std::filesystem::path& dir);

/// Resolves `input`: synthetic(seed,n) or CSV + schema files.
Dataset resolve_input(const std::string& input, const std::filesystem::path& schema_path);

struct CommandOptions {
  std::filesystem::path config_path;
  std::optional<std::filesystem::path> out_dir;
  std::optional<std::uint64_t> seed;
};

/// Runs one CLI subcommand (gen, select, train, evaluate, pipeline, render)
/// to completion, writing its outputs. Returns console text.
std::string run_command(const std::string& command, const CommandOptions& options);

std::string read_file(const std::filesystem::path& path, ErrorCode code);

}  // namespace treevote
