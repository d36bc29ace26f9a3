#pragma once

// Run configuration and the subcommands behind the command-line tool.
// Each command writes its files and returns a short human summary.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tscale/harness.hpp"

namespace tscale {

struct DatasetConfig {
  std::string id;
  std::vector<std::filesystem::path> edges;
  std::optional<std::filesystem::path> archive;
  Timestamp resolution = 1;
  std::optional<Timestamp> origin;
  char delimiter = ',';
  std::optional<std::filesystem::path> attributes;
  std::string target;
  std::vector<std::string> continuous;
  std::optional<std::string> positive;
  std::optional<std::filesystem::path> change_points;
};

struct SweepConfig {
  std::vector<std::size_t> m_values;
  std::vector<std::size_t> b_values;
  std::size_t fixed = 10;
  SelectorKind selector = SelectorKind::OnlineWeighted;
};

struct RunConfig {
  DatasetConfig dataset;
  Task task = Task::LinkPrediction;
  std::vector<SelectorKind> selectors;
  std::size_t intervals = 6;
  std::filesystem::path output;
  HarnessParams params;
  std::optional<SweepConfig> sweep;
  /// FNV-1a of the canonical (sorted-key) configuration text, without
  /// `output` and `jobs`.
  std::string hash;
};

/// Parses and validates; every problem found is listed in one ValidationError.
/// Relative paths resolve against `base`.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base);
/// `overrides` is a JSON merge patch applied before validation.
RunConfig load_config(const std::filesystem::path& path, const std::optional<nlohmann::json>& overrides = std::nullopt);

std::string config_hash(const nlohmann::json& j);

Dataset load_dataset(const DatasetConfig& config);

std::string cmd_ingest(std::span<const std::filesystem::path> inputs, Timestamp resolution, char delimiter,
                       std::optional<Timestamp> origin, const std::filesystem::path& out_dir);
/// Score curves for `task` (the configured task by default).
std::string cmd_sweep(const RunConfig& config, std::optional<Task> task = std::nullopt);
/// Windowing chosen by each configured selector on the whole sequence.
std::string cmd_select(const RunConfig& config);
std::string cmd_evaluate(const RunConfig& config);
/// Cross-task matrix, Spearman table, stability table and plot data from
/// score-curve files of one dataset.
std::string cmd_analyze(std::span<const std::filesystem::path> curve_files, const std::filesystem::path& out_dir);
/// Aggregate table (selector x dataset/task) from report files.
std::string cmd_report(std::span<const std::filesystem::path> report_files, const std::filesystem::path& out_csv);

}  // namespace tscale
