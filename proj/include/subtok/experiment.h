#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "subtok/corpus.h"
#include "subtok/random.h"
#include "subtok/model.h"
#include "subtok/probe.h"
#include "subtok/train.h"

namespace subtok {

enum class TaskKind { kFget, kMtag, kNer };
std::string_view to_string(TaskKind task);
TaskKind parse_task_kind(std::string_view name);

inline const std::vector<std::size_t> kDefaultWeGrid = {
    10'000, 20'000, 50'000, 100'000, 200'000, 500'000, 1'000'000, 2'000'000,
    5'000'000};
inline const std::vector<std::size_t> kDefaultMentionGrid = {200, 2'000, 20'000};
inline const std::vector<std::size_t> kDefaultSentenceGrid = {300, 1'000, 10'000};

struct ExperimentSpec {
  std::filesystem::path corpus;
  std::vector<std::size_t> we_tokens = kDefaultWeGrid;
  std::vector<std::size_t> task_instances;  // empty: task default grid
  std::vector<ModelConfig> configs;
  std::vector<std::uint64_t> seeds = {1};
  std::filesystem::path output_dir;

  TaskKind task = TaskKind::kFget;
  // Either one file split 60/20/20 with split_seed, or explicit splits.
  std::optional<std::filesystem::path> task_data;
  std::optional<std::filesystem::path> task_train, task_dev, task_test;
  std::uint64_t split_seed = 13;

  // Window, negatives, lr etc.; epochs/batch/min_count come from the data
  // group of each cell.
  TrainConfig train;
  ProbeOptions probe;
  int tag_window = 1;

  std::vector<std::size_t> effective_task_grid() const;
  void validate() const;
};

// Keeps a seeded random subset of n training instances (all if fewer).
template <typename Dataset>
Dataset limit_train(Dataset data, std::size_t n, std::uint64_t seed) {
  if (data.split.train.size() > n) {
    Rng rng(seed);
    rng.shuffle(data.split.train);
    data.split.train.resize(n);
    std::sort(data.split.train.begin(), data.split.train.end());
  }
  return data;
}

struct MetricRow {
  std::size_t we_tokens = 0;
  std::size_t task_instances = 0;
  std::string config;
  std::uint64_t seed = 0;
  std::string group;
  int batch_size = 0;
  int epochs = 0;
  int min_count = 0;
  std::string task;
  std::string metric;
  double value = 0.0;
  std::string status;  // "ok" or "failed"
};

// Long-format TSV with a header line.
void write_metric_header(std::ostream& out);
void write_metric_row(std::ostream& out, const MetricRow& row);
std::vector<MetricRow> read_metric_rows(std::istream& in);
std::vector<MetricRow> load_metric_rows(const std::filesystem::path& path);

struct SimulationSummary {
  std::size_t computed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

// Runs every (we size x task size x config x seed) cell not yet present in
// <output_dir>/metrics.tsv and appends one row per cell.
SimulationSummary run_simulation(const ExperimentSpec& spec, std::ostream* log);

struct SummaryRow {
  std::size_t we_tokens;
  std::size_t task_instances;
  std::string config;
  std::string task;
  std::string metric;
  double mean;
  double stdev;  // sample stdev over successful seeds, 0 for one seed
  std::size_t n;
  std::size_t n_failed;
};

std::vector<SummaryRow> summarize(const std::vector<MetricRow>& rows);
void write_summary(const std::vector<SummaryRow>& rows, std::ostream& out);

}  // namespace subtok
