#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "collmem/clustering.hpp"
#include "collmem/corpus.hpp"
#include "collmem/features.hpp"
#include "collmem/inclusion.hpp"
#include "collmem/memory_model.hpp"
#include "collmem/scanner.hpp"
#include "collmem/series.hpp"

namespace collmem {

struct RunConfig {
  std::filesystem::path docs;          // JSONL documents
  std::filesystem::path registry;      // JSON person registry
  std::filesystem::path counts_dir;    // mentions.csv + totals.csv
  std::filesystem::path missing_days;  // optional day list
  std::filesystem::path series;        // series.csv
  std::filesystem::path features;      // features.csv
  std::filesystem::path out_dir = "out";

  std::vector<Medium> media = {Medium::News, Medium::Twitter};
  std::optional<Day> window_first, window_last;
  FeatureWindows windows;
  int fit_first = 1;
  int fit_last = 400;
  std::uint64_t seed = 1;
  int k_min = 2;
  int k_max = 30;
  int restarts = 50;
  double ambiguity_threshold = 0.9;
  int boundary_days = 360;
  int post_gap_days = 100;
  int min_pre_mention_days = 5;
  double max_malformed_share = 0.01;
  int bootstrap_replicates = 10000;
  unsigned threads = 0;

  // Names of settings given explicitly by the user.
  std::vector<std::string> overrides;

  nlohmann::json to_json() const;
};

// Writes files into the output directory and keeps the run manifest.
class RunOutput {
 public:
  explicit RunOutput(std::filesystem::path dir);

  std::string write(const std::string& name, const std::string& content);
  std::string write_json(const std::string& name, const nlohmann::json& j);
  void notice(std::string text);
  void stage_done(std::string stage);
  const std::filesystem::path& dir() const { return dir_; }

  nlohmann::json manifest(const RunConfig& cfg, const std::string& command, const std::string& status,
                          const std::string& error = {}) const;
  void write_manifest(const RunConfig& cfg, const std::string& command, const std::string& status,
                      const std::string& error = {});

 private:
  std::filesystem::path dir_;
  std::vector<std::string> outputs_;
  std::vector<std::string> notices_;
  std::vector<std::string> stages_;
};

std::vector<Person> load_registry(const std::filesystem::path& path);
DailyMentionCounts load_counts(const std::filesystem::path& dir);
std::set<Day> load_missing_days(const std::filesystem::path& path);  // empty path = none

struct ScanResult {
  std::vector<Person> persons;
  DailyMentionCounts counts;
  CorpusWindow window;
  std::size_t documents = 0;
  std::size_t malformed = 0;
};

struct SeriesSet {
  std::map<Medium, std::vector<MentionSeries>> raw;
  std::map<Medium, std::vector<MentionSeries>> smoothed;
  std::map<Medium, double> epsilon;
  InclusionResult inclusion;
};

struct FitStageResult {
  std::map<Medium, ModelComparison> comparisons;
  std::map<Medium, ShiftedPowerLawParams> params;
};

using FeatureSet = std::map<Medium, std::vector<CurveFeatures>>;

struct ClusterStageResult {
  std::map<Medium, KSelection> selections;
  std::map<Medium, Standardized> data;
};

// Stages. Each writes its outputs through `out` and returns the in-memory
// result for the next stage.
ScanResult stage_scan(const RunConfig& cfg, RunOutput& out);
SeriesSet stage_series(const RunConfig& cfg, const std::vector<Person>& persons,
                       const DailyMentionCounts& counts, RunOutput& out);
FitStageResult stage_fit(const RunConfig& cfg, const std::map<Medium, std::vector<MentionSeries>>& raw,
                         RunOutput& out);
FeatureSet stage_features(const RunConfig& cfg, const SeriesSet& series, RunOutput& out);
nlohmann::json stage_boosts(const RunConfig& cfg, const FeatureSet& features, RunOutput& out);
ClusterStageResult stage_cluster(const RunConfig& cfg, const FeatureSet& features, RunOutput& out);
nlohmann::json stage_regress(const RunConfig& cfg, const std::vector<Person>& persons,
                             const FeatureSet& features, RunOutput& out);

// Runs one CLI command ("scan", "series", "fit", "features", "cluster",
// "regress", "analyze") and always leaves run_manifest.json behind.
// InputError and AnalysisError propagate after the manifest is written.
void run_command(const std::string& command, const RunConfig& cfg);

}  // namespace collmem
