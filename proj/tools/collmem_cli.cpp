// collmem command-line front end.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "collmem/corpus_io.hpp"
#include "collmem/pipeline.hpp"
#include "collmem/report.hpp"
#include "collmem/synth.hpp"

namespace fs = std::filesystem;
using namespace collmem;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitAnalysis = 3;

Day day_option(const std::string& s, const char* flag) {
  auto d = parse_day(s);
  if (!d) throw InputError(std::string(flag) + ": expected YYYY-MM-DD, got '" + s + "'");
  return *d;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write " + p.string());
  f << content;
}

struct Options {
  std::string docs, registry, counts, missing, series, features, out = "out";
  std::string medium = "both";
  std::string window_first, window_last;
  std::vector<int> pre_window, short_window, long_window, halving_window, fit_window, k_range;
  std::uint64_t seed = 1;
  int restarts = 50;
  double threshold = 0.9;
  int boundary_days = 360, post_gap_days = 100, min_pre_mention_days = 5;
  double max_malformed = 0.01;
  int bootstrap = 10000;
  unsigned threads = 0;
};

void add_run_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--docs", o.docs, "documents, one JSON object per line");
  cmd->add_option("--registry", o.registry, "person registry (JSON array)");
  cmd->add_option("--counts", o.counts, "directory holding mentions.csv and totals.csv");
  cmd->add_option("--missing-days", o.missing, "file listing corpus days without data");
  cmd->add_option("--series", o.series, "series.csv from the series command");
  cmd->add_option("--features", o.features, "features.csv from the features command");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--medium", o.medium, "news, twitter or both")
      ->check(CLI::IsMember({"news", "twitter", "both"}))
      ->capture_default_str();
  cmd->add_option("--window-first", o.window_first, "first corpus day (YYYY-MM-DD)");
  cmd->add_option("--window-last", o.window_last, "last corpus day (YYYY-MM-DD)");
  cmd->add_option("--pre-window", o.pre_window, "pre-mortem days FROM TO")->expected(2);
  cmd->add_option("--short-window", o.short_window, "short-term days FROM TO")->expected(2);
  cmd->add_option("--long-window", o.long_window, "long-term days FROM TO")->expected(2);
  cmd->add_option("--halving-window", o.halving_window, "halving-time days FROM TO")->expected(2);
  cmd->add_option("--fit-window", o.fit_window, "model fit days FROM TO")->expected(2);
  cmd->add_option("--k-range", o.k_range, "cluster counts MIN MAX")->expected(2);
  cmd->add_option("--seed", o.seed, "seed for all randomized steps")->capture_default_str();
  cmd->add_option("--restarts", o.restarts, "k-means restarts")->capture_default_str();
  cmd->add_option("--ambiguity-threshold", o.threshold, "minimum share for a name surface")
      ->capture_default_str();
  cmd->add_option("--boundary-days", o.boundary_days)->capture_default_str();
  cmd->add_option("--post-gap-days", o.post_gap_days)->capture_default_str();
  cmd->add_option("--min-pre-mention-days", o.min_pre_mention_days)->capture_default_str();
  cmd->add_option("--max-malformed-share", o.max_malformed)->capture_default_str();
  cmd->add_option("--bootstrap", o.bootstrap, "bootstrap replicates for median CIs")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
}

RunConfig to_config(const CLI::App* cmd, const Options& o) {
  RunConfig c;
  c.docs = o.docs;
  c.registry = o.registry;
  c.counts_dir = o.counts;
  c.missing_days = o.missing;
  c.series = o.series;
  c.features = o.features;
  c.out_dir = o.out;
  if (o.medium == "news") c.media = {Medium::News};
  if (o.medium == "twitter") c.media = {Medium::Twitter};
  if (!o.window_first.empty()) c.window_first = day_option(o.window_first, "--window-first");
  if (!o.window_last.empty()) c.window_last = day_option(o.window_last, "--window-last");
  auto pair = [](const std::vector<int>& v, int& a, int& b) {
    if (v.size() == 2) a = v[0], b = v[1];
  };
  pair(o.pre_window, c.windows.pre_first, c.windows.pre_last);
  pair(o.short_window, c.windows.short_first, c.windows.short_last);
  pair(o.long_window, c.windows.long_first, c.windows.long_last);
  pair(o.halving_window, c.windows.halving_first, c.windows.halving_last);
  pair(o.fit_window, c.fit_first, c.fit_last);
  pair(o.k_range, c.k_min, c.k_max);
  c.seed = o.seed;
  c.restarts = o.restarts;
  c.ambiguity_threshold = o.threshold;
  c.boundary_days = o.boundary_days;
  c.post_gap_days = o.post_gap_days;
  c.min_pre_mention_days = o.min_pre_mention_days;
  c.max_malformed_share = o.max_malformed;
  c.bootstrap_replicates = o.bootstrap;
  c.threads = o.threads;
  for (const CLI::Option* opt : cmd->get_options())
    if (opt->count() > 0 && opt->get_name() != "--help" && opt->get_name() != "--config")
      c.overrides.push_back(opt->get_name());
  return c;
}

struct SynthOptions {
  std::string out = "synth";
  std::uint64_t seed = 7;
  int persons = 40, zero_persons = 0, days = 730, news_per_day = 60, twitter_per_day = 80;
  double single_rate = 0.1, boost = 20.0, decay = 1.0;
  int count_persons = 200;
  double person_sigma = 0.3, day_sigma = 0.05;
  int pop_n = 2000;
  double blob_sigma = 0.15, mismatch = 0.0;
  std::string series_medium = "news";
  double series_sigma = 0.0;
};

void synth_corpus(const SynthOptions& o) {
  CorpusSpec spec;
  spec.n_persons = o.persons;
  spec.zero_mention_persons = o.zero_persons;
  spec.days = o.days;
  spec.news_docs_per_day = o.news_per_day;
  spec.twitter_docs_per_day = o.twitter_per_day;
  spec.news_single_mention_rate = o.single_rate;
  spec.boost = o.boost;
  spec.decay = o.decay;
  spec.seed = o.seed;
  const SynthCorpus c = generate_corpus(spec);
  const fs::path dir = o.out;
  fs::create_directories(dir / "truth");
  {
    std::ofstream f(dir / "docs.jsonl", std::ios::binary | std::ios::trunc);
    for (const auto& d : c.documents) f << document_to_json(d) << '\n';
  }
  std::ostringstream reg, mentions, totals;
  write_registry(reg, c.persons);
  write_mention_csv(mentions, c.truth);
  write_totals_csv(totals, c.truth);
  write_file(dir / "registry.json", reg.str());
  write_file(dir / "truth" / "mentions.csv", mentions.str());
  write_file(dir / "truth" / "totals.csv", totals.str());
  nlohmann::json manifest = {{"kind", "corpus"},
                             {"seed", o.seed},
                             {"persons", spec.n_persons},
                             {"zero_mention_persons", spec.zero_mention_persons},
                             {"window", {format_day(c.window.first), format_day(c.window.last)}},
                             {"documents", c.documents.size()},
                             {"news_docs_per_day", spec.news_docs_per_day},
                             {"twitter_docs_per_day", spec.twitter_docs_per_day},
                             {"news_single_mention_rate", spec.news_single_mention_rate},
                             {"boost", spec.boost},
                             {"decay", spec.decay},
                             {"truth", "truth/"}};
  write_file(dir / "synth_manifest.json", manifest.dump(2) + "\n");
}

void synth_counts(const SynthOptions& o) {
  CountsSpec spec;
  spec.n_persons = o.count_persons;
  spec.person_sigma = o.person_sigma;
  spec.day_sigma = o.day_sigma;
  spec.seed = o.seed;
  const SynthCounts c = generate_counts(spec);
  const fs::path dir = o.out;
  fs::create_directories(dir);
  std::ostringstream reg, mentions, totals;
  write_registry(reg, c.persons);
  write_mention_csv(mentions, c.counts);
  write_totals_csv(totals, c.counts);
  write_file(dir / "registry.json", reg.str());
  write_file(dir / "mentions.csv", mentions.str());
  write_file(dir / "totals.csv", totals.str());
  auto params = [](const ShiftedPowerLawParams& p) { return nlohmann::json{{"a", p.a}, {"b", p.b}, {"c", p.c}}; };
  nlohmann::json manifest = {{"kind", "counts"},
                             {"seed", o.seed},
                             {"persons", spec.n_persons},
                             {"news", params(spec.news)},
                             {"twitter", params(spec.twitter)},
                             {"person_sigma", spec.person_sigma},
                             {"day_sigma", spec.day_sigma},
                             {"docs_per_day", spec.docs_per_day},
                             {"quiet_day", spec.quiet_day},
                             {"window", {format_day(c.window.first), format_day(c.window.last)}}};
  write_file(dir / "synth_manifest.json", manifest.dump(2) + "\n");
}

void synth_population(const SynthOptions& o) {
  PopulationSpec spec;
  spec.n = o.pop_n;
  spec.blob_sigma = o.blob_sigma;
  spec.mismatch = o.mismatch;
  spec.seed = o.seed;
  const Population p = generate_population(spec);
  const fs::path dir = o.out;
  fs::create_directories(dir);
  std::vector<CurveFeatures> all = p.news;
  all.insert(all.end(), p.twitter.begin(), p.twitter.end());
  std::ostringstream features, labels;
  write_features_csv(features, all);
  labels << "person_id,news_cluster,twitter_cluster\n";
  for (std::size_t i = 0; i < p.ids.size(); ++i)
    labels << p.ids[i] << ",C" << p.news_labels[i] + 1 << ",C" << p.twitter_labels[i] + 1 << '\n';
  write_file(dir / "features.csv", features.str());
  write_file(dir / "planted_labels.csv", labels.str());
  nlohmann::json arch = nlohmann::json::array();
  for (const auto& a : spec.archetypes)
    arch.push_back({{"name", a.name},
                    {"news_share", a.news_share},
                    {"twitter_share", a.twitter_share},
                    {"news_centroid", a.news_centroid},
                    {"twitter_centroid", a.twitter_centroid}});
  nlohmann::json manifest = {{"kind", "population"}, {"seed", o.seed},         {"n", spec.n},
                             {"blob_sigma", spec.blob_sigma}, {"mismatch", spec.mismatch},
                             {"archetypes", arch}};
  write_file(dir / "synth_manifest.json", manifest.dump(2) + "\n");
}

void synth_series(const SynthOptions& o) {
  const auto m = parse_medium(o.series_medium);
  if (!m) throw InputError("--medium: expected news or twitter");
  const auto params =
      *m == Medium::News ? ShiftedPowerLawParams::published_news() : ShiftedPowerLawParams::published_twitter();
  const MentionSeries s = generate_series(params, o.series_sigma, o.seed, "synthetic", *m);
  const fs::path dir = o.out;
  fs::create_directories(dir);
  std::ostringstream csv;
  write_series_csv(csv, std::span<const MentionSeries>(&s, 1));
  write_file(dir / "series.csv", csv.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collmem: post-mortem mention series, memory-curve fits, clustering and regression"};
  app.require_subcommand(1);
  // keys go under a [command] section, e.g. [analyze] restarts = 10
  app.set_config("--config", "", "INI file with one [command] section per command; flags take precedence");

  Options opts;
  std::vector<std::pair<std::string, CLI::App*>> runs;
  for (auto [name, help] : std::initializer_list<std::pair<const char*, const char*>>{
           {"scan", "count daily person mentions in a document stream"},
           {"series", "build raw and smoothed mention series from counts"},
           {"fit", "fit forgetting-curve models to the mean series"},
           {"features", "compute the four curve features and boost statistics"},
           {"cluster", "cluster feature vectors and compare media"},
           {"regress", "regress boosts on biographic factors"},
           {"analyze", "run every stage from counts (or documents) to reports"}}) {
    CLI::App* cmd = app.add_subcommand(name, help);
    add_run_options(cmd, opts);
    runs.emplace_back(name, cmd);
  }

  SynthOptions so;
  CLI::App* synth = app.add_subcommand("synth", "generate synthetic data with known ground truth");
  synth->require_subcommand(1);
  CLI::App* s_corpus = synth->add_subcommand("corpus", "documents, registry and true counts");
  CLI::App* s_counts = synth->add_subcommand("counts", "counts for a population on the published curves");
  CLI::App* s_pop = synth->add_subcommand("population", "feature vectors from four archetypes");
  CLI::App* s_series = synth->add_subcommand("series", "one raw series from the published parameters");
  for (CLI::App* c : {s_corpus, s_counts, s_pop, s_series}) {
    c->add_option("--out", so.out, "output directory")->capture_default_str();
    c->add_option("--seed", so.seed)->capture_default_str();
  }
  s_corpus->add_option("--persons", so.persons)->capture_default_str();
  s_corpus->add_option("--zero-mention-persons", so.zero_persons)->capture_default_str();
  s_corpus->add_option("--days", so.days)->capture_default_str();
  s_corpus->add_option("--news-per-day", so.news_per_day)->capture_default_str();
  s_corpus->add_option("--twitter-per-day", so.twitter_per_day)->capture_default_str();
  s_corpus->add_option("--single-mention-rate", so.single_rate)->capture_default_str();
  s_corpus->add_option("--boost", so.boost)->capture_default_str();
  s_corpus->add_option("--decay", so.decay)->capture_default_str();
  s_counts->add_option("--persons", so.count_persons)->capture_default_str();
  s_counts->add_option("--person-sigma", so.person_sigma)->capture_default_str();
  s_counts->add_option("--day-sigma", so.day_sigma)->capture_default_str();
  s_pop->add_option("--n", so.pop_n)->capture_default_str();
  s_pop->add_option("--blob-sigma", so.blob_sigma)->capture_default_str();
  s_pop->add_option("--mismatch", so.mismatch)->capture_default_str();
  s_series->add_option("--medium", so.series_medium)->capture_default_str();
  s_series->add_option("--sigma", so.series_sigma)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    for (const auto& [name, cmd] : runs)
      if (cmd->parsed()) run_command(name, to_config(cmd, opts));
    if (s_corpus->parsed()) synth_corpus(so);
    if (s_counts->parsed()) synth_counts(so);
    if (s_pop->parsed()) synth_population(so);
    if (s_series->parsed()) synth_series(so);
  } catch (const InputError& e) {
    std::cerr << "collmem: input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const AnalysisError& e) {
    std::cerr << "collmem: analysis error: " << e.what() << '\n';
    return kExitAnalysis;
  } catch (const std::exception& e) {
    std::cerr << "collmem: error: " << e.what() << '\n';
    return kExitAnalysis;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cerr << "collmem: done in " << secs << " s\n";
  return 0;
}
