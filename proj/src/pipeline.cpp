#include "collmem/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "collmem/alias_index.hpp"
#include "collmem/contingency.hpp"
#include "collmem/corpus_io.hpp"
#include "collmem/nonparametric.hpp"
#include "collmem/regression.hpp"
#include "collmem/report.hpp"

namespace collmem {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < n;) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
          }
        }
      });
  }
  if (error) std::rethrow_exception(error);
}

std::ifstream open_input(const fs::path& p, const char* what) {
  if (p.empty()) throw InputError(std::string("no ") + what + " path given");
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError(std::string("cannot open ") + what + ": " + p.string());
  return in;
}

bool uses(const RunConfig& cfg, Medium m) {
  return std::find(cfg.media.begin(), cfg.media.end(), m) != cfg.media.end();
}

std::string medium_file(const std::string& stem, Medium m, const std::string& ext) {
  return stem + "_" + std::string(to_string(m)) + ext;
}

template <class Fn>
auto run_stage(const std::string& name, RunOutput& out, Fn&& fn) {
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      out.stage_done(name);
    } else {
      auto r = fn();
      out.stage_done(name);
      return r;
    }
  } catch (const InputError& e) {
    throw InputError("stage " + name + ": " + e.what());
  } catch (const AnalysisError& e) {
    throw AnalysisError("stage " + name + ": " + e.what());
  } catch (const std::exception& e) {
    throw AnalysisError("stage " + name + ": " + e.what());
  }
}

std::map<std::string, CurveFeatures> by_id(const std::vector<CurveFeatures>& v) {
  std::map<std::string, CurveFeatures> out;
  for (const auto& f : v) out.emplace(f.person_id, f);
  return out;
}

}  // namespace

json RunConfig::to_json() const {
  json media_names = json::array();
  for (Medium m : media) media_names.push_back(std::string(to_string(m)));
  return {{"docs", docs.string()},
          {"registry", registry.string()},
          {"counts_dir", counts_dir.string()},
          {"missing_days", missing_days.string()},
          {"series", series.string()},
          {"features", features.string()},
          {"out_dir", out_dir.string()},
          {"media", media_names},
          {"window_first", window_first ? json(format_day(*window_first)) : json(nullptr)},
          {"window_last", window_last ? json(format_day(*window_last)) : json(nullptr)},
          {"pre_window", {windows.pre_first, windows.pre_last}},
          {"short_window", {windows.short_first, windows.short_last}},
          {"long_window", {windows.long_first, windows.long_last}},
          {"halving_window", {windows.halving_first, windows.halving_last}},
          {"fit_window", {fit_first, fit_last}},
          {"seed", seed},
          {"k_range", {k_min, k_max}},
          {"restarts", restarts},
          {"ambiguity_threshold", ambiguity_threshold},
          {"boundary_days", boundary_days},
          {"post_gap_days", post_gap_days},
          {"min_pre_mention_days", min_pre_mention_days},
          {"max_malformed_share", max_malformed_share},
          {"bootstrap_replicates", bootstrap_replicates},
          {"smoother_spans", {0.05, 0.2, 0.5}},
          {"overrides", overrides}};
}

RunOutput::RunOutput(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

std::string RunOutput::write(const std::string& name, const std::string& content) {
  const fs::path p = dir_ / name;
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot write " + p.string());
  f << content;
  if (!f) throw InputError("failed writing " + p.string());
  if (std::find(outputs_.begin(), outputs_.end(), name) == outputs_.end()) outputs_.push_back(name);
  return name;
}

std::string RunOutput::write_json(const std::string& name, const json& j) { return write(name, j.dump(2) + "\n"); }

void RunOutput::notice(std::string text) { notices_.push_back(std::move(text)); }
void RunOutput::stage_done(std::string stage) { stages_.push_back(std::move(stage)); }

json RunOutput::manifest(const RunConfig& cfg, const std::string& command, const std::string& status,
                         const std::string& error) const {
  json j = {{"tool", "collmem"},
            {"version", kVersion},
            {"command", command},
            {"status", status},
            {"config", cfg.to_json()},
            {"stages_completed", stages_},
            {"outputs", outputs_},
            {"notices", notices_}};
  if (!error.empty()) j["error"] = error;
  return j;
}

void RunOutput::write_manifest(const RunConfig& cfg, const std::string& command, const std::string& status,
                               const std::string& error) {
  const fs::path p = dir_ / "run_manifest.json";
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  f << manifest(cfg, command, status, error).dump(2) << "\n";
}

std::vector<Person> load_registry(const fs::path& path) {
  auto in = open_input(path, "registry");
  return read_registry(in);
}

DailyMentionCounts load_counts(const fs::path& dir) {
  if (dir.empty()) throw InputError("no counts directory given");
  DailyMentionCounts c;
  {
    auto in = open_input(dir / "totals.csv", "totals");
    read_totals_csv(in, c);
  }
  {
    auto in = open_input(dir / "mentions.csv", "mentions");
    read_mention_csv(in, c);
  }
  c.validate();
  return c;
}

std::set<Day> load_missing_days(const fs::path& path) {
  if (path.empty()) return {};
  auto in = open_input(path, "missing-days list");
  return read_day_list(in);
}

ScanResult stage_scan(const RunConfig& cfg, RunOutput& out) {
  ScanResult r;
  r.persons = load_registry(cfg.registry);
  auto in = open_input(cfg.docs, "documents");
  DocumentBatch batch = read_documents_jsonl(in);
  r.malformed = batch.malformed.size();
  if (batch.lines_read == 0) throw InputError("no documents in " + cfg.docs.string());
  if (static_cast<double>(r.malformed) > cfg.max_malformed_share * static_cast<double>(batch.lines_read))
    throw InputError(std::to_string(r.malformed) + " of " + std::to_string(batch.lines_read) +
                     " document lines are malformed, above the allowed share");
  std::vector<Document> docs;
  for (auto& d : batch.documents)
    if (uses(cfg, d.medium)) docs.push_back(std::move(d));
  r.documents = docs.size();
  if (docs.empty()) throw InputError("no valid documents for the selected media");

  if (cfg.window_first && cfg.window_last) {
    r.window = {*cfg.window_first, *cfg.window_last};
  } else {
    auto [lo, hi] = std::minmax_element(docs.begin(), docs.end(),
                                        [](const Document& a, const Document& b) { return a.date < b.date; });
    r.window = {cfg.window_first.value_or(lo->date), cfg.window_last.value_or(hi->date)};
  }
  if (r.window.last < r.window.first) throw InputError("corpus window is empty");

  const AliasIndex index = AliasIndex::build(r.persons, cfg.ambiguity_threshold);
  r.counts = aggregate_counts(docs, index, r.window, cfg.threads);
  r.counts.validate();

  std::ostringstream mentions, totals;
  write_mention_csv(mentions, r.counts);
  write_totals_csv(totals, r.counts);
  out.write("mentions.csv", mentions.str());
  out.write("totals.csv", totals.str());

  json malformed = json::array();
  for (const auto& m : batch.malformed) malformed.push_back({{"line", m.line_number}, {"error", m.error}});
  json quarantined = json::object();
  for (const auto& [m, n] : r.counts.quarantined) quarantined[std::string(to_string(m))] = n;
  json rejected = json::array();
  for (const auto& s : index.rejected())
    rejected.push_back({{"surface", s.surface}, {"persons", s.person_ids}, {"reason", s.reason}});
  std::int64_t total_docs = 0;
  for (const auto& [k, n] : r.counts.totals) total_docs += n;
  out.write_json("scan_manifest.json",
                 {{"window", {format_day(r.window.first), format_day(r.window.last)}},
                  {"lines_read", batch.lines_read},
                  {"documents", r.documents},
                  {"documents_in_window", total_docs},
                  {"malformed", malformed},
                  {"quarantined", quarantined},
                  {"persons", r.persons.size()},
                  {"admitted_surfaces", index.admitted().size()},
                  {"rejected_surfaces", rejected},
                  {"undetectable_persons", index.excluded()}});
  return r;
}

SeriesSet stage_series(const RunConfig& cfg, const std::vector<Person>& persons,
                       const DailyMentionCounts& counts, RunOutput& out) {
  CorpusWindow window;
  {
    std::optional<Day> lo, hi;
    for (const auto& [key, n] : counts.totals) {
      if (!uses(cfg, key.first)) continue;
      if (!lo || key.second < *lo) lo = key.second;
      if (!hi || key.second > *hi) hi = key.second;
    }
    if (cfg.window_first) lo = cfg.window_first;
    if (cfg.window_last) hi = cfg.window_last;
    if (!lo || !hi) throw InputError("counts contain no document totals for the selected media");
    window = {*lo, *hi};
  }
  const auto missing = load_missing_days(cfg.missing_days);

  InclusionConfig ic;
  ic.window = window;
  ic.boundary_days = cfg.boundary_days;
  ic.post_gap_days = cfg.post_gap_days;
  ic.min_pre_mention_days = cfg.min_pre_mention_days;
  ic.media = cfg.media;
  const AliasIndex index = AliasIndex::build(persons, cfg.ambiguity_threshold);

  // Inclusion looks at every medium in the counts; restrict to the selection.
  DailyMentionCounts selected;
  for (const auto& [k, v] : counts.totals)
    if (uses(cfg, k.first)) selected.totals.emplace(k, v);
  for (const auto& [k, v] : counts.mentions)
    if (uses(cfg, k.medium)) selected.mentions.emplace(k, v);

  SeriesSet s;
  s.inclusion = apply_inclusion_criteria(persons, selected, missing, ic, &index);
  if (s.inclusion.included.empty()) throw AnalysisError("no person passes the inclusion criteria");

  std::map<std::string, const Person*> person_by_id;
  for (const auto& p : persons) person_by_id[p.id] = &p;

  json eps = json::object(), edge = json::object(), skipped = json::array();
  for (Medium m : cfg.media) {
    const auto& ids = s.inclusion.included;
    std::vector<FractionSeries> fr(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i)
      fr[i] = fraction_series(*person_by_id.at(ids[i]), m, selected, missing);
    const double e = compute_epsilon(fr);
    s.epsilon[m] = e;
    eps[std::string(to_string(m))] = e;
    auto& raw = s.raw[m];
    auto& sm = s.smoothed[m];
    raw.resize(ids.size());
    sm.resize(ids.size());
    parallel_for(ids.size(), cfg.threads, [&](std::size_t i) {
      raw[i] = build_raw_series(ids[i], m, fr[i], e);
      sm[i] = supersmooth(raw[i]);
    });
    for (const auto& r : raw)
      if (!r.edge_filled_days.empty())
        edge[std::string(to_string(m)) + ":" + r.person_id] = r.edge_filled_days.size();
    for (const auto& r : sm)
      if (r.smoothing_skipped) skipped.push_back(std::string(to_string(m)) + ":" + r.person_id);
  }

  std::vector<MentionSeries> all;
  for (Medium m : cfg.media) {
    for (std::size_t i = 0; i < s.raw[m].size(); ++i) {
      all.push_back(s.raw[m][i]);
      all.push_back(s.smoothed[m][i]);
    }
  }
  std::ostringstream csv;
  write_series_csv(csv, all);
  out.write("series.csv", csv.str());

  json excluded = json::object();
  std::map<std::string, int> reason_counts;
  for (const auto& [id, why] : s.inclusion.excluded) {
    excluded[id] = std::string(to_string(why));
    ++reason_counts[std::string(to_string(why))];
  }
  out.write_json("series_manifest.json", {{"window", {format_day(window.first), format_day(window.last)}},
                                          {"epsilon", eps},
                                          {"included", s.inclusion.included.size()},
                                          {"excluded_by_reason", reason_counts},
                                          {"excluded", excluded},
                                          {"edge_filled_days", edge},
                                          {"smoothing_skipped", skipped}});
  return s;
}

FitStageResult stage_fit(const RunConfig& cfg, const std::map<Medium, std::vector<MentionSeries>>& raw,
                         RunOutput& out) {
  if (cfg.fit_first < 1 || cfg.fit_last > kSeriesLast || cfg.fit_first >= cfg.fit_last)
    throw InputError("fit window must lie within 1.." + std::to_string(kSeriesLast));
  FitStageResult r;
  json summary = json::object();
  for (Medium m : cfg.media) {
    auto it = raw.find(m);
    if (it == raw.end() || it->second.empty()) {
      out.notice("fit: no series for " + std::string(to_string(m)));
      continue;
    }
    const auto mean = mean_log_series(it->second);
    const std::span<const double> curve(mean.data() + (cfg.fit_first - kSeriesFirst),
                                        static_cast<std::size_t>(cfg.fit_last - cfg.fit_first + 1));
    FitOptions opt;
    opt.t_first = cfg.fit_first;
    const auto catalog = default_catalog();
    ModelComparison cmp = compare_models(catalog, curve, opt);
    const MemoryModelFit* spl = nullptr;
    for (const auto& f : cmp.ranked)
      if (f.model == ModelId::ShiftedPowerLaw) spl = &f;
    if (!spl) throw AnalysisError("shifted power law fit failed for " + std::string(to_string(m)));
    const auto params = ShiftedPowerLawParams::from_fit(*spl);
    r.params[m] = params;

    std::ostringstream table, decomposition;
    write_model_comparison_csv(table, cmp);
    out.write(medium_file("model_comparison", m, ".csv"), table.str());
    write_decomposition_csv(decomposition, params, cfg.fit_first, cfg.fit_last);
    out.write(medium_file("decomposition", m, ".csv"), decomposition.str());
    json rep = fit_report(*spl);
    rep["decomposition"] = decomposition_summary(params);
    rep["rank_in_catalog"] = (spl - cmp.ranked.data()) + 1;
    out.write_json(medium_file("fit", m, ".json"), rep);
    summary[std::string(to_string(m))] = rep["decomposition"];

    Chart chart;
    chart.title = "Mean mention series (" + std::string(to_string(m)) + ")";
    chart.x_label = "days relative to death";
    chart.y_label = "mean log10 mention fraction";
    ChartLine data{"mean series", "#555555", {}, {}, false};
    for (int t = kSeriesFirst; t <= kSeriesLast; ++t) {
      data.x.push_back(t);
      data.y.push_back(mean[static_cast<std::size_t>(t - kSeriesFirst)]);
    }
    ChartLine total{"u + v", "#000000", {}, {}, false}, u{"u (communicative)", "#2a9d4b", {}, {}, true},
        v{"v (cultural)", "#c0392b", {}, {}, true};
    for (int t = cfg.fit_first; t <= cfg.fit_last; ++t) {
      const auto d = decompose(params, t);
      total.x.push_back(t);
      total.y.push_back(std::log10(d.u + d.v));
      u.x.push_back(t);
      u.y.push_back(std::log10(d.u));
      v.x.push_back(t);
      v.y.push_back(std::log10(d.v));
    }
    chart.lines = {data, total, u, v};
    out.write(medium_file("mean_curve", m, ".svg"), svg_line_chart(chart));
    r.comparisons[m] = std::move(cmp);
  }
  out.write_json("decomposition_summary.json", summary);
  return r;
}

FeatureSet stage_features(const RunConfig& cfg, const SeriesSet& series, RunOutput& out) {
  FeatureSet fs;
  std::vector<CurveFeatures> all;
  for (Medium m : cfg.media) {
    auto r = series.raw.find(m);
    auto s = series.smoothed.find(m);
    if (r == series.raw.end() || s == series.smoothed.end()) continue;
    std::map<std::string, const MentionSeries*> smooth_by_id;
    for (const auto& x : s->second) smooth_by_id[x.person_id] = &x;
    auto& v = fs[m];
    for (const auto& raw : r->second) {
      auto it = smooth_by_id.find(raw.person_id);
      if (it == smooth_by_id.end())
        throw InputError("no smoothed series for " + raw.person_id + " (" + std::string(to_string(m)) + ")");
      v.push_back(extract_features(raw, *it->second, cfg.windows));
    }
    all.insert(all.end(), v.begin(), v.end());
  }
  if (all.empty()) throw AnalysisError("no series to extract features from");
  std::ostringstream csv;
  write_features_csv(csv, all);
  out.write("features.csv", csv.str());
  return fs;
}

json stage_boosts(const RunConfig& cfg, const FeatureSet& features, RunOutput& out) {
  json j = json::object();
  std::uint64_t stream = 0;
  for (const auto& [m, v] : features) {
    if (v.size() < 2) {
      out.notice("boosts: fewer than two persons for " + std::string(to_string(m)));
      continue;
    }
    json entry = {{"n", v.size()}};
    for (const bool short_term : {true, false}) {
      std::vector<double> x;
      for (const auto& f : v) x.push_back(short_term ? f.short_term_boost : f.long_term_boost);
      const double med = median(x);
      const auto ci = bootstrap_median_ci(x, cfg.bootstrap_replicates, derive_seed(cfg.seed, 500 + stream++),
                                          0.95, cfg.threads);
      entry[short_term ? "short_term" : "long_term"] = {{"median", med},
                                                         {"ci95", {ci.lo, ci.hi}},
                                                         {"multiplicative", multiplicative_effect(med)}};
    }
    j[std::string(to_string(m))] = entry;
  }
  if (features.count(Medium::News) && features.count(Medium::Twitter)) {
    const auto tw = by_id(features.at(Medium::Twitter));
    for (const bool short_term : {true, false}) {
      std::vector<double> d;
      for (const auto& f : features.at(Medium::News)) {
        auto it = tw.find(f.person_id);
        if (it == tw.end()) continue;
        d.push_back(short_term ? f.short_term_boost - it->second.short_term_boost
                               : f.long_term_boost - it->second.long_term_boost);
      }
      const char* key = short_term ? "news_minus_twitter_short" : "news_minus_twitter_long";
      try {
        const auto w = wilcoxon_signed_rank(d);
        j[key] = {{"W", w.w}, {"p", w.p}, {"n", w.n}, {"exact", w.exact}};
      } catch (const AnalysisError& e) {
        out.notice(std::string("boosts: ") + key + ": " + e.what());
      }
    }
  }
  out.write_json("boosts.json", j);
  return j;
}

ClusterStageResult stage_cluster(const RunConfig& cfg, const FeatureSet& features, RunOutput& out) {
  ClusterStageResult r;
  KMeansOptions opt;
  opt.restarts = cfg.restarts;
  opt.threads = cfg.threads;
  for (const auto& [m, v] : features) {
    const int n = static_cast<int>(v.size());
    int k_max = cfg.k_max;
    if (n <= k_max) {
      k_max = n - 1;
      out.notice("cluster: k range capped at " + std::to_string(k_max) + " for " + std::string(to_string(m)) +
                 " (only " + std::to_string(n) + " persons)");
    }
    if (k_max < cfg.k_min) {
      out.notice("cluster: too few persons to cluster " + std::string(to_string(m)));
      continue;
    }
    Standardized z = standardize(feature_matrix(v));
    KSelection sel = select_k(z.z, cfg.k_min, k_max, derive_seed(cfg.seed, static_cast<std::uint64_t>(m)), opt);
    std::ostringstream assign;
    write_assignments_csv(assign, z.ids, sel.best.labels);
    const auto path = out.write(medium_file("assignments", m, ".csv"), assign.str());
    out.write_json(medium_file("clusters", m, ".json"), cluster_report(m, sel, z, path));

    Chart chart;
    chart.title = "Mean silhouette by k (" + std::string(to_string(m)) + ")";
    chart.x_label = "k";
    chart.y_label = "mean silhouette";
    ChartLine line{"mean silhouette", "#1f5fa8", {}, {}, false};
    for (const auto& [k, s] : sel.curve) {
      line.x.push_back(k);
      line.y.push_back(s);
    }
    chart.lines = {line};
    out.write(medium_file("k_curve", m, ".svg"), svg_line_chart(chart));
    r.selections[m] = std::move(sel);
    r.data[m] = std::move(z);
  }

  if (r.selections.count(Medium::News) && r.selections.count(Medium::Twitter)) {
    const auto& sn = r.selections.at(Medium::News);
    const auto& st = r.selections.at(Medium::Twitter);
    const auto& zn = r.data.at(Medium::News);
    const auto& zt = r.data.at(Medium::Twitter);
    // Restrict to persons clustered in both media.
    std::map<std::string, int> tw;
    for (std::size_t i = 0; i < zt.ids.size(); ++i) tw[zt.ids[i]] = st.best.labels[i];
    std::vector<std::string> ids;
    std::vector<int> ln, lt;
    for (std::size_t i = 0; i < zn.ids.size(); ++i) {
      auto it = tw.find(zn.ids[i]);
      if (it == tw.end()) continue;
      ids.push_back(zn.ids[i]);
      ln.push_back(sn.best.labels[i]);
      lt.push_back(it->second);
    }
    if (ids.size() < zn.ids.size() || ids.size() < zt.ids.size())
      out.notice("confusion: restricted to " + std::to_string(ids.size()) + " persons present in both media");
    const auto cm = confusion(ids, ln, sn.best_k, ids, lt, st.best_k);
    out.write_json("confusion.json", confusion_report(cm));
  } else {
    out.notice("confusion analysis skipped: needs clusters for both news and twitter");
  }
  return r;
}

json stage_regress(const RunConfig& cfg, const std::vector<Person>& persons, const FeatureSet& features,
                   RunOutput& out) {
  std::map<std::string, CurveFeatures> news, twitter;
  if (features.count(Medium::News)) news = by_id(features.at(Medium::News));
  if (features.count(Medium::Twitter)) twitter = by_id(features.at(Medium::Twitter));
  if (news.empty() && twitter.empty()) throw AnalysisError("no features to regress");

  std::vector<std::pair<std::string, RegressionSpec>> models;
  for (Medium m : cfg.media) {
    if ((m == Medium::News ? news : twitter).empty()) continue;
    models.push_back({"short_boost_" + std::string(to_string(m)), {Outcome::ShortBoost, m, false}});
    models.push_back({"long_boost_" + std::string(to_string(m)), {Outcome::LongBoost, m, false}});
  }
  if (!news.empty() && !twitter.empty()) {
    models.push_back({"diff_short", {Outcome::DiffShort, Medium::News, false}});
    models.push_back({"diff_long", {Outcome::DiffLong, Medium::News, false}});
  } else {
    out.notice("regress: news-minus-twitter models skipped (single medium)");
  }

  json summary = json::object();
  bool exclusions_written = false;
  for (const auto& [name, spec] : models) {
    const RegressionData data = prepare_regression(persons, news, twitter, spec);
    if (!exclusions_written) {
      std::ostringstream ex;
      ex << "person_id,reason\n";
      for (const auto& [id, why] : data.excluded) ex << csv_escape(id) << ',' << csv_escape(why) << '\n';
      out.write("regression_exclusions.csv", ex.str());
      exclusions_written = true;
    }
    const OlsFit fit = fit_regression(data, spec);
    std::ostringstream coef, eff;
    write_coefficients_csv(coef, fit);
    write_effects_csv(eff, fit);
    out.write("coefficients_" + name + ".csv", coef.str());
    out.write("effects_" + name + ".csv", eff.str());
    json entry = {{"n", fit.n},       {"r2", fit.r2},
                  {"adj_r2", fit.adj_r2}, {"rmse", fit.rmse},
                  {"f_stat", fit.f_statistic}, {"f_p", fit.f_p},
                  {"excluded", data.excluded.size()}};

    try {
      const Design d = build_design(data.rows, true);
      const OlsFit ifit = ols_fit(d.x, data.y, d.names);
      const auto curves = age_effect_curves(ifit);
      std::ostringstream ac;
      write_age_effects_csv(ac, curves);
      out.write("age_effects_" + name + ".csv", ac.str());
      entry["interaction_dropped_terms"] = d.dropped;
    } catch (const AnalysisError& e) {
      out.notice("regress: interaction model for " + name + " not estimable: " + e.what());
    }
    summary[name] = entry;
  }
  out.write_json("regression_summary.json", summary);
  return summary;
}

void run_command(const std::string& command, const RunConfig& cfg) {
  RunOutput out(cfg.out_dir);
  try {
    if (command == "scan") {
      run_stage("scan", out, [&] { return stage_scan(cfg, out); });
    } else if (command == "series") {
      const auto persons = run_stage("load", out, [&] { return load_registry(cfg.registry); });
      const auto counts = run_stage("load", out, [&] { return load_counts(cfg.counts_dir); });
      run_stage("series", out, [&] { return stage_series(cfg, persons, counts, out); });
    } else if (command == "fit" || command == "features") {
      SeriesSet s = run_stage("load", out, [&] {
        auto in = open_input(cfg.series, "series");
        SeriesSet set;
        for (auto& x : read_series_csv(in)) {
          if (!uses(cfg, x.medium)) continue;
          (x.kind == SeriesKind::Raw ? set.raw : set.smoothed)[x.medium].push_back(std::move(x));
        }
        return set;
      });
      if (command == "fit") {
        run_stage("fit", out, [&] { return stage_fit(cfg, s.raw, out); });
      } else {
        const auto f = run_stage("features", out, [&] { return stage_features(cfg, s, out); });
        run_stage("boosts", out, [&] { return stage_boosts(cfg, f, out); });
      }
    } else if (command == "cluster" || command == "regress") {
      const FeatureSet f = run_stage("load", out, [&] {
        auto in = open_input(cfg.features, "features");
        FeatureSet set;
        for (auto& x : read_features_csv(in))
          if (uses(cfg, x.medium)) set[x.medium].push_back(std::move(x));
        return set;
      });
      if (command == "cluster") {
        run_stage("cluster", out, [&] { return stage_cluster(cfg, f, out); });
      } else {
        const auto persons = run_stage("load", out, [&] { return load_registry(cfg.registry); });
        run_stage("regress", out, [&] { return stage_regress(cfg, persons, f, out); });
      }
    } else if (command == "analyze") {
      std::vector<Person> persons;
      DailyMentionCounts counts;
      if (!cfg.docs.empty()) {
        auto scanned = run_stage("scan", out, [&] { return stage_scan(cfg, out); });
        persons = std::move(scanned.persons);
        counts = std::move(scanned.counts);
      } else {
        persons = run_stage("load", out, [&] { return load_registry(cfg.registry); });
        counts = run_stage("load", out, [&] { return load_counts(cfg.counts_dir); });
      }
      const SeriesSet s = run_stage("series", out, [&] { return stage_series(cfg, persons, counts, out); });
      run_stage("fit", out, [&] { return stage_fit(cfg, s.raw, out); });
      const FeatureSet f = run_stage("features", out, [&] { return stage_features(cfg, s, out); });
      run_stage("boosts", out, [&] { return stage_boosts(cfg, f, out); });
      run_stage("cluster", out, [&] { return stage_cluster(cfg, f, out); });
      run_stage("regress", out, [&] { return stage_regress(cfg, persons, f, out); });
    } else {
      throw InputError("unknown command '" + command + "'");
    }
  } catch (const std::exception& e) {
    out.write_manifest(cfg, command, "failed", e.what());
    throw;
  }
  out.write_manifest(cfg, command, "ok");
}

}  // namespace collmem
