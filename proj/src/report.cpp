#include "collmem/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "collmem/corpus_io.hpp"

namespace collmem {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

namespace {

double parse_double(const std::string& s, const char* what) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError(std::string("invalid number in ") + what + ": '" + s + "'");
  return v;
}

int parse_int(const std::string& s, const char* what) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InputError(std::string("invalid integer in ") + what + ": '" + s + "'");
  return v;
}

Medium medium_field(const std::string& s) {
  auto m = parse_medium(s);
  if (!m) throw InputError("unknown medium '" + s + "'");
  return *m;
}

void expect_header(std::istream& in, const std::string& header, const char* what) {
  std::string line;
  if (!std::getline(in, line)) throw InputError(std::string(what) + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) throw InputError(std::string(what) + ": expected header '" + header + "'");
}

std::string cluster_name(int label) { return "C" + std::to_string(label + 1); }

}  // namespace

void write_series_csv(std::ostream& out, std::span<const MentionSeries> series) {
  out << "person_id,medium,t,value,kind,interpolated\n";
  for (const auto& s : series)
    for (int t = kSeriesFirst; t <= kSeriesLast; ++t)
      out << csv_escape(s.person_id) << ',' << to_string(s.medium) << ',' << t << ','
          << format_number(s.at(t)) << ',' << to_string(s.kind) << ','
          << (s.interpolated_days.count(t) ? 1 : 0) << '\n';
}

std::vector<MentionSeries> read_series_csv(std::istream& in) {
  expect_header(in, "person_id,medium,t,value,kind,interpolated", "series csv");
  std::vector<MentionSeries> out;
  std::map<std::tuple<std::string, Medium, SeriesKind>, std::size_t> slot;
  std::vector<std::vector<bool>> seen;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) throw InputError("series csv line " + std::to_string(lineno) + ": expected 6 fields");
    const Medium m = medium_field(f[1]);
    SeriesKind kind;
    if (f[4] == "raw") kind = SeriesKind::Raw;
    else if (f[4] == "smoothed") kind = SeriesKind::Smoothed;
    else throw InputError("series csv line " + std::to_string(lineno) + ": unknown kind '" + f[4] + "'");
    const int t = parse_int(f[2], "series csv");
    if (t < kSeriesFirst || t > kSeriesLast)
      throw InputError("series csv line " + std::to_string(lineno) + ": day outside series domain");
    auto key = std::make_tuple(f[0], m, kind);
    auto it = slot.find(key);
    if (it == slot.end()) {
      it = slot.emplace(key, out.size()).first;
      MentionSeries s;
      s.person_id = f[0];
      s.medium = m;
      s.kind = kind;
      out.push_back(std::move(s));
      seen.emplace_back(kSeriesLength, false);
    }
    auto& s = out[it->second];
    auto& mark = seen[it->second];
    if (mark[t - kSeriesFirst]) throw InputError("series csv line " + std::to_string(lineno) + ": duplicate day");
    mark[t - kSeriesFirst] = true;
    s.at(t) = parse_double(f[3], "series csv");
    if (f[5] == "1") s.interpolated_days.insert(t);
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    if (std::find(seen[i].begin(), seen[i].end(), false) != seen[i].end())
      throw InputError("series csv: incomplete series for " + out[i].person_id);
  return out;
}

void write_features_csv(std::ostream& out, std::span<const CurveFeatures> features) {
  out << "person_id,medium,pre_mean,short_boost,long_boost,halving_time\n";
  for (const auto& f : features)
    out << csv_escape(f.person_id) << ',' << to_string(f.medium) << ','
        << format_number(f.pre_mortem_mean) << ',' << format_number(f.short_term_boost) << ','
        << format_number(f.long_term_boost) << ',' << f.halving_time << '\n';
}

std::vector<CurveFeatures> read_features_csv(std::istream& in) {
  expect_header(in, "person_id,medium,pre_mean,short_boost,long_boost,halving_time", "features csv");
  std::vector<CurveFeatures> out;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 6) throw InputError("features csv line " + std::to_string(lineno) + ": expected 6 fields");
    CurveFeatures c;
    c.person_id = f[0];
    c.medium = medium_field(f[1]);
    c.pre_mortem_mean = parse_double(f[2], "features csv");
    c.short_term_boost = parse_double(f[3], "features csv");
    c.long_term_boost = parse_double(f[4], "features csv");
    c.halving_time = parse_int(f[5], "features csv");
    out.push_back(std::move(c));
  }
  return out;
}

nlohmann::json fit_report(const MemoryModelFit& fit) {
  const auto& info = model_info(fit.model);
  nlohmann::json params = nlohmann::json::object();
  for (std::size_t i = 0; i < fit.params.size(); ++i) params[std::string(info.param_names[i])] = fit.params[i];
  nlohmann::json starts = nlohmann::json::array();
  for (const auto& s : fit.starts)
    starts.push_back({{"initial", s.initial},
                      {"initial_sse", s.initial_sse},
                      {"final", s.final},
                      {"final_sse", s.final_sse},
                      {"iterations", s.iterations},
                      {"converged", s.converged}});
  return {{"model_id", std::string(info.name)},
          {"formula", std::string(info.formula)},
          {"params", params},
          {"sse_log", fit.sse_log},
          {"r2_log", fit.r2_log},
          {"t_first", fit.t_first},
          {"t_last", fit.t_last},
          {"converged", fit.converged},
          {"starts", starts}};
}

void write_model_comparison_csv(std::ostream& out, const ModelComparison& cmp) {
  out << "rank,model,n_params,sse_log,r2_log,converged\n";
  int rank = 1;
  for (const auto& f : cmp.ranked)
    out << rank++ << ',' << model_info(f.model).name << ',' << f.params.size() << ','
        << format_number(f.sse_log) << ',' << format_number(f.r2_log) << ','
        << (f.converged ? "true" : "false") << '\n';
  for (const auto& [id, why] : cmp.failures)
    out << "," << model_info(id).name << ",,,," << csv_escape("failed: " + why) << '\n';
}

void write_decomposition_csv(std::ostream& out, const ShiftedPowerLawParams& p, int t_first,
                             int t_last) {
  out << "t,u,v,share\n";
  for (int t = t_first; t <= t_last; ++t) {
    const auto d = decompose(p, t);
    out << t << ',' << format_number(d.u) << ',' << format_number(d.v) << ','
        << format_number(d.communicative_share) << '\n';
  }
}

nlohmann::json decomposition_summary(const ShiftedPowerLawParams& p) {
  return {{"a", p.a},
          {"b", p.b},
          {"c", p.c},
          {"crossover_day", crossover_time(p)},
          {"quantile_25_day", quantile_time(p, 0.25)}};
}

void write_assignments_csv(std::ostream& out, std::span<const std::string> ids,
                           std::span<const int> labels) {
  out << "person_id,cluster\n";
  for (std::size_t i = 0; i < ids.size(); ++i) out << csv_escape(ids[i]) << ',' << cluster_name(labels[i]) << '\n';
}

nlohmann::json cluster_report(Medium m, const KSelection& sel, const Standardized& data,
                              const std::string& assignments_path) {
  nlohmann::json curve = nlohmann::json::array();
  for (const auto& [k, s] : sel.curve) curve.push_back({{"k", k}, {"mean_silhouette", s}});
  auto rows = [](const Eigen::MatrixXd& c) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < c.rows(); ++i) {
      nlohmann::json row = nlohmann::json::object();
      for (Eigen::Index j = 0; j < c.cols(); ++j) row[kFeatureNames[j]] = c(i, j);
      out.push_back(row);
    }
    return out;
  };
  return {{"medium", std::string(to_string(m))},
          {"n", data.ids.size()},
          {"k_curve", curve},
          {"best_k", sel.best_k},
          {"mean_silhouette", sel.best.mean_silhouette},
          {"sizes", sel.best.sizes},
          {"centroids_standardized", rows(sel.best.centroids)},
          {"centroids", rows(data.destandardize(sel.best.centroids))},
          {"assignments", assignments_path}};
}

nlohmann::json confusion_report(const ConfusionMatrix& m) {
  const auto r = m.row_marginals();
  const auto c = m.col_marginals();
  const auto bounds = trace_bounds(r, c);
  nlohmann::json out = {{"matrix", m.counts},
                        {"row_marginals", r},
                        {"col_marginals", c},
                        {"n", m.n()},
                        {"trace", m.trace()},
                        {"expected_trace", expected_trace(r, c)},
                        {"min_trace", bounds.min},
                        {"max_trace", bounds.max}};
  const double range = static_cast<double>(bounds.max - bounds.min);
  out["trace_range_fraction"] = range > 0 ? (m.trace() - bounds.min) / range : 1.0;
  out["expected_range_fraction"] = range > 0 ? (expected_trace(r, c) - bounds.min) / range : 1.0;
  nlohmann::json cells = nlohmann::json::array();
  const auto n = m.n();
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double p0 = static_cast<double>(r[i]) * static_cast<double>(c[j]) /
                        (static_cast<double>(n) * static_cast<double>(n));
      nlohmann::json cell = {{"row", i}, {"col", j}, {"count", m.counts[i][j]}, {"expected", p0 * n}};
      if (p0 > 0 && p0 < 1) {
        const auto t = proportions_test(m.counts[i][j], n, p0);
        cell["chi2"] = t.statistic;
        cell["p"] = t.p;
      }
      cells.push_back(cell);
    }
  out["cells"] = cells;
  try {
    const auto chi = chi2_independence(m);
    out["chi2"] = chi.statistic;
    out["dof"] = chi.dof;
    out["p"] = chi.p;
  } catch (const AnalysisError& e) {
    out["chi2"] = nullptr;
    out["p"] = nullptr;
    out["chi2_note"] = e.what();
  }
  return out;
}

void write_coefficients_csv(std::ostream& out, const OlsFit& fit) {
  out << "term,estimate,std_error,p_value\n";
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    out << csv_escape(fit.names[i]) << ',' << format_number(fit.beta[j]) << ','
        << format_number(fit.se[j]) << ',' << format_number(fit.p[j]) << '\n';
  }
  out << "r2," << format_number(fit.r2) << ",,\n";
  out << "adj_r2," << format_number(fit.adj_r2) << ",,\n";
  out << "n," << fit.n << ",,\n";
  out << "rmse," << format_number(fit.rmse) << ",,\n";
  out << "f_stat," << format_number(fit.f_statistic) << ",,\n";
  out << "f_p," << format_number(fit.f_p) << ",,\n";
}

void write_effects_csv(std::ostream& out, const OlsFit& fit) {
  out << "term,estimate,multiplicative\n";
  for (std::size_t i = 0; i < fit.names.size(); ++i) {
    const double b = fit.beta[static_cast<Eigen::Index>(i)];
    out << csv_escape(fit.names[i]) << ',' << format_number(b) << ','
        << format_number(multiplicative_effect(b)) << '\n';
  }
}

void write_age_effects_csv(std::ostream& out, std::span<const AgeEffect> effects) {
  out << "age,manner,estimate,std_error,lower,upper,identifiable\n";
  for (const auto& e : effects)
    out << kAgeLevels[e.age] << ',' << kMannerLevels[e.manner] << ',' << format_number(e.estimate) << ','
        << format_number(e.se) << ',' << format_number(e.estimate - 2 * e.se) << ','
        << format_number(e.estimate + 2 * e.se) << ',' << (e.identifiable ? "true" : "false") << '\n';
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Roughly five round tick positions covering [lo, hi].
std::vector<double> ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
    out.push_back(std::abs(v) < 1e-12 * span ? 0.0 : v);
  return out;
}

std::string tick_label(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

}  // namespace

std::string svg_line_chart(const Chart& chart) {
  double x0 = HUGE_VAL, x1 = -HUGE_VAL, y0 = HUGE_VAL, y1 = -HUGE_VAL;
  for (const auto& l : chart.lines)
    for (std::size_t i = 0; i < std::min(l.x.size(), l.y.size()); ++i) {
      if (!std::isfinite(l.x[i]) || !std::isfinite(l.y[i])) continue;
      x0 = std::min(x0, l.x[i]);
      x1 = std::max(x1, l.x[i]);
      y0 = std::min(y0, l.y[i]);
      y1 = std::max(y1, l.y[i]);
    }
  if (!(x0 <= x1)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x0 -= 0.5, x1 += 0.5;
  if (y1 == y0) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;

  const double left = 70, right = 170, top = 40, bottom = 55;
  const double w = chart.width - left - right, h = chart.height - top - bottom;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * w; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * h; };

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << chart.width << "\" height=\"" << chart.height
    << "\" viewBox=\"0 0 " << chart.width << ' ' << chart.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << left + w / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << xml_escape(chart.title) << "</text>\n";
  s << "<g stroke=\"#ddd\">\n";
  for (double t : ticks(x0, x1))
    s << "<line x1=\"" << fixed(px(t), 2) << "\" y1=\"" << top << "\" x2=\"" << fixed(px(t), 2) << "\" y2=\""
      << top + h << "\"/>\n";
  for (double t : ticks(y0, y1))
    s << "<line x1=\"" << left << "\" y1=\"" << fixed(py(t), 2) << "\" x2=\"" << left + w << "\" y2=\""
      << fixed(py(t), 2) << "\"/>\n";
  s << "</g>\n<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ticks(x0, x1))
    s << "<text x=\"" << fixed(px(t), 2) << "\" y=\"" << top + h + 16 << "\" text-anchor=\"middle\">"
      << tick_label(t) << "</text>\n";
  for (double t : ticks(y0, y1))
    s << "<text x=\"" << left - 6 << "\" y=\"" << fixed(py(t) + 4, 2) << "\" text-anchor=\"end\">"
      << tick_label(t) << "</text>\n";
  s << "<text x=\"" << left + w / 2 << "\" y=\"" << chart.height - 12 << "\" text-anchor=\"middle\">"
    << xml_escape(chart.x_label) << "</text>\n"
    << "<text transform=\"translate(18," << top + h / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << xml_escape(chart.y_label) << "</text>\n";

  int legend = 0;
  for (const auto& l : chart.lines) {
    s << "<polyline fill=\"none\" stroke=\"" << xml_escape(l.color) << "\" stroke-width=\"1.5\""
      << (l.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < std::min(l.x.size(), l.y.size()); ++i) {
      if (!std::isfinite(l.x[i]) || !std::isfinite(l.y[i])) continue;
      if (!first) s << ' ';
      s << fixed(px(l.x[i]), 2) << ',' << fixed(py(l.y[i]), 2);
      first = false;
    }
    s << "\"/>\n";
    const double ly = top + 12 + 18 * legend++;
    s << "<line x1=\"" << left + w + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + w + 36 << "\" y2=\"" << ly
      << "\" stroke=\"" << xml_escape(l.color) << "\" stroke-width=\"2\""
      << (l.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>\n"
      << "<text x=\"" << left + w + 42 << "\" y=\"" << ly + 4 << "\">" << xml_escape(l.label) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

}  // namespace collmem
