#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "collmem/clustering.hpp"
#include "collmem/contingency.hpp"
#include "collmem/features.hpp"
#include "collmem/memory_model.hpp"
#include "collmem/regression.hpp"
#include "collmem/series.hpp"

namespace collmem {

// Shortest representation that parses back to the same double.
std::string format_number(double v);

// `person_id,medium,t,value,kind,interpolated`
void write_series_csv(std::ostream& out, std::span<const MentionSeries> series);
std::vector<MentionSeries> read_series_csv(std::istream& in);

// `person_id,medium,pre_mean,short_boost,long_boost,halving_time`
void write_features_csv(std::ostream& out, std::span<const CurveFeatures> features);
std::vector<CurveFeatures> read_features_csv(std::istream& in);

nlohmann::json fit_report(const MemoryModelFit& fit);
void write_model_comparison_csv(std::ostream& out, const ModelComparison& cmp);

// `t,u,v,share` for t = t_first..t_last.
void write_decomposition_csv(std::ostream& out, const ShiftedPowerLawParams& p, int t_first = 1,
                             int t_last = 400);
nlohmann::json decomposition_summary(const ShiftedPowerLawParams& p);

// `person_id,cluster` with clusters named C1..Ck.
void write_assignments_csv(std::ostream& out, std::span<const std::string> ids,
                           std::span<const int> labels);

nlohmann::json cluster_report(Medium m, const KSelection& sel, const Standardized& data,
                              const std::string& assignments_path);
nlohmann::json confusion_report(const ConfusionMatrix& m);

// `term,estimate,std_error,p_value` followed by footer rows r2, adj_r2, n,
// rmse, f_stat, f_p (value in the estimate column).
void write_coefficients_csv(std::ostream& out, const OlsFit& fit);
// `term,estimate,multiplicative` where multiplicative = 10^estimate.
void write_effects_csv(std::ostream& out, const OlsFit& fit);
// `age,manner,estimate,std_error,lower,upper,identifiable` with +-2 SE bands.
void write_age_effects_csv(std::ostream& out, std::span<const AgeEffect> effects);

struct ChartLine {
  std::string label;
  std::string color;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<ChartLine> lines;
  int width = 760;
  int height = 460;
};

// Standalone SVG document.
std::string svg_line_chart(const Chart& chart);

}  // namespace collmem
