#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "collmem/corpus.hpp"
#include "collmem/features.hpp"

namespace collmem {

enum class Outcome { ShortBoost, LongBoost, DiffShort, DiffLong };

std::string_view to_string(Outcome o);
std::optional<Outcome> parse_outcome(std::string_view s);
inline bool is_difference(Outcome o) { return o == Outcome::DiffShort || o == Outcome::DiffLong; }

// Factor levels. Index 0 is the reference level of each factor.
inline constexpr const char* kAgeLevels[] = {"70-79", "20-29", "30-39", "40-49",
                                             "50-59", "60-69", "80-89", "90-99"};
inline constexpr const char* kMannerLevels[] = {"natural", "unnatural"};
inline constexpr const char* kLanguageLevels[] = {"anglophone", "non-anglophone", "unknown"};
inline constexpr const char* kGenderLevels[] = {"male", "female"};
inline constexpr const char* kNotabilityLevels[] = {"arts",       "academia/engineering",
                                                    "general fame", "known for death",
                                                    "leadership", "sports"};

struct Factors {
  int age = 0;  // index into kAgeLevels
  int manner = 0;
  int language = 0;
  int gender = 0;
  int notability = 0;
};

// Maps a registry entry onto factor levels, or explains why it cannot.
// Level spellings are matched case-insensitively with '_', '-', ' ' and '/'
// treated alike.
std::optional<Factors> parse_factors(const Person& p, std::string* reason = nullptr);
int age_bracket(int age_at_death);  // index into kAgeLevels, -1 outside 20..99

struct RegressionSpec {
  Outcome outcome = Outcome::ShortBoost;
  Medium medium = Medium::News;  // ignored for difference outcomes
  bool age_manner_interaction = false;
};

struct DesignRow {
  std::string person_id;
  Factors factors;
  double pre_rank = 0;  // rank-scaled pre-mortem mean, or its news-minus-Twitter difference
};

struct Design {
  std::vector<std::string> names;
  Eigen::MatrixXd x;
  std::vector<std::string> dropped;  // interaction columns with no observations
};

// Intercept, pre-mortem rank, then dummies in the order manner, language,
// gender, notability, age; interaction products (unnatural x age) last.
Design build_design(std::span<const DesignRow> rows, bool age_manner_interaction);

struct RegressionData {
  std::vector<std::string> ids;
  std::vector<DesignRow> rows;
  Eigen::VectorXd y;
  std::map<std::string, std::string> excluded;  // person id -> reason
};

// Sample: persons with parseable factors and features in every supplied
// medium. Pre-mortem means are rank-scaled within the sample.
RegressionData prepare_regression(std::span<const Person> persons,
                                  const std::map<std::string, CurveFeatures>& news,
                                  const std::map<std::string, CurveFeatures>& twitter,
                                  const RegressionSpec& spec);

struct OlsFit {
  std::vector<std::string> names;
  Eigen::VectorXd beta, se, t, p;
  Eigen::MatrixXd covariance;
  Eigen::VectorXd residuals;
  double sse = 0, r2 = 0, adj_r2 = 0, rmse = 0;
  double f_statistic = 0, f_p = 1;
  std::size_t n = 0;
  int df_residual = 0;

  std::optional<std::size_t> index_of(std::string_view name) const;
};

// Least squares via column-pivoted QR. A rank-deficient design raises an
// AnalysisError naming the dependent columns.
OlsFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
               std::vector<std::string> names = {});

OlsFit fit_regression(const RegressionData& data, const RegressionSpec& spec);

inline double multiplicative_effect(double beta) { return std::pow(10.0, beta); }
// 10^(beta_a - beta_b) for two terms of the same factor; a term missing from
// the fit is the reference level with beta 0.
double multiplicative_contrast(const OlsFit& fit, std::string_view a, std::string_view b);

struct AgeEffect {
  int age = 0;     // index into kAgeLevels
  int manner = 0;  // index into kMannerLevels
  double estimate = 0;
  double se = 0;
  bool identifiable = true;
};

// Predicted outcome of the reference persona (median pre-mortem rank) for
// each age bracket and manner of death, from an interaction model. Brackets
// are reported in ascending age order.
std::vector<AgeEffect> age_effect_curves(const OlsFit& fit);

}  // namespace collmem
