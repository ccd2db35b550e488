#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "collmem/common.hpp"
#include "collmem/series.hpp"

namespace collmem {

// Pointwise arithmetic mean of log values over persons (all series must share
// the medium).
std::vector<double> mean_log_series(std::span<const MentionSeries> series);

// Forgetting-curve models. Every model maps day t >= 1 to a positive
// fraction; fits compare log10 of the model against the mean log curve.
enum class ModelId : std::uint8_t {
  ShiftedPowerLaw,      // a t^-b + c
  Exponential,          // a e^(-b t)
  ShiftedExponential,   // a e^(-b t) + c
  Biexponential,        // a e^(-b t) + c e^(-d t)
  PowerLaw,             // a t^-b
  Logarithmic,          // a - b ln t
  Hyperbolic,           // 1 / (a + b t)
  StretchedExponential, // a e^(-b sqrt t)
  ShiftedStretchedExponential,  // a e^(-b sqrt t) + c
};

struct ModelInfo {
  ModelId id;
  std::string_view name;
  std::string_view formula;
  std::vector<std::string_view> param_names;
};

const ModelInfo& model_info(ModelId id);
std::optional<ModelId> parse_model_id(std::string_view name);
// The shifted power law followed by the eight alternatives.
std::vector<ModelId> default_catalog();

// Evaluates the model at day t. Throws std::domain_error for t <= 0 in the
// power and logarithmic families, and std::invalid_argument on a wrong
// parameter count.
double eval_model(ModelId id, std::span<const double> params, double t);

struct FitStart {
  std::vector<double> initial;
  double initial_sse = 0;
  std::vector<double> final;
  double final_sse = 0;
  int iterations = 0;
  bool converged = false;
};

struct MemoryModelFit {
  ModelId model = ModelId::ShiftedPowerLaw;
  std::vector<double> params;
  double sse_log = 0;
  double r2_log = 0;
  int t_first = 1;
  int t_last = 400;
  bool converged = false;
  std::vector<FitStart> starts;
};

struct FitOptions {
  int t_first = 1;
  int max_iterations = 500;
  double relative_tolerance = 1e-10;
  // SSE at or below this counts as an exact fit.
  double absolute_tolerance = 1e-20;
};

// Raised when no start converged; carries the best fit found anyway.
class FitError : public AnalysisError {
 public:
  FitError(const std::string& what, MemoryModelFit best)
      : AnalysisError(what), best_(std::move(best)) {}
  const MemoryModelFit& best() const { return best_; }

 private:
  MemoryModelFit best_;
};

// Nonlinear least squares of log10(model(t)) against `curve`, where
// curve[i] is the mean log value on day options.t_first + i. Damped
// Gauss-Newton (Levenberg-Marquardt) with positive parameters optimized on
// the log scale, restarted from a model-specific grid of start points.
MemoryModelFit fit_model(ModelId id, std::span<const double> curve, const FitOptions& options = {});

double log_sse(ModelId id, std::span<const double> params, std::span<const double> curve,
               int t_first = 1);

struct ModelComparison {
  std::vector<MemoryModelFit> ranked;  // r2_log descending, then fewer params, then catalog order
  std::vector<std::pair<ModelId, std::string>> failures;
};

ModelComparison compare_models(std::span<const ModelId> catalog, std::span<const double> curve,
                               const FitOptions& options = {});

// Communicative memory u(t) = a t^-b and cultural memory v(t) = c.
struct ShiftedPowerLawParams {
  double a = 0;
  double b = 0;
  double c = 0;

  static ShiftedPowerLawParams from_fit(const MemoryModelFit& fit);
  // Parameters fitted to the average news and Twitter curves of the study.
  static constexpr ShiftedPowerLawParams published_news() { return {5.58e-5, 1.34, 1.75e-6}; }
  static constexpr ShiftedPowerLawParams published_twitter() { return {1.90e-6, 1.54, 2.35e-8}; }
};

struct Decomposition {
  double u = 0;
  double v = 0;
  double communicative_share = 0;
};

Decomposition decompose(const ShiftedPowerLawParams& p, double t);

// First integer day t >= 1 with u(t) < v.
int crossover_time(const ShiftedPowerLawParams& p);

// First integer day t >= 1 with communicative share <= q, q in (0, 1).
int quantile_time(const ShiftedPowerLawParams& p, double q);

}  // namespace collmem
