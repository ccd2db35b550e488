#include "collmem/memory_model.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace collmem {

std::vector<double> mean_log_series(std::span<const MentionSeries> series) {
  if (series.empty()) throw AnalysisError("mean_log_series: empty collection");
  std::vector<double> mean(kSeriesLength, 0.0);
  for (const auto& s : series) {
    if (s.medium != series.front().medium)
      throw AnalysisError("mean_log_series: series from different media");
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += s.values[i];
  }
  for (double& v : mean) v /= static_cast<double>(series.size());
  return mean;
}

namespace {

const ModelInfo kModels[] = {
    {ModelId::ShiftedPowerLaw, "shifted_power_law", "a*t^-b + c", {"a", "b", "c"}},
    {ModelId::Exponential, "exponential", "a*exp(-b*t)", {"a", "b"}},
    {ModelId::ShiftedExponential, "shifted_exponential", "a*exp(-b*t) + c", {"a", "b", "c"}},
    {ModelId::Biexponential, "biexponential", "a*exp(-b*t) + c*exp(-d*t)", {"a", "b", "c", "d"}},
    {ModelId::PowerLaw, "power_law", "a*t^-b", {"a", "b"}},
    {ModelId::Logarithmic, "logarithmic", "a - b*ln(t)", {"a", "b"}},
    {ModelId::Hyperbolic, "hyperbolic", "1/(a + b*t)", {"a", "b"}},
    {ModelId::StretchedExponential, "exponential_sqrt", "a*exp(-b*sqrt(t))", {"a", "b"}},
    {ModelId::ShiftedStretchedExponential, "shifted_exponential_sqrt", "a*exp(-b*sqrt(t)) + c",
     {"a", "b", "c"}},
};

// Which natural parameters are strictly positive and optimized as logs.
std::vector<bool> log_scaled(ModelId id) {
  switch (id) {
    case ModelId::ShiftedPowerLaw:
    case ModelId::ShiftedExponential:
    case ModelId::ShiftedStretchedExponential: return {true, false, true};
    case ModelId::Exponential:
    case ModelId::PowerLaw:
    case ModelId::StretchedExponential: return {true, false};
    case ModelId::Biexponential: return {true, false, true, false};
    case ModelId::Logarithmic:
    case ModelId::Hyperbolic: return {false, false};
  }
  return {};
}

bool is_power_family(ModelId id) {
  return id == ModelId::ShiftedPowerLaw || id == ModelId::PowerLaw || id == ModelId::Logarithmic;
}

// Value and gradient with respect to the natural parameters.
double eval_with_gradient(ModelId id, std::span<const double> p, double t, double* grad) {
  switch (id) {
    case ModelId::ShiftedPowerLaw: {
      const double tb = std::pow(t, -p[1]);
      if (grad) {
        grad[0] = tb;
        grad[1] = -p[0] * tb * std::log(t);
        grad[2] = 1.0;
      }
      return p[0] * tb + p[2];
    }
    case ModelId::Exponential: {
      const double e = std::exp(-p[1] * t);
      if (grad) {
        grad[0] = e;
        grad[1] = -p[0] * t * e;
      }
      return p[0] * e;
    }
    case ModelId::ShiftedExponential: {
      const double e = std::exp(-p[1] * t);
      if (grad) {
        grad[0] = e;
        grad[1] = -p[0] * t * e;
        grad[2] = 1.0;
      }
      return p[0] * e + p[2];
    }
    case ModelId::Biexponential: {
      const double e1 = std::exp(-p[1] * t), e2 = std::exp(-p[3] * t);
      if (grad) {
        grad[0] = e1;
        grad[1] = -p[0] * t * e1;
        grad[2] = e2;
        grad[3] = -p[2] * t * e2;
      }
      return p[0] * e1 + p[2] * e2;
    }
    case ModelId::PowerLaw: {
      const double tb = std::pow(t, -p[1]);
      if (grad) {
        grad[0] = tb;
        grad[1] = -p[0] * tb * std::log(t);
      }
      return p[0] * tb;
    }
    case ModelId::Logarithmic: {
      const double lt = std::log(t);
      if (grad) {
        grad[0] = 1.0;
        grad[1] = -lt;
      }
      return p[0] - p[1] * lt;
    }
    case ModelId::Hyperbolic: {
      const double d = p[0] + p[1] * t;
      if (grad) {
        grad[0] = -1.0 / (d * d);
        grad[1] = -t / (d * d);
      }
      return 1.0 / d;
    }
    case ModelId::StretchedExponential: {
      const double s = std::sqrt(t), e = std::exp(-p[1] * s);
      if (grad) {
        grad[0] = e;
        grad[1] = -p[0] * s * e;
      }
      return p[0] * e;
    }
    case ModelId::ShiftedStretchedExponential: {
      const double s = std::sqrt(t), e = std::exp(-p[1] * s);
      if (grad) {
        grad[0] = e;
        grad[1] = -p[0] * s * e;
        grad[2] = 1.0;
      }
      return p[0] * e + p[2];
    }
  }
  return 0.0;
}

constexpr double kLn10 = 2.302585092994045684;

struct CurveSummary {
  int n;
  double first;  // fraction at the first day
  double tail;   // geometric mean fraction over the last quarter
  double min;
  double tail_mid;  // mid day of the last quarter
};

CurveSummary summarize(std::span<const double> curve, int t_first) {
  CurveSummary s{};
  s.n = static_cast<int>(curve.size());
  s.first = std::pow(10.0, curve.front());
  const std::size_t q = std::max<std::size_t>(1, curve.size() / 4);
  double acc = 0;
  for (std::size_t i = curve.size() - q; i < curve.size(); ++i) acc += curve[i];
  s.tail = std::pow(10.0, acc / static_cast<double>(q));
  s.min = std::pow(10.0, *std::min_element(curve.begin(), curve.end()));
  s.tail_mid = t_first + static_cast<double>(curve.size()) - static_cast<double>(q) / 2.0;
  return s;
}

// Least-squares line y = a + b x.
std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double b = sxx > 0 ? sxy / sxx : 0.0;
  return {my - b * mx, b};
}

std::vector<std::vector<double>> start_points(ModelId id, std::span<const double> curve,
                                              int t_first) {
  const CurveSummary s = summarize(curve, t_first);
  const double t1 = t_first;
  const double tn = t_first + s.n - 1;
  std::vector<std::vector<double>> starts;
  auto amp = [&](double c) { return std::max(s.first - c, 0.1 * s.first); };

  switch (id) {
    case ModelId::ShiftedPowerLaw:
      for (double b : {0.5, 1.0, 1.5, 2.0})
        for (double c : {s.tail, s.min}) starts.push_back({amp(c) * std::pow(t1, b), b, c});
      break;
    case ModelId::PowerLaw:
      for (double b : {0.5, 1.0, 1.5, 2.0}) {
        starts.push_back({s.first * std::pow(t1, b), b});
        starts.push_back({s.tail * std::pow(s.tail_mid, b), b});
      }
      break;
    case ModelId::Exponential:
      for (double b : {0.001, 0.01, 0.1, 1.0}) {
        starts.push_back({s.first * std::exp(b * t1), b});
        starts.push_back({s.tail * std::exp(std::min(b * s.tail_mid, 600.0)), b});
      }
      break;
    case ModelId::ShiftedExponential:
      for (double b : {0.01, 0.05, 0.2, 1.0})
        for (double c : {s.tail, s.min}) starts.push_back({amp(c) * std::exp(b * t1), b, c});
      break;
    case ModelId::Biexponential:
      for (double b : {0.05, 0.2, 0.5, 1.0})
        for (double d : {0.0005, 0.005}) {
          const double c = s.tail * std::exp(d * s.tail_mid);
          const double a = std::max(s.first - c * std::exp(-d * t1), 0.1 * s.first) * std::exp(b * t1);
          starts.push_back({a, b, c, d});
        }
      break;
    case ModelId::StretchedExponential:
      for (double b : {0.05, 0.2, 0.5, 1.0}) {
        starts.push_back({s.first * std::exp(b * std::sqrt(t1)), b});
        starts.push_back({s.tail * std::exp(b * std::sqrt(s.tail_mid)), b});
      }
      break;
    case ModelId::ShiftedStretchedExponential:
      for (double b : {0.1, 0.3, 1.0, 2.0})
        for (double c : {s.tail, s.min}) starts.push_back({amp(c) * std::exp(b * std::sqrt(t1)), b, c});
      break;
    case ModelId::Logarithmic: {
      std::vector<double> x, y;
      for (int i = 0; i < s.n; ++i) {
        x.push_back(std::log(t1 + i));
        y.push_back(std::pow(10.0, curve[i]));
      }
      auto [a, slope] = line_fit(x, y);
      double b = -slope;
      if (a - b * std::log(tn) <= 0) b = 0.9 * a / std::log(tn);
      if (a > 0) starts.push_back({a, b});
      starts.push_back({s.first, 0.9 * (s.first - s.min) / std::log(tn)});
      starts.push_back({s.tail, 0.0});
      break;
    }
    case ModelId::Hyperbolic: {
      std::vector<double> x, y;
      for (int i = 0; i < s.n; ++i) {
        x.push_back(t1 + i);
        y.push_back(std::pow(10.0, -curve[i]));
      }
      auto [a, b] = line_fit(x, y);
      if (a + b * t1 > 0 && a + b * tn > 0) starts.push_back({a, b});
      starts.push_back({1.0 / s.first, (1.0 / s.tail - 1.0 / s.first) / (tn - t1)});
      starts.push_back({1.0 / s.tail, 0.0});
      break;
    }
  }
  return starts;
}

struct Problem {
  ModelId id;
  std::span<const double> curve;
  int t_first;
  std::vector<bool> logp;

  std::vector<double> natural(const Eigen::VectorXd& theta) const {
    std::vector<double> p(static_cast<std::size_t>(theta.size()));
    for (Eigen::Index i = 0; i < theta.size(); ++i)
      p[i] = logp[i] ? std::exp(theta[i]) : theta[i];
    return p;
  }
  Eigen::VectorXd internal(const std::vector<double>& p) const {
    Eigen::VectorXd th(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) th[i] = logp[i] ? std::log(p[i]) : p[i];
    return th;
  }

  // Residuals r_t = y_t - log10 m(t) and optionally the Jacobian dr/dtheta.
  // Returns +inf when the model leaves the positive range.
  double evaluate(const Eigen::VectorXd& theta, Eigen::VectorXd& r, Eigen::MatrixXd* J) const {
    const auto p = natural(theta);
    const auto n = static_cast<Eigen::Index>(curve.size());
    const auto np = theta.size();
    r.resize(n);
    if (J) J->resize(n, np);
    double grad[8];
    double sse = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double t = t_first + static_cast<double>(i);
      const double m = eval_with_gradient(id, p, t, J ? grad : nullptr);
      if (!(m > 0) || !std::isfinite(m)) return std::numeric_limits<double>::infinity();
      r[i] = curve[i] - std::log10(m);
      sse += r[i] * r[i];
      if (J) {
        for (Eigen::Index k = 0; k < np; ++k) {
          const double dm = logp[k] ? grad[k] * p[k] : grad[k];
          (*J)(i, k) = -dm / (m * kLn10);
        }
      }
    }
    return std::isfinite(sse) ? sse : std::numeric_limits<double>::infinity();
  }
};

FitStart run_lm(const Problem& prob, const std::vector<double>& start, const FitOptions& opt) {
  FitStart rec;
  rec.initial = start;
  Eigen::VectorXd theta = prob.internal(start);
  Eigen::VectorXd r, r_try;
  Eigen::MatrixXd J;
  double sse = prob.evaluate(theta, r, &J);
  rec.initial_sse = sse;
  if (!std::isfinite(sse)) {
    rec.final = start;
    rec.final_sse = sse;
    return rec;
  }

  double lambda = 1e-3;
  int it = 0;
  bool converged = sse <= opt.absolute_tolerance;
  while (!converged && it < opt.max_iterations) {
    ++it;
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    Eigen::VectorXd diag = A.diagonal().cwiseMax(1e-12 * std::max(1.0, A.diagonal().maxCoeff()));
    Eigen::MatrixXd damped = A;
    damped.diagonal() += lambda * diag;
    const Eigen::VectorXd step = damped.ldlt().solve(-g);
    const Eigen::VectorXd trial = theta + step;
    const double sse_try = step.allFinite() ? prob.evaluate(trial, r_try, nullptr)
                                            : std::numeric_limits<double>::infinity();
    if (sse_try < sse) {
      const double rel = (sse - sse_try) / sse;
      theta = trial;
      sse = prob.evaluate(theta, r, &J);
      lambda = std::max(lambda / 10.0, 1e-15);
      if (rel < opt.relative_tolerance || sse <= opt.absolute_tolerance) converged = true;
    } else {
      lambda *= 10.0;
      // No descent direction left at machine precision: a stationary point.
      if (lambda > 1e16) converged = true;
    }
  }
  rec.final = prob.natural(theta);
  rec.final_sse = sse;
  rec.iterations = it;
  rec.converged = converged;
  return rec;
}

double total_sum_squares(std::span<const double> curve) {
  const double mean = std::accumulate(curve.begin(), curve.end(), 0.0) / static_cast<double>(curve.size());
  double s = 0;
  for (double y : curve) s += (y - mean) * (y - mean);
  return s;
}

}  // namespace

const ModelInfo& model_info(ModelId id) {
  for (const auto& m : kModels)
    if (m.id == id) return m;
  throw std::invalid_argument("unknown model id");
}

std::optional<ModelId> parse_model_id(std::string_view name) {
  for (const auto& m : kModels)
    if (m.name == name) return m.id;
  return std::nullopt;
}

std::vector<ModelId> default_catalog() {
  std::vector<ModelId> ids;
  for (const auto& m : kModels) ids.push_back(m.id);
  return ids;
}

double eval_model(ModelId id, std::span<const double> params, double t) {
  if (params.size() != model_info(id).param_names.size())
    throw std::invalid_argument("eval_model: wrong parameter count for " +
                                std::string(model_info(id).name));
  if (is_power_family(id) && !(t > 0))
    throw std::domain_error("eval_model: " + std::string(model_info(id).name) +
                            " is undefined at t <= 0");
  return eval_with_gradient(id, params, t, nullptr);
}

double log_sse(ModelId id, std::span<const double> params, std::span<const double> curve,
               int t_first) {
  Problem prob{id, curve, t_first, log_scaled(id)};
  Eigen::VectorXd r;
  std::vector<double> p(params.begin(), params.end());
  for (std::size_t i = 0; i < p.size(); ++i)
    if (prob.logp[i] && !(p[i] > 0)) return std::numeric_limits<double>::infinity();
  return prob.evaluate(prob.internal(p), r, nullptr);
}

MemoryModelFit fit_model(ModelId id, std::span<const double> curve, const FitOptions& options) {
  if (curve.size() < model_info(id).param_names.size() + 1)
    throw AnalysisError("fit_model: curve too short");
  for (double y : curve)
    if (!std::isfinite(y)) throw AnalysisError("fit_model: curve has non-finite values");
  if (options.t_first < 1 && is_power_family(id))
    throw AnalysisError("fit_model: power-family models need t >= 1");

  Problem prob{id, curve, options.t_first, log_scaled(id)};
  MemoryModelFit fit;
  fit.model = id;
  fit.t_first = options.t_first;
  fit.t_last = options.t_first + static_cast<int>(curve.size()) - 1;

  const FitStart* best = nullptr;
  for (const auto& s : start_points(id, curve, options.t_first)) {
    bool valid = true;
    for (std::size_t i = 0; i < s.size(); ++i)
      if (prob.logp[i] && !(s[i] > 0)) valid = false;
    if (!valid) continue;
    fit.starts.push_back(run_lm(prob, s, options));
  }
  for (const auto& s : fit.starts) {
    if (!std::isfinite(s.final_sse)) continue;
    if (!best || s.final_sse < best->final_sse) best = &s;
  }
  if (!best) throw AnalysisError("fit_model: no feasible start for " + std::string(model_info(id).name));

  fit.params = best->final;
  fit.sse_log = best->final_sse;
  fit.converged = best->converged;
  const double sst = total_sum_squares(curve);
  fit.r2_log = sst > 0 ? 1.0 - fit.sse_log / sst : (fit.sse_log <= options.absolute_tolerance ? 1.0 : 0.0);
  if (!fit.converged)
    throw FitError("fit_model: no start of " + std::string(model_info(id).name) + " converged",
                   fit);
  return fit;
}

ModelComparison compare_models(std::span<const ModelId> catalog, std::span<const double> curve,
                               const FitOptions& options) {
  if (catalog.size() < 2) throw AnalysisError("compare_models: catalog needs at least two models");
  std::vector<std::future<MemoryModelFit>> jobs;
  for (ModelId id : catalog)
    jobs.push_back(std::async(std::launch::async, [=] { return fit_model(id, curve, options); }));

  ModelComparison out;
  std::vector<std::pair<std::size_t, MemoryModelFit>> ok;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      ok.emplace_back(i, jobs[i].get());
    } catch (const AnalysisError& e) {
      out.failures.emplace_back(catalog[i], e.what());
    }
  }
  std::stable_sort(ok.begin(), ok.end(), [](const auto& x, const auto& y) {
    if (x.second.r2_log != y.second.r2_log) return x.second.r2_log > y.second.r2_log;
    const auto px = x.second.params.size(), py = y.second.params.size();
    if (px != py) return px < py;
    return x.first < y.first;
  });
  for (auto& [i, f] : ok) out.ranked.push_back(std::move(f));
  return out;
}

ShiftedPowerLawParams ShiftedPowerLawParams::from_fit(const MemoryModelFit& fit) {
  if (fit.model != ModelId::ShiftedPowerLaw || fit.params.size() != 3)
    throw std::invalid_argument("fit is not a shifted power law");
  return {fit.params[0], fit.params[1], fit.params[2]};
}

Decomposition decompose(const ShiftedPowerLawParams& p, double t) {
  Decomposition d;
  d.u = p.a * std::pow(t, -p.b);
  d.v = p.c;
  d.communicative_share = d.u / (d.u + d.v);
  return d;
}

namespace {

void check_params(const ShiftedPowerLawParams& p) {
  if (!(p.a > 0 && p.b > 0 && p.c > 0))
    throw std::invalid_argument("shifted power law needs a, b, c > 0");
}

}  // namespace

int crossover_time(const ShiftedPowerLawParams& p) {
  check_params(p);
  if (p.a < p.c) return 1;
  const double root = std::pow(p.a / p.c, 1.0 / p.b);
  int t = std::max(1, static_cast<int>(std::ceil(root)));
  // Guard against rounding in the continuous root.
  while (t > 1 && decompose(p, t - 1).u < p.c) --t;
  while (!(decompose(p, t).u < p.c)) ++t;
  return t;
}

int quantile_time(const ShiftedPowerLawParams& p, double q) {
  check_params(p);
  if (!(q > 0 && q < 1)) throw std::invalid_argument("quantile_time: q must lie in (0, 1)");
  const double root = std::pow((1.0 - q) * p.a / (q * p.c), 1.0 / p.b);
  int t = std::max(1, static_cast<int>(std::ceil(root)));
  while (t > 1 && decompose(p, t - 1).communicative_share <= q) --t;
  while (!(decompose(p, t).communicative_share <= q)) ++t;
  return t;
}

}  // namespace collmem
