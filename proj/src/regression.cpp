#include "collmem/regression.hpp"

#include <algorithm>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cctype>
#include <cmath>
#include <limits>

#include "collmem/nonparametric.hpp"

namespace collmem {

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::ShortBoost: return "short_boost";
    case Outcome::LongBoost: return "long_boost";
    case Outcome::DiffShort: return "diff_short";
    case Outcome::DiffLong: return "diff_long";
  }
  return "?";
}

std::optional<Outcome> parse_outcome(std::string_view s) {
  for (Outcome o : {Outcome::ShortBoost, Outcome::LongBoost, Outcome::DiffShort, Outcome::DiffLong})
    if (to_string(o) == s) return o;
  return std::nullopt;
}

namespace {

std::string level_key(std::string_view s) {
  std::string out;
  bool sep = false;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      if (sep && !out.empty()) out += '_';
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      sep = false;
    } else {
      sep = true;
    }
  }
  return out;
}

template <std::size_t N>
int find_level(const char* const (&levels)[N], std::string_view value) {
  const std::string key = level_key(value);
  for (std::size_t i = 0; i < N; ++i)
    if (level_key(levels[i]) == key) return static_cast<int>(i);
  return -1;
}

}  // namespace

int age_bracket(int age) {
  if (age < 20 || age > 99) return -1;
  const int decade = age / 10;  // 2..9
  if (decade == 7) return 0;
  return decade < 7 ? decade - 1 : decade - 2;
}

std::optional<Factors> parse_factors(const Person& p, std::string* reason) {
  auto fail = [&](std::string why) -> std::optional<Factors> {
    if (reason) *reason = std::move(why);
    return std::nullopt;
  };
  Factors f;
  if (!p.age_at_death) return fail("age_at_death missing");
  f.age = age_bracket(*p.age_at_death);
  if (f.age < 0) return fail("age_at_death outside 20-99");
  if ((f.manner = find_level(kMannerLevels, p.manner_of_death)) < 0)
    return fail("unknown manner_of_death '" + p.manner_of_death + "'");
  if ((f.language = find_level(kLanguageLevels, p.language_group)) < 0)
    return fail("unknown language_group '" + p.language_group + "'");
  if ((f.gender = find_level(kGenderLevels, p.gender)) < 0)
    return fail("unknown gender '" + p.gender + "'");
  if ((f.notability = find_level(kNotabilityLevels, p.notability_type)) < 0)
    return fail("unknown notability_type '" + p.notability_type + "'");
  return f;
}

Design build_design(std::span<const DesignRow> rows, bool interaction) {
  Design d;
  d.names = {"(Intercept)", "pre_mean_rank", "manner:unnatural", "language:non-anglophone",
             "language:unknown", "gender:female"};
  for (std::size_t i = 1; i < std::size(kNotabilityLevels); ++i)
    d.names.push_back(std::string("notability:") + kNotabilityLevels[i]);
  for (std::size_t i = 1; i < std::size(kAgeLevels); ++i)
    d.names.push_back(std::string("age:") + kAgeLevels[i]);
  const auto main = static_cast<Eigen::Index>(d.names.size());
  constexpr Eigen::Index kNotabilityCol = 6;
  const Eigen::Index age_col = kNotabilityCol + static_cast<Eigen::Index>(std::size(kNotabilityLevels)) - 1;

  const auto n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index nint = interaction ? static_cast<Eigen::Index>(std::size(kAgeLevels)) - 1 : 0;
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, main + nint);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    const auto& f = r.factors;
    x(i, 0) = 1;
    x(i, 1) = r.pre_rank;
    x(i, 2) = f.manner == 1;
    if (f.language > 0) x(i, 2 + f.language) = 1;
    x(i, 5) = f.gender == 1;
    if (f.notability > 0) x(i, kNotabilityCol + f.notability - 1) = 1;
    if (f.age > 0) x(i, age_col + f.age - 1) = 1;
    if (interaction && f.age > 0 && f.manner == 1) x(i, main + f.age - 1) = 1;
  }
  if (!interaction) {
    d.x = std::move(x);
    return d;
  }
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < main; ++j) keep.push_back(j);
  for (Eigen::Index j = 0; j < nint; ++j) {
    std::string name = std::string("age:") + kAgeLevels[j + 1] + " x manner:unnatural";
    if (x.col(main + j).any()) {
      keep.push_back(main + j);
      d.names.push_back(std::move(name));
    } else {
      d.dropped.push_back(std::move(name));
    }
  }
  d.x.resize(n, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) d.x.col(static_cast<Eigen::Index>(j)) = x.col(keep[j]);
  return d;
}

RegressionData prepare_regression(std::span<const Person> persons,
                                  const std::map<std::string, CurveFeatures>& news,
                                  const std::map<std::string, CurveFeatures>& twitter,
                                  const RegressionSpec& spec) {
  const bool diff = is_difference(spec.outcome);
  if (diff && (news.empty() || twitter.empty()))
    throw AnalysisError("difference outcomes need features from both media");
  const auto& primary = spec.medium == Medium::News ? news : twitter;
  if (!diff && primary.empty()) throw AnalysisError("no features for the requested medium");

  RegressionData data;
  std::vector<double> pre_news, pre_twitter, ys;
  for (const auto& p : persons) {
    std::string why;
    auto f = parse_factors(p, &why);
    if (!f) {
      data.excluded[p.id] = why;
      continue;
    }
    const auto n = news.find(p.id);
    const auto t = twitter.find(p.id);
    if ((!news.empty() && n == news.end()) || (!twitter.empty() && t == twitter.end())) {
      data.excluded[p.id] = "features missing for a medium";
      continue;
    }
    const bool short_term = spec.outcome == Outcome::ShortBoost || spec.outcome == Outcome::DiffShort;
    auto boost = [&](const CurveFeatures& c) { return short_term ? c.short_term_boost : c.long_term_boost; };
    if (diff) {
      ys.push_back(boost(n->second) - boost(t->second));
    } else {
      ys.push_back(boost(spec.medium == Medium::News ? n->second : t->second));
    }
    if (n != news.end()) pre_news.push_back(n->second.pre_mortem_mean);
    if (t != twitter.end()) pre_twitter.push_back(t->second.pre_mortem_mean);
    data.ids.push_back(p.id);
    data.rows.push_back({p.id, *f, 0});
  }
  if (data.rows.size() < 2) throw AnalysisError("regression sample has fewer than two persons");
  std::vector<double> pre;
  if (diff) {
    const auto a = rank_scale(pre_news), b = rank_scale(pre_twitter);
    for (std::size_t i = 0; i < a.size(); ++i) pre.push_back(a[i] - b[i]);
  } else {
    pre = rank_scale(spec.medium == Medium::News ? pre_news : pre_twitter);
  }
  for (std::size_t i = 0; i < pre.size(); ++i) data.rows[i].pre_rank = pre[i];
  data.y = Eigen::Map<Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
  return data;
}

std::optional<std::size_t> OlsFit::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

OlsFit ols_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> names) {
  const Eigen::Index n = x.rows(), p = x.cols();
  if (y.size() != n) throw AnalysisError("ols: outcome length does not match design rows");
  if (names.empty())
    for (Eigen::Index j = 0; j < p; ++j) names.push_back("x" + std::to_string(j));
  if (static_cast<Eigen::Index>(names.size()) != p) throw AnalysisError("ols: wrong number of column names");
  if (n <= p) throw AnalysisError("ols: need more observations than columns");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    std::string cols;
    for (Eigen::Index j = qr.rank(); j < p; ++j) {
      if (!cols.empty()) cols += ", ";
      cols += names[static_cast<std::size_t>(qr.colsPermutation().indices()[j])];
    }
    throw AnalysisError("ols: design matrix is rank deficient; dependent columns: " + cols);
  }

  OlsFit fit;
  fit.names = std::move(names);
  fit.n = static_cast<std::size_t>(n);
  fit.df_residual = static_cast<int>(n - p);
  fit.beta = qr.solve(y);
  fit.residuals = y - x * fit.beta;
  fit.sse = fit.residuals.squaredNorm();

  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd rinv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd inner = rinv * rinv.transpose();
  const auto& perm = qr.colsPermutation();
  const Eigen::MatrixXd xtx_inv = perm * inner * perm.transpose();

  const double sigma2 = fit.sse / fit.df_residual;
  fit.rmse = std::sqrt(sigma2);
  fit.covariance = sigma2 * xtx_inv;
  fit.se = fit.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  fit.t.resize(p);
  fit.p.resize(p);
  const boost::math::students_t tdist(fit.df_residual);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (fit.se[j] > 0) {
      fit.t[j] = fit.beta[j] / fit.se[j];
      fit.p[j] = 2 * boost::math::cdf(boost::math::complement(tdist, std::abs(fit.t[j])));
    } else {
      fit.t[j] = fit.beta[j] == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), fit.beta[j]);
      fit.p[j] = fit.beta[j] == 0 ? 1.0 : 0.0;
    }
  }

  const bool has_intercept = (x.col(0).array() == 1.0).all();
  const double ybar = has_intercept ? y.mean() : 0.0;
  const double sst = (y.array() - ybar).square().sum();
  const double scale = std::max(1.0, y.squaredNorm());
  fit.r2 = sst > 0 ? 1 - fit.sse / sst : (fit.sse <= 1e-24 * scale ? 1.0 : 0.0);
  const double dfm = static_cast<double>(has_intercept ? p - 1 : p);
  const double dft = static_cast<double>(has_intercept ? n - 1 : n);
  fit.adj_r2 = 1 - (1 - fit.r2) * dft / fit.df_residual;
  if (dfm > 0) {
    const double ssm = sst - fit.sse;
    if (fit.sse > 0) {
      fit.f_statistic = (ssm / dfm) / sigma2;
      const boost::math::fisher_f fdist(dfm, fit.df_residual);
      fit.f_p = fit.f_statistic > 0 ? boost::math::cdf(boost::math::complement(fdist, fit.f_statistic)) : 1.0;
    } else {
      fit.f_statistic = std::numeric_limits<double>::infinity();
      fit.f_p = 0;
    }
  } else {
    fit.f_statistic = std::numeric_limits<double>::quiet_NaN();
    fit.f_p = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

OlsFit fit_regression(const RegressionData& data, const RegressionSpec& spec) {
  Design d = build_design(data.rows, spec.age_manner_interaction);
  return ols_fit(d.x, data.y, d.names);
}

double multiplicative_contrast(const OlsFit& fit, std::string_view a, std::string_view b) {
  auto beta = [&](std::string_view name) {
    const auto i = fit.index_of(name);
    return i ? fit.beta[static_cast<Eigen::Index>(*i)] : 0.0;
  };
  return multiplicative_effect(beta(a) - beta(b));
}

std::vector<AgeEffect> age_effect_curves(const OlsFit& fit) {
  const auto intercept = fit.index_of("(Intercept)");
  const auto unnatural = fit.index_of("manner:unnatural");
  if (!intercept || !unnatural) throw AnalysisError("age_effect_curves: model lacks intercept or manner term");
  bool has_products = false;
  for (const auto& n : fit.names) has_products |= n.find(" x manner:unnatural") != std::string::npos;
  if (!has_products) throw AnalysisError("age_effect_curves: model has no age x manner terms");

  const auto p = static_cast<Eigen::Index>(fit.names.size());
  // Ascending ages: 20-29 .. 60-69, 70-79 (reference), 80-89, 90-99.
  const int ascending[] = {1, 2, 3, 4, 5, 0, 6, 7};
  std::vector<AgeEffect> out;
  for (int age : ascending)
    for (int manner = 0; manner < 2; ++manner) {
      AgeEffect e;
      e.age = age;
      e.manner = manner;
      Eigen::VectorXd c = Eigen::VectorXd::Zero(p);
      c[static_cast<Eigen::Index>(*intercept)] = 1;
      if (age > 0) {
        const auto a = fit.index_of(std::string("age:") + kAgeLevels[age]);
        if (a) c[static_cast<Eigen::Index>(*a)] = 1;
        else e.identifiable = false;
      }
      if (manner == 1) {
        c[static_cast<Eigen::Index>(*unnatural)] = 1;
        if (age > 0) {
          const auto ax = fit.index_of(std::string("age:") + kAgeLevels[age] + " x manner:unnatural");
          if (ax) c[static_cast<Eigen::Index>(*ax)] = 1;
          else e.identifiable = false;
        }
      }
      e.estimate = c.dot(fit.beta);
      e.se = std::sqrt(std::max(0.0, c.dot(fit.covariance * c)));
      out.push_back(e);
    }
  return out;
}

}  // namespace collmem
