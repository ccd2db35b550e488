#include "collmem/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace collmem {

std::string_view to_string(SeriesKind k) { return k == SeriesKind::Raw ? "raw" : "smoothed"; }

std::span<const double> MentionSeries::window(int from, int to) const {
  if (from < kSeriesFirst || to > kSeriesLast || from > to)
    throw AnalysisError("series window [" + std::to_string(from) + ", " + std::to_string(to) +
                        "] outside domain");
  return std::span<const double>(values).subspan(static_cast<std::size_t>(from - kSeriesFirst),
                                                 static_cast<std::size_t>(to - from + 1));
}

FractionSeries fraction_series(const Person& person, Medium medium,
                               const DailyMentionCounts& counts,
                               const std::set<Day>& missing_days) {
  if (!person.death_date) throw InputError("person '" + person.id + "' has no death date");
  const Day death = *person.death_date;
  FractionSeries out(kSeriesLength);
  for (int t = kSeriesFirst; t <= kSeriesLast; ++t) {
    const Day d = death + t;
    const std::int64_t total = counts.total(medium, d);
    if (total <= 0 || missing_days.count(d)) continue;
    out[static_cast<std::size_t>(t - kSeriesFirst)] =
        static_cast<double>(counts.mention(person.id, medium, d)) / static_cast<double>(total);
  }
  return out;
}

double compute_epsilon(std::span<const FractionSeries> series) {
  double eps = std::numeric_limits<double>::infinity();
  for (const auto& s : series)
    for (const auto& v : s)
      if (v && *v > 0.0) eps = std::min(eps, *v);
  if (!std::isfinite(eps))
    throw AnalysisError("no non-zero mention fraction in medium; epsilon undefined");
  return eps;
}

MentionSeries build_raw_series(const std::string& person_id, Medium medium,
                               const FractionSeries& fractions, double epsilon) {
  if (fractions.size() != static_cast<std::size_t>(kSeriesLength))
    throw AnalysisError("fraction series has wrong length");
  if (!(epsilon > 0.0)) throw AnalysisError("epsilon must be positive");

  MentionSeries s;
  s.person_id = person_id;
  s.medium = medium;
  s.kind = SeriesKind::Raw;
  s.epsilon = epsilon;

  std::vector<int> observed;
  for (int i = 0; i < kSeriesLength; ++i) {
    if (fractions[i]) {
      s.values[i] = std::log10(*fractions[i] + epsilon);
      observed.push_back(i);
    }
  }
  if (observed.empty())
    throw AnalysisError("series for '" + person_id + "' has no observed day");

  for (int i = 0; i < observed.front(); ++i) {
    s.values[i] = s.values[observed.front()];
    s.interpolated_days.insert(i + kSeriesFirst);
    s.edge_filled_days.insert(i + kSeriesFirst);
  }
  for (int i = observed.back() + 1; i < kSeriesLength; ++i) {
    s.values[i] = s.values[observed.back()];
    s.interpolated_days.insert(i + kSeriesFirst);
    s.edge_filled_days.insert(i + kSeriesFirst);
  }
  for (std::size_t k = 1; k < observed.size(); ++k) {
    const int lo = observed[k - 1], hi = observed[k];
    for (int i = lo + 1; i < hi; ++i) {
      const double f = static_cast<double>(i - lo) / (hi - lo);
      s.values[i] = (1.0 - f) * s.values[lo] + f * s.values[hi];
      s.interpolated_days.insert(i + kSeriesFirst);
    }
  }
  return s;
}

std::vector<double> running_line(std::span<const double> y, double span,
                                 std::vector<double>* cv_residuals) {
  const auto n = static_cast<std::ptrdiff_t>(y.size());
  std::vector<double> smo(y.size());
  if (cv_residuals) cv_residuals->assign(y.size(), 0.0);
  if (n == 0) return smo;

  const std::ptrdiff_t h =
      std::max<std::ptrdiff_t>(2, static_cast<std::ptrdiff_t>(0.5 * span * n + 0.5));
  const std::ptrdiff_t width = std::min(n, 2 * h + 1);

  // Window statistics with one-point add/remove updates.
  double cnt = 0, xm = 0, ym = 0, var = 0, cvar = 0;
  auto add = [&](std::ptrdiff_t j) {
    const double x = static_cast<double>(j);
    const double old = cnt;
    cnt += 1;
    xm = (old * xm + x) / cnt;
    ym = (old * ym + y[j]) / cnt;
    if (old > 0) {
      const double tmp = cnt * (x - xm) / old;
      var += tmp * (x - xm);
      cvar += tmp * (y[j] - ym);
    }
  };
  auto remove = [&](std::ptrdiff_t j) {
    const double x = static_cast<double>(j);
    const double old = cnt;
    cnt -= 1;
    const double tmp = old * (x - xm) / cnt;
    var -= tmp * (x - xm);
    cvar -= tmp * (y[j] - ym);
    xm = (old * xm - x) / cnt;
    ym = (old * ym - y[j]) / cnt;
  };

  std::ptrdiff_t lo = 0, hi = width - 1;
  for (std::ptrdiff_t j = lo; j <= hi; ++j) add(j);

  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const std::ptrdiff_t want_lo = std::clamp<std::ptrdiff_t>(j - h, 0, n - width);
    while (lo < want_lo) {
      ++hi;
      add(hi);
      remove(lo);
      ++lo;
    }
    const double xj = static_cast<double>(j);
    const double slope = var > 0 ? cvar / var : 0.0;
    smo[j] = ym + slope * (xj - xm);
    if (cv_residuals) {
      const double lev = 1.0 / cnt + (var > 0 ? (xj - xm) * (xj - xm) / var : 0.0);
      const double a = 1.0 - lev;
      (*cv_residuals)[j] = a > 0 ? std::abs(y[j] - smo[j]) / a
                                 : (j > 0 ? (*cv_residuals)[j - 1] : 0.0);
    }
  }
  return smo;
}

std::vector<double> supersmooth(std::span<const double> y, const SmootherConfig& cfg) {
  const double* spans = cfg.spans;
  std::vector<double> fits[3], resid[3];
  for (int k = 0; k < 3; ++k) {
    std::vector<double> cv;
    fits[k] = running_line(y, spans[k], &cv);
    resid[k] = running_line(cv, spans[1]);
  }

  const std::size_t n = y.size();
  std::vector<double> chosen(n);
  for (std::size_t j = 0; j < n; ++j) {
    int best = 0;
    for (int k = 1; k < 3; ++k)
      if (resid[k][j] < resid[best][j]) best = k;
    chosen[j] = spans[best];
  }
  std::vector<double> span_smooth = running_line(chosen, spans[1]);

  std::vector<double> blended(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double s = std::clamp(span_smooth[j], spans[0], spans[2]);
    double f = s - spans[1];
    if (f >= 0) {
      f /= (spans[2] - spans[1]);
      blended[j] = (1.0 - f) * fits[1][j] + f * fits[2][j];
    } else {
      f = -f / (spans[1] - spans[0]);
      blended[j] = (1.0 - f) * fits[1][j] + f * fits[0][j];
    }
  }
  return running_line(blended, spans[0]);
}

MentionSeries supersmooth(const MentionSeries& raw, const SmootherConfig& cfg) {
  MentionSeries out = raw;
  out.kind = SeriesKind::Smoothed;
  const auto split = static_cast<std::size_t>(-kSeriesFirst);  // index of t = 0
  const std::span<const double> all(raw.values);
  const std::span<const double> segments[2] = {all.first(split), all.subspan(split)};
  std::size_t offset = 0;
  for (const auto& seg : segments) {
    if (static_cast<int>(seg.size()) < cfg.min_segment) {
      out.smoothing_skipped = true;
    } else {
      const auto sm = supersmooth(seg, cfg);
      std::copy(sm.begin(), sm.end(), out.values.begin() + static_cast<std::ptrdiff_t>(offset));
    }
    offset += seg.size();
  }
  return out;
}

}  // namespace collmem
