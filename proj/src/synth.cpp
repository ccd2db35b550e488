#include "collmem/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

namespace collmem {

std::vector<int> apportion(const std::vector<double>& shares, int n) {
  if (shares.empty()) throw InputError("apportion: no shares");
  double total = 0;
  for (double s : shares) {
    if (!(s >= 0)) throw InputError("apportion: negative share");
    total += s;
  }
  if (std::abs(total - 1.0) > 1e-9) throw InputError("apportion: shares must sum to 1");
  std::vector<int> out(shares.size());
  std::vector<std::pair<double, std::size_t>> rem;
  int used = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double exact = shares[i] * n;
    out[i] = static_cast<int>(std::floor(exact));
    used += out[i];
    rem.emplace_back(exact - out[i], i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; used < n; ++i, ++used) ++out[rem[i % rem.size()].second];
  return out;
}

MentionSeries generate_series(const ShiftedPowerLawParams& p, double sigma, std::uint64_t seed,
                              std::string person_id, Medium medium) {
  if (!(p.a > 0 && p.b > 0 && p.c > 0)) throw InputError("generate_series: parameters must be positive");
  if (!(sigma >= 0)) throw InputError("generate_series: sigma must be non-negative");
  Rng rng(seed);
  MentionSeries s;
  s.person_id = std::move(person_id);
  s.medium = medium;
  s.kind = SeriesKind::Raw;
  for (int t = kSeriesFirst; t <= kSeriesLast; ++t) {
    const double clean = t < 0 ? std::log10(p.c) : std::log10(p.a * std::pow(std::max(t, 1), -p.b) + p.c);
    s.at(t) = sigma > 0 ? clean + sigma * rng.normal() : clean;
  }
  return s;
}

std::vector<Archetype> default_archetypes() {
  // Twitter fractions sit roughly two orders of magnitude lower than news.
  return {
      {"blip", 0.62, 0.59, {-6.0, 2.0, 0.05, 40}, {-8.0, 2.2, 0.05, 35}},
      {"silence", 0.28, 0.26, {-6.0, 0.6, 0.0, 150}, {-8.0, 0.7, 0.0, 150}},
      {"rise", 0.07, 0.11, {-5.0, 2.6, 0.8, 170}, {-7.0, 2.8, 0.9, 170}},
      {"decline", 0.03, 0.04, {-3.8, 1.2, -0.3, 110}, {-5.8, 1.4, -0.15, 110}},
  };
}

namespace {

int categorical(Rng& rng, const std::vector<double>& cumulative) {
  const double u = rng.uniform() * cumulative.back();
  for (std::size_t i = 0; i < cumulative.size(); ++i)
    if (u < cumulative[i]) return static_cast<int>(i);
  return static_cast<int>(cumulative.size()) - 1;
}

CurveFeatures draw_features(const std::string& id, Medium m, const std::array<double, 4>& centre,
                            double sigma, Rng& rng) {
  CurveFeatures f;
  f.person_id = id;
  f.medium = m;
  f.pre_mortem_mean = centre[0] + sigma * kFeatureUnits[0] * rng.normal();
  f.short_term_boost = centre[1] + sigma * kFeatureUnits[1] * rng.normal();
  f.long_term_boost = centre[2] + sigma * kFeatureUnits[2] * rng.normal();
  const double h = centre[3] + sigma * kFeatureUnits[3] * rng.normal();
  f.halving_time = static_cast<int>(std::clamp(std::lround(h), 0L, 360L));
  return f;
}

std::string numbered(char prefix, std::size_t i, int width) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%c%0*zu", prefix, width, i);
  return buf;
}

}  // namespace

Population generate_population(const PopulationSpec& spec) {
  if (spec.archetypes.size() < 2) throw InputError("population needs at least two archetypes");
  if (spec.n < 1) throw InputError("population size must be positive");
  if (!(spec.blob_sigma >= 0)) throw InputError("blob sigma must be non-negative");
  if (!(spec.mismatch >= 0 && spec.mismatch <= 1)) throw InputError("mismatch must lie in [0, 1]");
  std::vector<double> news_shares, tw_cum;
  double acc = 0;
  for (const auto& a : spec.archetypes) {
    news_shares.push_back(a.news_share);
    tw_cum.push_back(acc += a.twitter_share);
  }
  if (std::abs(acc - 1.0) > 1e-9) throw InputError("twitter shares must sum to 1");
  const auto sizes = apportion(news_shares, spec.n);

  Rng rng(derive_seed(spec.seed, 0));
  Population pop;
  for (std::size_t k = 0; k < sizes.size(); ++k)
    pop.news_labels.insert(pop.news_labels.end(), static_cast<std::size_t>(sizes[k]), static_cast<int>(k));
  for (std::size_t i = pop.news_labels.size(); i > 1; --i)
    std::swap(pop.news_labels[i - 1], pop.news_labels[rng.below(i)]);
  for (int label : pop.news_labels)
    pop.twitter_labels.push_back(rng.uniform() < spec.mismatch ? categorical(rng, tw_cum) : label);

  for (std::size_t i = 0; i < pop.news_labels.size(); ++i) {
    Rng prng(derive_seed(spec.seed, 1 + i));
    pop.ids.push_back(numbered('S', i + 1, 5));
    pop.news.push_back(draw_features(pop.ids.back(), Medium::News,
                                     spec.archetypes[pop.news_labels[i]].news_centroid,
                                     spec.blob_sigma, prng));
    pop.twitter.push_back(draw_features(pop.ids.back(), Medium::Twitter,
                                        spec.archetypes[pop.twitter_labels[i]].twitter_centroid,
                                        spec.blob_sigma, prng));
  }
  return pop;
}

namespace {

constexpr const char* kSyllables[] = {"ba", "ko", "mi", "ra", "tu", "ve", "lo", "sa", "ni", "de",
                                      "fa", "zu", "pe", "ri", "go", "ha", "jo", "ky", "wen", "dor",
                                      "mar", "tis", "quo", "lan"};
constexpr const char* kFiller[] = {
    "the",     "a",       "of",     "and",    "in",      "to",      "on",      "with",
    "report",  "city",    "market", "season", "council", "weather", "today",   "said",
    "after",   "before",  "new",    "old",    "team",    "league",  "film",    "music",
    "book",    "study",   "people", "year",   "week",    "last",    "first",   "more",
    "than",    "about",   "was",    "were",   "has",     "have",    "will",    "could",
    "reports", "writes",  "notes",  "local",  "global",  "quiet",   "busy",    "morning",
    "evening", "river",   "bridge", "school", "museum",  "award",   "concert", "match"};

std::string capitalized(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

// Unique three-syllable tokens that never coincide with filler words.
class NameMaker {
 public:
  explicit NameMaker(std::uint64_t seed) : rng_(seed) {
    for (const char* f : kFiller) used_.insert(f);
  }
  std::string token() {
    while (true) {
      std::string t;
      for (int i = 0; i < 3; ++i) t += kSyllables[rng_.below(std::size(kSyllables))];
      if (used_.insert(t).second) return capitalized(t);
    }
  }

 private:
  Rng rng_;
  std::set<std::string> used_;
};

void random_factors(Person& p, Rng& rng) {
  p.age_at_death = 20 + static_cast<int>(rng.below(80));
  p.gender = rng.uniform() < 0.75 ? "male" : "female";
  p.manner_of_death = rng.uniform() < 0.8 ? "natural" : "unnatural";
  constexpr const char* kNotability[] = {"arts", "sports", "leadership", "known for death",
                                         "general fame", "academia/engineering"};
  constexpr const char* kLanguage[] = {"anglophone", "non-anglophone", "unknown"};
  p.notability_type = kNotability[rng.below(std::size(kNotability))];
  p.language_group = kLanguage[rng.below(std::size(kLanguage))];
}

std::vector<Person> make_persons(int n, std::uint64_t seed, Day death_from, Day death_to) {
  NameMaker names(derive_seed(seed, 0xA11A5));
  Rng rng(derive_seed(seed, 0xFAC7));
  std::vector<Person> out;
  for (int i = 0; i < n; ++i) {
    Person p;
    p.id = numbered('P', static_cast<std::size_t>(i + 1), 4);
    const std::string first = names.token(), last = names.token();
    p.names.push_back({first + " " + last, 1.0, NameKind::FullName});
    p.names.push_back({last, 0.95, NameKind::Suffix});
    p.death_date = death_from + static_cast<std::int32_t>(
                                    rng.below(static_cast<std::uint64_t>(death_to - death_from + 1)));
    random_factors(p, rng);
    out.push_back(std::move(p));
  }
  return out;
}

void append_filler(std::string& out, Rng& rng, int words) {
  for (int i = 0; i < words; ++i) {
    if (!out.empty()) out += rng.below(8) == 0 ? ", " : " ";
    out += kFiller[rng.below(std::size(kFiller))];
  }
}

}  // namespace

SynthCorpus generate_corpus(const CorpusSpec& spec) {
  if (spec.n_persons < 0 || spec.zero_mention_persons < 0 || spec.days < 1)
    throw InputError("corpus spec: counts must be non-negative and days positive");
  if (spec.news_docs_per_day < 0 || spec.twitter_docs_per_day < 0)
    throw InputError("corpus spec: documents per day must be non-negative");
  if (!(spec.base_min > 0 && spec.base_min <= spec.base_max))
    throw InputError("corpus spec: need 0 < base_min <= base_max");
  if (!(spec.boost >= 0 && spec.decay >= 0)) throw InputError("corpus spec: boost and decay must be non-negative");
  if (spec.base_max * (1 + spec.boost) > 1)
    throw InputError("corpus spec: target mention fraction exceeds 1");
  if (!(spec.news_single_mention_rate >= 0 && spec.news_single_mention_rate <= 1))
    throw InputError("corpus spec: single-mention rate must lie in [0, 1]");

  SynthCorpus out;
  out.window = {spec.first, spec.first + (spec.days - 1)};
  const int third = spec.days / 3;
  out.persons = make_persons(spec.n_persons + spec.zero_mention_persons, spec.seed,
                             spec.first + third, spec.first + std::max(third, spec.days - 1 - third));

  std::vector<double> base(out.persons.size(), 0.0);
  {
    Rng rng(derive_seed(spec.seed, 0xBA5E));
    const double lo = std::log(spec.base_min), hi = std::log(spec.base_max);
    for (int i = 0; i < spec.n_persons; ++i) base[i] = std::exp(lo + (hi - lo) * rng.uniform());
  }
  std::vector<std::string> full, surname;
  for (const auto& p : out.persons) {
    full.push_back(p.names[0].surface);
    surname.push_back(p.names[1].surface);
  }

  struct Plant {
    std::size_t person;
    bool single;
  };
  std::vector<std::vector<Plant>> plants;
  for (int d = 0; d < spec.days; ++d) {
    const Day day = spec.first + d;
    for (Medium m : kMedia) {
      const int ndocs = m == Medium::News ? spec.news_docs_per_day : spec.twitter_docs_per_day;
      out.truth.totals[{m, day}] = ndocs;
      Rng rng(derive_seed(spec.seed, 2 * static_cast<std::uint64_t>(d) + static_cast<std::uint64_t>(m) + 1));
      plants.assign(static_cast<std::size_t>(ndocs), {});
      for (int pi = 0; pi < spec.n_persons; ++pi) {
        const int t = day - *out.persons[pi].death_date;
        const double f = t < 0 ? base[pi] : base[pi] * (1 + spec.boost * std::pow(t + 1.0, -spec.decay));
        std::int64_t counted = 0;
        for (int k = 0; k < ndocs; ++k) {
          if (!(rng.uniform() < f)) continue;
          const bool single = m == Medium::News && rng.uniform() < spec.news_single_mention_rate;
          plants[k].push_back({static_cast<std::size_t>(pi), single});
          counted += !single;
        }
        if (counted > 0) out.truth.mentions[{out.persons[pi].id, m, day}] = counted;
      }
      for (int k = 0; k < ndocs; ++k) {
        Document doc;
        char id[48];
        std::snprintf(id, sizeof id, "%s-%s-%05d", m == Medium::News ? "n" : "t",
                      format_day(day).c_str(), k);
        doc.doc_id = id;
        doc.date = day;
        doc.medium = m;
        std::string body;
        append_filler(body, rng, 3 + static_cast<int>(rng.below(8)));
        for (const auto& pl : plants[k]) {
          body += " " + full[pl.person] + " ";
          append_filler(body, rng, 2 + static_cast<int>(rng.below(5)));
          if (m == Medium::News && !pl.single) {
            body += " " + surname[pl.person] + " ";
            append_filler(body, rng, 1 + static_cast<int>(rng.below(4)));
          }
        }
        body += ".";
        if (m == Medium::News) {
          append_filler(doc.title, rng, 3 + static_cast<int>(rng.below(4)));
          doc.domain = "news" + std::to_string(1 + rng.below(20)) + ".example";
        }
        doc.body = std::move(body);
        out.documents.push_back(std::move(doc));
      }
    }
  }
  return out;
}

SynthCounts generate_counts(const CountsSpec& spec) {
  if (spec.n_persons < 1) throw InputError("counts spec: need at least one person");
  if (spec.docs_per_day < 1) throw InputError("counts spec: docs per day must be positive");
  if (!(spec.person_sigma >= 0 && spec.day_sigma >= 0)) throw InputError("counts spec: sigmas must be non-negative");
  if (spec.days < -kSeriesFirst + kSeriesLast + 1) throw InputError("counts spec: window too short for the series domain");
  for (const auto* p : {&spec.news, &spec.twitter})
    if (!(p->a > 0 && p->b > 0 && p->c > 0)) throw InputError("counts spec: parameters must be positive");

  SynthCounts out;
  out.window = {spec.first, spec.first + (spec.days - 1)};
  out.persons = make_persons(spec.n_persons, spec.seed, spec.first - kSeriesFirst,
                             out.window.last - kSeriesLast);
  for (int d = 0; d < spec.days; ++d)
    for (Medium m : kMedia) out.counts.totals[{m, spec.first + d}] = spec.docs_per_day;

  for (Medium m : kMedia) {
    const auto& p = m == Medium::News ? spec.news : spec.twitter;
    Rng orng(derive_seed(spec.seed, 0x0FF5E7 + static_cast<std::uint64_t>(m)));
    std::vector<double> offset(static_cast<std::size_t>(spec.n_persons));
    for (double& o : offset) o = spec.person_sigma * orng.normal();
    const double mean = std::accumulate(offset.begin(), offset.end(), 0.0) / spec.n_persons;
    for (double& o : offset) o -= mean;

    for (int i = 0; i < spec.n_persons; ++i) {
      const auto& person = out.persons[i];
      Rng rng(derive_seed(spec.seed, 0x5E1E5 + 2 * static_cast<std::uint64_t>(i) + static_cast<std::uint64_t>(m)));
      for (int t = kSeriesFirst; t <= kSeriesLast; ++t) {
        const double clean = t < 0 ? std::log10(p.c) : std::log10(p.a * std::pow(std::max(t, 1), -p.b) + p.c);
        const double noise = spec.day_sigma > 0 ? spec.day_sigma * rng.normal() : 0.0;
        std::int64_t k = t == spec.quiet_day
                             ? 1
                             : std::llround(static_cast<double>(spec.docs_per_day) * std::pow(10.0, clean + offset[i] + noise));
        k = std::clamp<std::int64_t>(k, 0, spec.docs_per_day);
        if (k > 0) out.counts.mentions[{person.id, m, *person.death_date + t}] = k;
      }
    }
  }
  return out;
}

}  // namespace collmem
