#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "collmem/alias_index.hpp"
#include "collmem/corpus.hpp"
#include "collmem/series.hpp"
#include "collmem/tokenizer.hpp"

namespace testutil {

using namespace collmem;

inline Person person(std::string id, std::vector<AliasEntry> names, Day death = Day{16000}) {
  Person p;
  p.id = std::move(id);
  p.names = std::move(names);
  p.death_date = death;
  p.age_at_death = 70;
  p.gender = "male";
  p.manner_of_death = "natural";
  p.notability_type = "arts";
  p.language_group = "anglophone";
  return p;
}

inline Document doc(Medium m, std::string body, std::string title = "", Day d = Day{16000},
                    std::string id = "d") {
  Document x;
  x.doc_id = std::move(id);
  x.date = d;
  x.medium = m;
  x.title = std::move(title);
  x.body = std::move(body);
  return x;
}

// Brute-force mention rule: every admitted surface searched by linear scan
// over the token sequence, title and body kept apart.
inline std::set<std::string> naive_mentions(const Document& d, const std::vector<Person>& persons,
                                            double threshold, bool news_rule) {
  struct Hit {
    std::size_t begin, end;
    bool full;
  };
  std::vector<std::string> title = Tokenizer::tokenize(d.title);
  std::vector<std::string> body = Tokenizer::tokenize(d.body);
  // surfaces claimed by more than one person above threshold are void
  std::map<std::string, std::set<std::string>> owners;
  for (const auto& p : persons)
    for (const auto& a : p.names)
      if (a.share >= threshold) owners[Tokenizer::normalize(a.surface)].insert(p.id);

  std::set<std::string> out;
  for (const auto& p : persons) {
    std::vector<Hit> hits;
    auto search = [&](const std::vector<std::string>& toks, std::size_t offset) {
      for (const auto& a : p.names) {
        if (a.share < threshold) continue;
        const std::string key = Tokenizer::normalize(a.surface);
        if (owners[key].size() != 1) continue;
        std::vector<std::string> pat = Tokenizer::tokenize(a.surface);
        if (pat.empty() || pat.size() > toks.size()) continue;
        for (std::size_t i = 0; i + pat.size() <= toks.size(); ++i)
          if (std::equal(pat.begin(), pat.end(), toks.begin() + i))
            hits.push_back({offset + i, offset + i + pat.size(), a.kind == NameKind::FullName});
      }
    };
    search(title, 0);
    search(body, title.size());
    bool found = false;
    for (const auto& f : hits) {
      if (!f.full) continue;
      if (!news_rule) {
        found = true;
        break;
      }
      for (const auto& g : hits)
        if (g.end <= f.begin || g.begin >= f.end) found = true;
    }
    if (found) out.insert(p.id);
  }
  return out;
}

inline MentionSeries constant_series(double v, Medium m = Medium::News, std::string id = "p") {
  MentionSeries s;
  s.person_id = std::move(id);
  s.medium = m;
  s.values.assign(kSeriesLength, v);
  return s;
}

}  // namespace testutil
