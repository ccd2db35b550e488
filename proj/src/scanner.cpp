#include "collmem/scanner.hpp"

#include <algorithm>
#include <limits>
#include <thread>

#include "collmem/tokenizer.hpp"

namespace collmem {

MentionRule rule_for(Medium m) {
  return m == Medium::Twitter ? MentionRule::AnyFullName : MentionRule::FullNamePlusSecond;
}

namespace {

struct PersonSpans {
  std::uint32_t min_end = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t max_begin = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> full;  // [begin, end)
};

}  // namespace

std::vector<PersonIndex> scan_document(const Document& doc, const AliasIndex& index,
                                       MentionRule rule) {
  std::vector<TokenAutomaton::Match> matches;
  TokenAutomaton::Cursor cursor(index.automaton());
  std::uint32_t pos = 0;
  auto feed = [&](std::string_view tok) { cursor.step(index.token_id(tok), pos++, matches); };
  Tokenizer::for_each_token(doc.title, feed);
  cursor.reset();
  Tokenizer::for_each_token(doc.body, feed);

  std::vector<PersonIndex> out;
  if (matches.empty()) return out;

  std::map<PersonIndex, PersonSpans> by_person;
  for (const auto& m : matches) {
    const AdmittedSurface& s = index.surface_of(m.pattern);
    PersonSpans& ps = by_person[s.person];
    ps.min_end = std::min(ps.min_end, m.end);
    ps.max_begin = std::max(ps.max_begin, m.begin);
    if (s.kind == NameKind::FullName) ps.full.emplace_back(m.begin, m.end);
  }

  for (const auto& [person, ps] : by_person) {
    if (ps.full.empty()) continue;
    if (rule == MentionRule::AnyFullName) {
      out.push_back(person);
      continue;
    }
    // Another match lies entirely before or entirely after some full name.
    const bool second = std::any_of(ps.full.begin(), ps.full.end(), [&](const auto& f) {
      return ps.min_end <= f.first || ps.max_begin >= f.second;
    });
    if (second) out.push_back(person);
  }
  return out;
}

std::vector<PersonIndex> scan_document(const Document& doc, const AliasIndex& index) {
  return scan_document(doc, index, rule_for(doc.medium));
}

std::vector<std::string> mentioned_ids(const Document& doc, const AliasIndex& index) {
  std::vector<std::string> ids;
  for (PersonIndex p : scan_document(doc, index)) ids.push_back(index.person_id(p));
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::int64_t DailyMentionCounts::total(Medium m, Day d) const {
  auto it = totals.find({m, d});
  return it == totals.end() ? 0 : it->second;
}

std::int64_t DailyMentionCounts::mention(const std::string& person, Medium m, Day d) const {
  auto it = mentions.find(MentionKey{person, m, d});
  return it == mentions.end() ? 0 : it->second;
}

void DailyMentionCounts::merge(const DailyMentionCounts& other) {
  for (const auto& [k, v] : other.totals) totals[k] += v;
  for (const auto& [k, v] : other.mentions) mentions[k] += v;
  for (const auto& [k, v] : other.quarantined) quarantined[k] += v;
}

void DailyMentionCounts::validate() const {
  for (const auto& [k, v] : totals)
    if (v < 0)
      throw AnalysisError("negative total_docs on " + format_day(k.second));
  for (const auto& [k, v] : mentions) {
    if (v < 0 || v > total(k.medium, k.day))
      throw AnalysisError("mention_docs outside [0, total_docs] for person '" + k.person_id +
                          "' (" + std::string(to_string(k.medium)) + ", " +
                          format_day(k.day) + ")");
  }
}

CountAccumulator::CountAccumulator(const AliasIndex& index, CorpusWindow window)
    : index_(&index), window_(window) {}

void CountAccumulator::add(const Document& doc) {
  if (!window_.contains(doc.date)) {
    ++quarantined_[doc.medium];
    return;
  }
  ++totals_[{doc.medium, doc.date}];
  for (PersonIndex p : scan_document(doc, *index_)) ++mentions_[{p, doc.medium, doc.date}];
}

DailyMentionCounts CountAccumulator::finish() const {
  DailyMentionCounts out;
  out.totals = totals_;
  out.quarantined = quarantined_;
  for (const auto& [k, v] : mentions_) {
    const auto& [p, m, d] = k;
    out.mentions[MentionKey{index_->person_id(p), m, d}] += v;
  }
  return out;
}

DailyMentionCounts aggregate_counts(std::span<const Document> docs, const AliasIndex& index,
                                    CorpusWindow window, unsigned threads) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(1, docs.size() / 1024)));

  std::vector<CountAccumulator> shards(threads, CountAccumulator(index, window));
  const std::size_t chunk = (docs.size() + threads - 1) / threads;
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      const std::size_t lo = std::min(docs.size(), w * chunk);
      const std::size_t hi = std::min(docs.size(), lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) shards[w].add(docs[i]);
    });
  }
  workers.clear();

  DailyMentionCounts total;
  for (const auto& s : shards) total.merge(s.finish());
  return total;
}

}  // namespace collmem
