#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "collmem/alias_index.hpp"
#include "collmem/corpus.hpp"

namespace collmem {

enum class MentionRule : std::uint8_t {
  // At least one full-name match.
  AnyFullName,
  // A full-name match plus a further, non-overlapping match of any kind.
  FullNamePlusSecond,
};

MentionRule rule_for(Medium m);

// Persons mentioned by `doc` under the rule of its medium; sorted, unique.
// Title and body are searched jointly; no match spans the title/body border.
std::vector<PersonIndex> scan_document(const Document& doc, const AliasIndex& index);
std::vector<PersonIndex> scan_document(const Document& doc, const AliasIndex& index,
                                       MentionRule rule);

std::vector<std::string> mentioned_ids(const Document& doc, const AliasIndex& index);

struct MentionKey {
  std::string person_id;
  Medium medium;
  Day day;
  friend auto operator<=>(const MentionKey&, const MentionKey&) = default;
};

// Document-level daily counts: each document contributes at most one to the
// mention count of each person.
struct DailyMentionCounts {
  std::map<std::pair<Medium, Day>, std::int64_t> totals;
  std::map<MentionKey, std::int64_t> mentions;
  // Documents dated outside the corpus window, per medium.
  std::map<Medium, std::int64_t> quarantined;

  std::int64_t total(Medium m, Day d) const;
  std::int64_t mention(const std::string& person, Medium m, Day d) const;

  void merge(const DailyMentionCounts& other);
  // Throws AnalysisError naming the first (person, medium, day) with
  // mention_docs > total_docs or a negative count.
  void validate() const;

  friend bool operator==(const DailyMentionCounts&, const DailyMentionCounts&) = default;
};

// Accumulates counts for a shard of the stream; shards combine with merge().
class CountAccumulator {
 public:
  CountAccumulator(const AliasIndex& index, CorpusWindow window);

  void add(const Document& doc);
  DailyMentionCounts finish() const;

 private:
  const AliasIndex* index_;
  CorpusWindow window_;
  std::map<std::pair<Medium, Day>, std::int64_t> totals_;
  std::map<std::tuple<PersonIndex, Medium, Day>, std::int64_t> mentions_;
  std::map<Medium, std::int64_t> quarantined_;
};

// Scans `docs` on `threads` workers (0 = hardware concurrency) and reduces
// the shard counts in shard order. Output is independent of input order and
// of the thread count.
DailyMentionCounts aggregate_counts(std::span<const Document> docs, const AliasIndex& index,
                                    CorpusWindow window, unsigned threads = 0);

}  // namespace collmem
