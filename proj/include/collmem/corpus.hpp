#pragma once

#include <optional>
#include <string>
#include <vector>

#include "collmem/common.hpp"

namespace collmem {

struct Document {
  std::string doc_id;
  Day date;
  Medium medium = Medium::News;
  std::string title;
  std::string body;
  std::optional<std::string> domain;
};

enum class NameKind : std::uint8_t { FullName, Prefix, Suffix };

std::string_view to_string(NameKind k);
std::optional<NameKind> parse_name_kind(std::string_view s);

// One registered name of a person. `share` is the fraction of all uses of the
// surface that refer to this person.
struct AliasEntry {
  std::string surface;
  double share = 1.0;
  NameKind kind = NameKind::FullName;
};

struct Person {
  std::string id;
  std::vector<AliasEntry> names;
  std::optional<Day> death_date;
  std::optional<int> age_at_death;
  std::string gender;
  std::string manner_of_death;
  std::string notability_type;
  std::string language_group;
};

// Inclusive range of calendar days covered by the corpus.
struct CorpusWindow {
  Day first;
  Day last;

  bool contains(Day d) const { return first <= d && d <= last; }
};

}  // namespace collmem
