#pragma once

#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "collmem/alias_index.hpp"
#include "collmem/corpus.hpp"
#include "collmem/scanner.hpp"

namespace collmem {

enum class ExclusionReason : std::uint8_t {
  NoUnambiguousName,  // no full name survived the ambiguity threshold
  ParenthesizedName,  // a registered name contains parentheses
  Boundary,           // death too close to a corpus boundary
  MissingDays,        // corpus gap right after death
  SparsePreMortem,    // too few pre-mortem mention days in some medium
};

std::string_view to_string(ExclusionReason r);

struct InclusionConfig {
  CorpusWindow window;
  int boundary_days = 360;   // minimum distance of death to either boundary
  int post_gap_days = 100;   // no missing corpus day in t = 0..post_gap_days
  int pre_window_days = 360; // pre-mortem window t = -pre_window_days..-1
  int min_pre_mention_days = 5;
  std::vector<Medium> media{Medium::News, Medium::Twitter};  // checked for sparse history
};

struct InclusionResult {
  std::vector<std::string> included;                  // registry order
  std::map<std::string, ExclusionReason> excluded;
};

// Applies the study inclusion rules. Persons without a death date make the
// registry invalid (InputError). When `index` is given, persons it could not
// index are excluded with NoUnambiguousName. Rules are checked in the order
// of ExclusionReason and the first failing rule is reported.
InclusionResult apply_inclusion_criteria(std::span<const Person> persons,
                                         const DailyMentionCounts& counts,
                                         const std::set<Day>& missing_days,
                                         const InclusionConfig& config,
                                         const AliasIndex* index = nullptr);

}  // namespace collmem
