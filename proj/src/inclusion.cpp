#include "collmem/inclusion.hpp"

#include <algorithm>

namespace collmem {

std::string_view to_string(ExclusionReason r) {
  switch (r) {
    case ExclusionReason::NoUnambiguousName: return "no_unambiguous_name";
    case ExclusionReason::ParenthesizedName: return "parenthesized_name";
    case ExclusionReason::Boundary: return "boundary";
    case ExclusionReason::MissingDays: return "missing_days";
    case ExclusionReason::SparsePreMortem: return "sparse_pre_mortem";
  }
  return "unknown";
}

namespace {

int pre_mortem_mention_days(const DailyMentionCounts& counts, const std::string& id, Medium m,
                            Day death, int window) {
  const auto lo = counts.mentions.lower_bound(MentionKey{id, m, death - window});
  const auto hi = counts.mentions.lower_bound(MentionKey{id, m, death});
  int days = 0;
  for (auto it = lo; it != hi; ++it)
    if (it->second > 0) ++days;
  return days;
}

}  // namespace

InclusionResult apply_inclusion_criteria(std::span<const Person> persons,
                                         const DailyMentionCounts& counts,
                                         const std::set<Day>& missing_days,
                                         const InclusionConfig& config,
                                         const AliasIndex* index) {
  InclusionResult result;
  for (const Person& p : persons) {
    if (!p.death_date)
      throw InputError("person '" + p.id + "' has no death date; registry invalid");
  }

  for (const Person& p : persons) {
    const Day death = *p.death_date;
    auto exclude = [&](ExclusionReason r) { result.excluded.emplace(p.id, r); };

    if (index && std::find(index->excluded().begin(), index->excluded().end(), p.id) !=
                     index->excluded().end()) {
      exclude(ExclusionReason::NoUnambiguousName);
      continue;
    }
    if (std::any_of(p.names.begin(), p.names.end(), [](const AliasEntry& a) {
          return a.surface.find_first_of("()") != std::string::npos;
        })) {
      exclude(ExclusionReason::ParenthesizedName);
      continue;
    }
    if (death - config.window.first < config.boundary_days ||
        config.window.last - death < config.boundary_days) {
      exclude(ExclusionReason::Boundary);
      continue;
    }
    const auto gap = missing_days.lower_bound(death);
    if (gap != missing_days.end() && *gap - death <= config.post_gap_days) {
      exclude(ExclusionReason::MissingDays);
      continue;
    }
    const bool sparse = std::any_of(config.media.begin(), config.media.end(), [&](Medium m) {
      return pre_mortem_mention_days(counts, p.id, m, death, config.pre_window_days) <
             config.min_pre_mention_days;
    });
    if (sparse) {
      exclude(ExclusionReason::SparsePreMortem);
      continue;
    }
    result.included.push_back(p.id);
  }
  return result;
}

}  // namespace collmem
