#include "collmem/alias_index.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "collmem/tokenizer.hpp"

namespace collmem {

std::string_view to_string(NameKind k) {
  switch (k) {
    case NameKind::FullName: return "full";
    case NameKind::Prefix: return "prefix";
    case NameKind::Suffix: return "suffix";
  }
  return "full";
}

std::optional<NameKind> parse_name_kind(std::string_view s) {
  if (s == "full" || s == "FullName" || s == "full_name") return NameKind::FullName;
  if (s == "prefix" || s == "Prefix") return NameKind::Prefix;
  if (s == "suffix" || s == "Suffix") return NameKind::Suffix;
  return std::nullopt;
}

namespace {

bool is_token_prefix(const std::vector<std::string>& part, const std::vector<std::string>& whole) {
  return part.size() < whole.size() && std::equal(part.begin(), part.end(), whole.begin());
}

bool is_token_suffix(const std::vector<std::string>& part, const std::vector<std::string>& whole) {
  return part.size() < whole.size() &&
         std::equal(part.rbegin(), part.rend(), whole.rbegin());
}

struct Candidate {
  PersonIndex person;
  NameKind kind;
};

}  // namespace

AliasIndex AliasIndex::build(std::span<const Person> persons, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw InputError("ambiguity threshold must lie in (0, 1]");

  AliasIndex index;
  index.threshold_ = threshold;

  // surface -> claims, ordered for deterministic pattern ids
  std::map<std::string, std::vector<Candidate>> claims;
  std::set<std::string> seen_ids;

  for (const Person& person : persons) {
    if (!seen_ids.insert(person.id).second)
      throw InputError("duplicate person id '" + person.id + "'");
    const auto p = static_cast<PersonIndex>(index.person_ids_.size());
    index.person_ids_.push_back(person.id);

    std::vector<std::vector<std::string>> full_names;
    for (const AliasEntry& a : person.names)
      if (a.kind == NameKind::FullName) full_names.push_back(Tokenizer::tokenize(a.surface));

    for (const AliasEntry& a : person.names) {
      if (!(a.share >= 0.0 && a.share <= 1.0))
        throw InputError("person '" + person.id + "': share of '" + a.surface +
                         "' outside [0, 1]");
      if (a.share < threshold) continue;
      const auto tokens = Tokenizer::tokenize(a.surface);
      if (tokens.empty()) {
        index.rejected_.push_back({a.surface, {person.id}, "no tokens"});
        continue;
      }
      if (a.kind != NameKind::FullName) {
        const bool ok = std::any_of(full_names.begin(), full_names.end(), [&](const auto& f) {
          return a.kind == NameKind::Prefix ? is_token_prefix(tokens, f)
                                            : is_token_suffix(tokens, f);
        });
        if (!ok) {
          index.rejected_.push_back({Tokenizer::normalize(a.surface), {person.id},
                                     std::string("not a token ") +
                                         std::string(to_string(a.kind)) + " of a full name"});
          continue;
        }
      }
      claims[Tokenizer::normalize(a.surface)].push_back({p, a.kind});
    }
  }

  // Resolve claims: one person per surface; a person naming the same surface
  // twice keeps the strongest kind (full name first).
  std::map<std::string, Candidate> resolved;
  for (auto& [surface, list] : claims) {
    std::set<PersonIndex> owners;
    for (const auto& c : list) owners.insert(c.person);
    if (owners.size() > 1) {
      RejectedSurface r{surface, {}, "claimed by several persons above threshold"};
      for (PersonIndex o : owners) r.person_ids.push_back(index.person_ids_[o]);
      index.rejected_.push_back(std::move(r));
      continue;
    }
    Candidate best = list.front();
    for (const auto& c : list)
      if (c.kind == NameKind::FullName) best = c;
    resolved.emplace(surface, best);
  }

  std::vector<bool> has_full(index.person_ids_.size(), false);
  for (const auto& [surface, c] : resolved)
    if (c.kind == NameKind::FullName) has_full[c.person] = true;
  for (PersonIndex p = 0; p < has_full.size(); ++p)
    if (!has_full[p]) index.excluded_.push_back(index.person_ids_[p]);

  std::vector<TokenAutomaton::TokenId> ids;
  for (const auto& [surface, c] : resolved) {
    if (!has_full[c.person]) continue;
    ids.clear();
    Tokenizer::for_each_token(surface, [&](std::string_view tok) {
      auto [it, inserted] = index.vocab_.try_emplace(
          std::string(tok), static_cast<TokenAutomaton::TokenId>(index.vocab_.size()));
      ids.push_back(it->second);
    });
    index.automaton_.add(ids);
    index.admitted_.push_back({surface, c.person, c.kind});
  }
  index.automaton_.compile();
  return index;
}

TokenAutomaton::TokenId AliasIndex::token_id(std::string_view token) const {
  auto it = vocab_.find(token);
  return it == vocab_.end() ? TokenAutomaton::kUnknownToken : it->second;
}

}  // namespace collmem
