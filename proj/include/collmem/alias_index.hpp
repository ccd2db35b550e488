#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "collmem/corpus.hpp"
#include "collmem/token_automaton.hpp"

namespace collmem {

using PersonIndex = std::uint32_t;

struct RejectedSurface {
  std::string surface;                  // normalized form
  std::vector<std::string> person_ids;  // claimants
  std::string reason;
};

struct AdmittedSurface {
  std::string surface;
  PersonIndex person;
  NameKind kind;
};

// Immutable multi-pattern index over the admitted name surfaces of a person
// registry. Only surfaces whose ambiguity share reaches the threshold are
// admitted; a surface claimed by two different persons after thresholding is
// rejected outright and listed in rejected().
class AliasIndex {
 public:
  static constexpr double kDefaultThreshold = 0.9;

  static AliasIndex build(std::span<const Person> persons,
                          double threshold = kDefaultThreshold);

  double threshold() const { return threshold_; }
  std::size_t person_count() const { return person_ids_.size(); }
  const std::string& person_id(PersonIndex p) const { return person_ids_[p]; }
  const std::vector<std::string>& person_ids() const { return person_ids_; }

  // Persons without any admitted full name; they can never be detected.
  const std::vector<std::string>& excluded() const { return excluded_; }
  const std::vector<RejectedSurface>& rejected() const { return rejected_; }
  const std::vector<AdmittedSurface>& admitted() const { return admitted_; }

  // Token id for matching, or TokenAutomaton::kUnknownToken.
  TokenAutomaton::TokenId token_id(std::string_view token) const;
  const TokenAutomaton& automaton() const { return automaton_; }
  const AdmittedSurface& surface_of(TokenAutomaton::PatternId p) const { return admitted_[p]; }

 private:
  double threshold_ = kDefaultThreshold;
  std::vector<std::string> person_ids_;
  std::vector<std::string> excluded_;
  std::vector<RejectedSurface> rejected_;
  std::vector<AdmittedSurface> admitted_;  // indexed by pattern id
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::unordered_map<std::string, TokenAutomaton::TokenId, StringHash, std::equal_to<>> vocab_;
  TokenAutomaton automaton_;
};

}  // namespace collmem
