#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace collmem {

// Aho-Corasick automaton whose alphabet is token ids rather than bytes, so
// every match is a whole-token sequence. Patterns are added, then compile()
// builds failure and output links; the compiled automaton is immutable and
// safe to share between threads.
class TokenAutomaton {
 public:
  using TokenId = std::uint32_t;
  using PatternId = std::uint32_t;
  static constexpr TokenId kUnknownToken = 0xFFFFFFFF;

  struct Match {
    PatternId pattern;
    std::uint32_t begin;  // first token position
    std::uint32_t end;    // one past the last token position
  };

  // Returns the id of the new pattern. Empty patterns are rejected.
  PatternId add(std::span<const TokenId> tokens);
  void compile();

  std::size_t pattern_count() const { return pattern_length_.size(); }
  std::size_t node_count() const { return nodes_.size(); }

  // Cursor used to feed tokens one at a time.
  class Cursor {
   public:
    explicit Cursor(const TokenAutomaton& a) : a_(&a) {}
    // Advances on `token` at position `pos` and appends every pattern
    // ending at this position to `out`.
    void step(TokenId token, std::uint32_t pos, std::vector<Match>& out);
    void reset() { state_ = 0; }

   private:
    const TokenAutomaton* a_;
    std::uint32_t state_ = 0;
  };

  std::vector<Match> find_all(std::span<const TokenId> tokens) const;

 private:
  struct Node {
    std::uint32_t fail = 0;
    std::uint32_t output_link = 0;  // nearest proper suffix node with output, 0 = none
    std::int64_t pattern = -1;      // pattern ending exactly here
  };

  static std::uint64_t edge_key(std::uint32_t node, TokenId t) {
    return (static_cast<std::uint64_t>(node) << 32) | t;
  }
  std::int64_t child(std::uint32_t node, TokenId t) const;

  std::vector<Node> nodes_{Node{}};
  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::vector<std::vector<std::pair<TokenId, std::uint32_t>>> children_{{}};
  std::vector<std::uint32_t> pattern_length_;
  bool compiled_ = false;
};

}  // namespace collmem
