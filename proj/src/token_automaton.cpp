#include "collmem/token_automaton.hpp"

#include <queue>
#include <stdexcept>

namespace collmem {

TokenAutomaton::PatternId TokenAutomaton::add(std::span<const TokenId> tokens) {
  if (compiled_) throw std::logic_error("TokenAutomaton::add after compile");
  if (tokens.empty()) throw std::invalid_argument("empty pattern");
  std::uint32_t node = 0;
  for (TokenId t : tokens) {
    auto it = edges_.find(edge_key(node, t));
    if (it != edges_.end()) {
      node = it->second;
      continue;
    }
    const auto next = static_cast<std::uint32_t>(nodes_.size());
    nodes_.emplace_back();
    children_.emplace_back();
    edges_.emplace(edge_key(node, t), next);
    children_[node].emplace_back(t, next);
    node = next;
  }
  const auto id = static_cast<PatternId>(pattern_length_.size());
  pattern_length_.push_back(static_cast<std::uint32_t>(tokens.size()));
  // A duplicate pattern shadows the earlier one; callers deduplicate.
  nodes_[node].pattern = id;
  return id;
}

std::int64_t TokenAutomaton::child(std::uint32_t node, TokenId t) const {
  auto it = edges_.find(edge_key(node, t));
  return it == edges_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

void TokenAutomaton::compile() {
  std::queue<std::uint32_t> queue;
  for (auto [t, c] : children_[0]) {
    nodes_[c].fail = 0;
    queue.push(c);
  }
  while (!queue.empty()) {
    const std::uint32_t u = queue.front();
    queue.pop();
    for (auto [t, v] : children_[u]) {
      std::uint32_t f = nodes_[u].fail;
      std::int64_t target = -1;
      while (true) {
        target = child(f, t);
        if (target >= 0 || f == 0) break;
        f = nodes_[f].fail;
      }
      nodes_[v].fail = (target >= 0 && static_cast<std::uint32_t>(target) != v)
                           ? static_cast<std::uint32_t>(target)
                           : 0;
      const std::uint32_t fv = nodes_[v].fail;
      nodes_[v].output_link = nodes_[fv].pattern >= 0 ? fv : nodes_[fv].output_link;
      queue.push(v);
    }
  }
  compiled_ = true;
}

void TokenAutomaton::Cursor::step(TokenId token, std::uint32_t pos, std::vector<Match>& out) {
  const TokenAutomaton& a = *a_;
  if (token == kUnknownToken) {
    state_ = 0;
    return;
  }
  std::uint32_t s = state_;
  while (true) {
    const std::int64_t c = a.child(s, token);
    if (c >= 0) {
      s = static_cast<std::uint32_t>(c);
      break;
    }
    if (s == 0) break;
    s = a.nodes_[s].fail;
  }
  state_ = s;
  for (std::uint32_t n = s; n != 0;) {
    const Node& node = a.nodes_[n];
    if (node.pattern >= 0) {
      const auto pid = static_cast<PatternId>(node.pattern);
      out.push_back({pid, pos + 1 - a.pattern_length_[pid], pos + 1});
    }
    n = node.output_link;
  }
}

std::vector<TokenAutomaton::Match> TokenAutomaton::find_all(std::span<const TokenId> tokens) const {
  if (!compiled_) throw std::logic_error("TokenAutomaton used before compile");
  std::vector<Match> out;
  Cursor cur(*this);
  for (std::size_t i = 0; i < tokens.size(); ++i)
    cur.step(tokens[i], static_cast<std::uint32_t>(i), out);
  return out;
}

}  // namespace collmem
