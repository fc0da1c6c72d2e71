#include "mps/type_semantics.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>
#include <map>

namespace mps {

std::string to_string(const ExtNat& n) {
  return n.is_finite() ? std::to_string(n.value()) : "inf";
}

namespace {

// Nodes whose capability set contains `label`: those that can reach an edge
// carrying it. Computed once per transition by a reverse closure from the
// edges' source nodes.
std::set<const GlobalNode*> nodes_with_capability(const GlobalNode* root, const CommLabel& label) {
  auto nodes = reachable_nodes(root);
  std::map<const GlobalNode*, std::vector<const GlobalNode*>> preds;
  std::deque<const GlobalNode*> todo;
  std::set<const GlobalNode*> has;
  for (const GlobalNode* n : nodes) {
    for (const auto& b : n->branches) {
      preds[b.target].push_back(n);
      if (b.label == label && !has.count(n)) {
        has.insert(n);
        todo.push_back(n);
      }
    }
  }
  while (!todo.empty()) {
    const GlobalNode* n = todo.front();
    todo.pop_front();
    for (const GlobalNode* p : preds[n])
      if (has.insert(p).second) todo.push_back(p);
  }
  return has;
}

}  // namespace

std::optional<Global> gt_step(const TypeConfiguration& c, const CommLabel& label) {
  if (!apply_label(label, c.queue)) return std::nullopt;
  const GlobalNode* root = c.global.node;
  auto capable = nodes_with_capability(root, label);

  auto arena = std::make_shared<TermArena>();
  arena->retain(c.global.arena);
  std::map<const GlobalNode*, GlobalNode*> memo;  // source -> placeholder result

  std::function<const GlobalNode*(const GlobalNode*)> rewrite =
      [&](const GlobalNode* n) -> const GlobalNode* {
    if (n->is_end()) return nullptr;
    if (auto it = memo.find(n); it != memo.end()) return it->second;

    for (const auto& b : n->branches) {
      if (b.label == label) {
        // Exact match consumes the branch and drops the siblings. The push
        // rule cannot also apply here: this branch's player equals the
        // label's player.
        assert(b.label.player == label.player);
        return b.target;
      }
    }
    for (const auto& b : n->branches) {
      if (b.label.player == label.player) return nullptr;
      if (!capable.count(b.target)) return nullptr;
    }
    GlobalNode* placeholder = arena->make_global();
    memo[n] = placeholder;
    std::vector<GlobalBranch> branches;
    for (const auto& b : n->branches) {
      const GlobalNode* child = rewrite(b.target);
      if (!child) return nullptr;
      branches.push_back(GlobalBranch{b.label, child});
    }
    placeholder->branches = std::move(branches);
    return placeholder;
  };

  const GlobalNode* result = rewrite(root);
  if (!result) return std::nullopt;
  return Global{std::move(arena), result};
}

std::optional<TypeConfiguration> gt_step_config(const TypeConfiguration& c,
                                                const CommLabel& label) {
  auto next = gt_step(c, label);
  if (!next) return std::nullopt;
  auto queue = apply_label(label, c.queue);
  return TypeConfiguration{std::move(*next), std::move(*queue)};
}

std::set<CommLabel> gt_enabled(const TypeConfiguration& c) {
  std::set<CommLabel> out;
  for (const auto& label : capabilities(c.global.node))
    if (gt_step(c, label)) out.insert(label);
  return out;
}

namespace {

struct VisitedBranch {
  const GlobalNode* owner;
  std::size_t index;
  auto operator<=>(const VisitedBranch&) const = default;
};

ExtNat weight_node(const GlobalNode* n, const CommLabel& consuming, WeightMode mode,
                   std::set<VisitedBranch>& visited, std::vector<GlobalBranch>& visited_terms);

ExtNat weight_branch(const GlobalNode* owner, std::size_t index, const CommLabel& consuming,
                     WeightMode mode, std::set<VisitedBranch>& visited,
                     std::vector<GlobalBranch>& visited_terms) {
  const GlobalBranch& b = owner->branches[index];
  // An input by the receiver from the sender either consumes the message or,
  // with the wrong tag, blocks that channel head forever.
  if (b.label.kind == ActionKind::Input && b.label.player == consuming.player &&
      b.label.partner == consuming.partner) {
    return b.label.tag == consuming.tag ? ExtNat::finite(0) : ExtNat::infinity();
  }
  if (mode == WeightMode::NodeIdentity) {
    VisitedBranch key{owner, index};
    if (visited.count(key)) return ExtNat::infinity();
    visited.insert(key);
    ExtNat w = weight_node(b.target, consuming, mode, visited, visited_terms).succ();
    visited.erase(key);
    return w;
  }
  for (const auto& seen : visited_terms)
    if (seen.label == b.label && bisim_equal(seen.target, b.target)) return ExtNat::infinity();
  visited_terms.push_back(b);
  ExtNat w = weight_node(b.target, consuming, mode, visited, visited_terms).succ();
  visited_terms.pop_back();
  return w;
}

ExtNat weight_node(const GlobalNode* n, const CommLabel& consuming, WeightMode mode,
                   std::set<VisitedBranch>& visited, std::vector<GlobalBranch>& visited_terms) {
  if (n->is_end()) return ExtNat::infinity();
  ExtNat best = ExtNat::infinity();
  for (std::size_t i = 0; i < n->branches.size(); ++i)
    best = min(best, weight_branch(n, i, consuming, mode, visited, visited_terms));
  return best;
}

}  // namespace

ExtNat weight(const GlobalNode* g, const Message& m, WeightMode mode) {
  CommLabel consuming = input_label(m.receiver, m.sender, m.tag);
  std::set<VisitedBranch> visited;
  std::vector<GlobalBranch> visited_terms;
  return weight_node(g, consuming, mode, visited, visited_terms);
}

bool is_sound(const TypeConfiguration& c) {
  for (const auto& m : c.queue.messages())
    if (!weight(c.global.node, m).is_finite()) return false;
  return true;
}

}  // namespace mps
