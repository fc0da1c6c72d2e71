#include "mps/term.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <sstream>
#include <utility>

namespace mps {

std::string to_string(const ActionPrefix& pi) {
  return pi.peer.name + (pi.kind == ActionKind::Output ? "!" : "?") + pi.tag.name;
}

std::string to_string(const CommLabel& label) {
  if (label.is_output()) return label.player.name + ">" + label.partner.name + "!" + label.tag.name;
  return label.player.name + "<" + label.partner.name + "?" + label.tag.name;
}

namespace {

template <class Node>
struct NodeTraits;

template <>
struct NodeTraits<ProcessNode> {
  using Key = ActionPrefix;
  static const Key& key(const ProcessBranch& b) { return b.prefix; }
  static const ProcessNode* target(const ProcessBranch& b) { return b.target; }
  static const std::vector<ProcessBranch>& branches(const ProcessNode& n) { return n.branches; }
  static std::string key_text(const Key& k) { return to_string(k); }
};

template <>
struct NodeTraits<GlobalNode> {
  using Key = CommLabel;
  static const Key& key(const GlobalBranch& b) { return b.label; }
  static const GlobalNode* target(const GlobalBranch& b) { return b.target; }
  static const std::vector<GlobalBranch>& branches(const GlobalNode& n) { return n.branches; }
  static std::string key_text(const Key& k) { return to_string(k); }
};

template <class Node>
std::vector<const Node*> collect(const Node* root) {
  using T = NodeTraits<Node>;
  std::vector<const Node*> order;
  std::set<const Node*> seen;
  std::deque<const Node*> todo{root};
  seen.insert(root);
  while (!todo.empty()) {
    const Node* n = todo.front();
    todo.pop_front();
    order.push_back(n);
    for (const auto& b : T::branches(*n)) {
      if (seen.insert(T::target(b)).second) todo.push_back(T::target(b));
    }
  }
  return order;
}

// Branches of one choice carry pairwise distinct keys, so matching two
// choices up to permutation reduces to comparing sorted key lists and the
// continuation forced by each key. The set of pairs forced by simultaneous
// traversal is a bisimulation iff every pair is locally consistent.
template <class Node>
bool bisim_impl(const Node* a, const Node* b) {
  using T = NodeTraits<Node>;
  std::set<std::pair<const Node*, const Node*>> seen;
  std::deque<std::pair<const Node*, const Node*>> todo{{a, b}};
  seen.insert({a, b});
  while (!todo.empty()) {
    auto [x, y] = todo.front();
    todo.pop_front();
    if (x == y) continue;
    auto xs = T::branches(*x);
    auto ys = T::branches(*y);
    if (xs.size() != ys.size()) return false;
    auto by_key = [](const auto& l, const auto& r) { return T::key(l) < T::key(r); };
    std::sort(xs.begin(), xs.end(), by_key);
    std::sort(ys.begin(), ys.end(), by_key);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!(T::key(xs[i]) == T::key(ys[i]))) return false;
      auto pair = std::make_pair(T::target(xs[i]), T::target(ys[i]));
      if (seen.insert(pair).second) todo.push_back(pair);
    }
  }
  return true;
}

// Partition refinement to the bisimulation quotient, then a breadth-first
// numbering of the quotient along sorted edges. The serialisation is a
// canonical form: keys agree exactly for bisimilar roots.
template <class Node>
std::string canonical_impl(const Node* root) {
  using T = NodeTraits<Node>;
  auto nodes = collect(root);
  std::map<const Node*, std::size_t> block;

  auto signature = [&](const Node* n, bool with_blocks) {
    std::vector<std::string> parts;
    for (const auto& b : T::branches(*n)) {
      std::string s = T::key_text(T::key(b));
      if (with_blocks) s += "@" + std::to_string(block.at(T::target(b)));
      parts.push_back(std::move(s));
    }
    std::sort(parts.begin(), parts.end());
    std::string out;
    for (const auto& p : parts) out += p + ";";
    return out;
  };

  {
    std::map<std::string, std::size_t> ids;
    for (const Node* n : nodes) {
      auto sig = signature(n, false);
      auto [it, _] = ids.try_emplace(sig, ids.size());
      block[n] = it->second;
    }
  }
  for (;;) {
    std::map<std::string, std::size_t> ids;
    std::map<const Node*, std::size_t> next;
    for (const Node* n : nodes) {
      auto sig = signature(n, true);
      auto [it, _] = ids.try_emplace(sig, ids.size());
      next[n] = it->second;
    }
    if (next == block) break;
    block = std::move(next);
  }

  // One representative per block suffices: all members agree on key lists
  // and on the blocks of the forced continuations.
  std::map<std::size_t, const Node*> rep;
  for (const Node* n : nodes) rep.try_emplace(block.at(n), n);

  std::map<std::size_t, std::size_t> numbering;
  std::deque<std::size_t> todo{block.at(root)};
  numbering[block.at(root)] = 0;
  std::ostringstream out;
  while (!todo.empty()) {
    std::size_t blk = todo.front();
    todo.pop_front();
    const Node* n = rep.at(blk);
    auto branches = T::branches(*n);
    std::sort(branches.begin(), branches.end(),
              [](const auto& l, const auto& r) { return T::key(l) < T::key(r); });
    out << numbering.at(blk) << "{";
    for (const auto& b : branches) {
      std::size_t tb = block.at(T::target(b));
      auto it = numbering.find(tb);
      if (it == numbering.end()) {
        it = numbering.emplace(tb, numbering.size()).first;
        todo.push_back(tb);
      }
      out << T::key_text(T::key(b)) << "->" << it->second << ";";
    }
    out << "}";
  }
  return out.str();
}

}  // namespace

std::vector<const ProcessNode*> reachable_nodes(const ProcessNode* root) { return collect(root); }
std::vector<const GlobalNode*> reachable_nodes(const GlobalNode* root) { return collect(root); }

std::set<CommLabel> capabilities(const GlobalNode* g) {
  std::set<CommLabel> caps;
  for (const GlobalNode* n : collect(g))
    for (const auto& b : n->branches) caps.insert(b.label);
  return caps;
}

std::set<Participant> players_of_global(const GlobalNode* g) {
  std::set<Participant> ps;
  for (const auto& label : capabilities(g)) ps.insert(label.player);
  return ps;
}

std::map<const GlobalNode*, std::set<Participant>> players_map(const GlobalNode* root) {
  // Tarjan's algorithm, iterative. Components complete in reverse
  // topological order, so each one can fold in the sets of its successors
  // as soon as it is popped.
  std::map<const GlobalNode*, std::size_t> index, low, comp;
  std::vector<std::set<Participant>> comp_players;
  std::vector<const GlobalNode*> stack;
  std::set<const GlobalNode*> on_stack;

  struct Frame {
    const GlobalNode* node;
    std::size_t next_branch = 0;
  };
  std::vector<Frame> frames{{root}};
  std::size_t counter = 0;
  index[root] = low[root] = counter++;
  stack.push_back(root);
  on_stack.insert(root);

  while (!frames.empty()) {
    Frame& f = frames.back();
    if (f.next_branch < f.node->branches.size()) {
      const GlobalNode* child = f.node->branches[f.next_branch++].target;
      if (!index.count(child)) {
        index[child] = low[child] = counter++;
        stack.push_back(child);
        on_stack.insert(child);
        frames.push_back({child});
      } else if (on_stack.count(child)) {
        low[f.node] = std::min(low[f.node], index[child]);
      }
      continue;
    }
    if (low[f.node] == index[f.node]) {
      std::set<Participant> players;
      std::vector<const GlobalNode*> members;
      for (;;) {
        const GlobalNode* n = stack.back();
        stack.pop_back();
        on_stack.erase(n);
        members.push_back(n);
        if (n == f.node) break;
      }
      for (const GlobalNode* n : members) {
        for (const auto& b : n->branches) {
          players.insert(b.label.player);
          auto it = comp.find(b.target);
          if (it != comp.end()) {
            const auto& sub = comp_players[it->second];
            players.insert(sub.begin(), sub.end());
          }
        }
      }
      std::size_t id = comp_players.size();
      comp_players.push_back(std::move(players));
      for (const GlobalNode* n : members) comp[n] = id;
    }
    const GlobalNode* done = f.node;
    frames.pop_back();
    if (!frames.empty())
      low[frames.back().node] = std::min(low[frames.back().node], low[done]);
  }

  std::map<const GlobalNode*, std::set<Participant>> out;
  for (const auto& [node, id] : comp) out[node] = comp_players[id];
  return out;
}

bool bisim_equal(const ProcessNode* a, const ProcessNode* b) { return bisim_impl(a, b); }
bool bisim_equal(const GlobalNode* a, const GlobalNode* b) { return bisim_impl(a, b); }

std::string canonical_key(const ProcessNode* root) { return canonical_impl(root); }
std::string canonical_key(const GlobalNode* root) { return canonical_impl(root); }

}  // namespace mps
