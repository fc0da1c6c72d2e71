#pragma once

#include <compare>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

namespace mps {

// Session participants and message tags are bare identifiers compared by
// exact string identity.
struct Participant {
  std::string name;
  auto operator<=>(const Participant&) const = default;
};

struct Tag {
  std::string name;
  auto operator<=>(const Tag&) const = default;
};

enum class ActionKind : std::uint8_t { Output, Input };

// A prefix q!t or q?t as it appears in a process choice.
struct ActionPrefix {
  ActionKind kind{};
  Participant peer;
  Tag tag;
  auto operator<=>(const ActionPrefix&) const = default;
};

// A communication label: p>q!t means p sends t to q, p<q?t means p reads
// from the queue the tag t that q sent to p. The player is p in both cases.
struct CommLabel {
  ActionKind kind{};
  Participant player;
  Participant partner;
  Tag tag;
  auto operator<=>(const CommLabel&) const = default;

  bool is_output() const { return kind == ActionKind::Output; }
  Participant msg_sender() const { return is_output() ? player : partner; }
  Participant msg_receiver() const { return is_output() ? partner : player; }
};

inline CommLabel output_label(Participant from, Participant to, Tag tag) {
  return CommLabel{ActionKind::Output, std::move(from), std::move(to), std::move(tag)};
}
inline CommLabel input_label(Participant reader, Participant sender, Tag tag) {
  return CommLabel{ActionKind::Input, std::move(reader), std::move(sender), std::move(tag)};
}

// The label performed when `player` fires a top-level prefix.
inline CommLabel label_of_prefix(const Participant& player, const ActionPrefix& pi) {
  return CommLabel{pi.kind, player, pi.peer, pi.tag};
}

std::string to_string(const ActionPrefix& pi);  // q!t / q?t
std::string to_string(const CommLabel& label);  // p>q!t / p<q?t

struct ProcessNode;
struct GlobalNode;

struct ProcessBranch {
  ActionPrefix prefix;
  const ProcessNode* target = nullptr;
};

// A process is either terminated (no branches) or a choice among prefixed
// continuations. Nodes form finite cyclic graphs; they are created through
// a TermArena and are immutable once resolution finishes.
struct ProcessNode {
  std::vector<ProcessBranch> branches;
  bool terminated() const { return branches.empty(); }
};

struct GlobalBranch {
  CommLabel label;
  const GlobalNode* target = nullptr;
};

// A global type: End (no branches) or a choice of labelled continuations.
struct GlobalNode {
  std::vector<GlobalBranch> branches;
  bool is_end() const { return branches.empty(); }
};

// Owns term graph nodes. Graphs derived from other graphs (for instance by
// transforming a global type) keep their source arenas alive via retain().
class TermArena {
 public:
  ProcessNode* make_process() {
    procs_.emplace_back();
    return &procs_.back();
  }
  GlobalNode* make_global() {
    globals_.emplace_back();
    return &globals_.back();
  }
  const ProcessNode* terminated() const { return &terminated_; }
  const GlobalNode* end_node() const { return &end_; }
  void retain(std::shared_ptr<const TermArena> other) {
    if (other) retained_.push_back(std::move(other));
  }

 private:
  std::deque<ProcessNode> procs_;
  std::deque<GlobalNode> globals_;
  ProcessNode terminated_;
  GlobalNode end_;
  std::vector<std::shared_ptr<const TermArena>> retained_;
};

// Shared handles; the arena keeps every node reachable from `node` alive.
struct Process {
  std::shared_ptr<const TermArena> arena;
  const ProcessNode* node = nullptr;
};

struct Global {
  std::shared_ptr<const TermArena> arena;
  const GlobalNode* node = nullptr;
};

std::vector<const ProcessNode*> reachable_nodes(const ProcessNode* root);
std::vector<const GlobalNode*> reachable_nodes(const GlobalNode* root);

// cp(G): every label occurring in the reachable graph.
std::set<CommLabel> capabilities(const GlobalNode* g);

// players(G): the players of all labels occurring in the reachable graph.
std::set<Participant> players_of_global(const GlobalNode* g);

// players for every reachable node at once, sharing one strongly-connected-
// component pass; used where players are needed per node on a hot path.
std::map<const GlobalNode*, std::set<Participant>> players_map(const GlobalNode* root);

// Equality of the regular coinductive terms denoted by two graphs, with
// summands treated as sets.
bool bisim_equal(const ProcessNode* a, const ProcessNode* b);
bool bisim_equal(const GlobalNode* a, const GlobalNode* b);

// Serialised canonical form of the bisimulation quotient. Two terms of the
// same sort are bisimilar iff their keys coincide.
std::string canonical_key(const ProcessNode* root);
std::string canonical_key(const GlobalNode* root);

}  // namespace mps
