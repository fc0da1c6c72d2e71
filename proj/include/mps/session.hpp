#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mps/term.hpp"

namespace mps {

struct Message {
  Participant sender;
  Tag tag;
  Participant receiver;
  auto operator<=>(const Message&) const = default;
};

std::string to_string(const Message& m);  // <p,t,q>

// Message store in canonical form: one FIFO per ordered (sender, receiver)
// pair. Messages with different endpoints commute, so value equality of
// queues coincides with equality modulo the structural rearrangement of
// unrelated messages. Empty channels are never stored.
class Queue {
 public:
  using ChannelId = std::pair<Participant, Participant>;

  void push(const Message& m) { channels_[{m.sender, m.receiver}].push_back(m.tag); }

  std::optional<Tag> head(const Participant& sender, const Participant& receiver) const {
    auto it = channels_.find({sender, receiver});
    if (it == channels_.end()) return std::nullopt;
    return it->second.front();
  }

  // Removes the head of (sender, receiver) when it carries `tag`.
  bool pop(const Participant& sender, const Participant& receiver, const Tag& tag) {
    auto it = channels_.find({sender, receiver});
    if (it == channels_.end() || !(it->second.front() == tag)) return false;
    it->second.erase(it->second.begin());
    if (it->second.empty()) channels_.erase(it);
    return true;
  }

  bool empty() const { return channels_.empty(); }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [ch, fifo] : channels_) n += fifo.size();
    return n;
  }

  std::size_t longest_channel() const {
    std::size_t n = 0;
    for (const auto& [ch, fifo] : channels_) n = std::max(n, fifo.size());
    return n;
  }

  const std::map<ChannelId, std::vector<Tag>>& channels() const { return channels_; }

  // All messages, channels in canonical order, each channel front to back.
  std::vector<Message> messages() const;

  auto operator<=>(const Queue&) const = default;

 private:
  std::map<ChannelId, std::vector<Tag>> channels_;
};

std::string to_string(const Queue& q);  // [<p,t,q>, ...]

// Applies a label to the queue: outputs append their message, inputs remove
// the matching head. nullopt when the label is an input and the head of its
// channel does not match.
std::optional<Queue> apply_label(const CommLabel& label, const Queue& q);

using Trace = std::vector<CommLabel>;

std::set<Participant> players_of(const Trace& t);

// A multiparty session: named non-terminated processes plus the queue.
// Terminated participants are absent from the network, so a final session
// is one with an empty network. Process identity is graph-node identity;
// within one resolved program sessions compare canonically by value.
struct Session {
  std::map<Participant, const ProcessNode*> network;
  Queue queue;
  std::shared_ptr<const TermArena> arena;

  bool final() const { return network.empty(); }
  std::set<Participant> plays() const;

  bool operator==(const Session& o) const { return network == o.network && queue == o.queue; }
  bool operator<(const Session& o) const {
    if (network != o.network) return network < o.network;
    return queue < o.queue;
  }
};

// One communication step. Defined iff the player owns a top-level branch
// with the corresponding prefix and the queue update applies; the player's
// process moves under the prefix and leaves the network when terminated.
std::optional<Session> step(const Session& s, const CommLabel& label);

std::set<CommLabel> enabled_labels(const Session& s);
std::set<CommLabel> enabled_for(const Participant& p, const Session& s);

// A participant is satisfied when it has no input branches at the top, or
// at least one of its input branches can read the head of its channel.
bool is_satisfied(const Participant& p, const Session& s);

// Deterministic listing of the coherent label sets: the enabled-label set
// of each satisfied participant (participants in name order), then the set
// of all enabled labels; empty sets and duplicates are dropped.
std::vector<std::set<CommLabel>> coherent_sets(const Session& s);

struct TraceRun {
  std::optional<Session> result;  // nullopt when some step was undefined
  std::size_t steps_taken = 0;    // on failure, the failing index
};

TraceRun run_trace(const Session& s, const Trace& t);

}  // namespace mps
