#include "mps/session.hpp"

#include <algorithm>

namespace mps {

std::string to_string(const Message& m) {
  return "<" + m.sender.name + "," + m.tag.name + "," + m.receiver.name + ">";
}

std::vector<Message> Queue::messages() const {
  std::vector<Message> out;
  for (const auto& [ch, fifo] : channels_)
    for (const auto& tag : fifo) out.push_back(Message{ch.first, tag, ch.second});
  return out;
}

std::string to_string(const Queue& q) {
  std::string out = "[";
  bool first = true;
  for (const auto& m : q.messages()) {
    if (!first) out += ", ";
    out += to_string(m);
    first = false;
  }
  return out + "]";
}

std::optional<Queue> apply_label(const CommLabel& label, const Queue& q) {
  Queue next = q;
  if (label.is_output()) {
    next.push(Message{label.player, label.tag, label.partner});
    return next;
  }
  if (!next.pop(label.partner, label.player, label.tag)) return std::nullopt;
  return next;
}

std::set<Participant> players_of(const Trace& t) {
  std::set<Participant> ps;
  for (const auto& label : t) ps.insert(label.player);
  return ps;
}

std::set<Participant> Session::plays() const {
  std::set<Participant> ps;
  for (const auto& [p, proc] : network) ps.insert(p);
  return ps;
}

std::optional<Session> step(const Session& s, const CommLabel& label) {
  auto it = s.network.find(label.player);
  if (it == s.network.end()) return std::nullopt;
  const ProcessNode* proc = it->second;
  ActionPrefix wanted{label.kind, label.partner, label.tag};
  const ProcessBranch* chosen = nullptr;
  for (const auto& b : proc->branches) {
    if (b.prefix == wanted) {
      chosen = &b;
      break;
    }
  }
  if (!chosen) return std::nullopt;
  auto queue = apply_label(label, s.queue);
  if (!queue) return std::nullopt;
  Session next = s;
  next.queue = std::move(*queue);
  if (chosen->target->terminated())
    next.network.erase(label.player);
  else
    next.network[label.player] = chosen->target;
  return next;
}

std::set<CommLabel> enabled_labels(const Session& s) {
  std::set<CommLabel> out;
  for (const auto& [p, proc] : s.network) {
    for (const auto& b : proc->branches) {
      CommLabel label = label_of_prefix(p, b.prefix);
      if (label.is_output()) {
        out.insert(label);
      } else if (auto h = s.queue.head(b.prefix.peer, p); h && *h == b.prefix.tag) {
        out.insert(label);
      }
    }
  }
  return out;
}

std::set<CommLabel> enabled_for(const Participant& p, const Session& s) {
  std::set<CommLabel> out;
  for (const auto& label : enabled_labels(s))
    if (label.player == p) out.insert(label);
  return out;
}

bool is_satisfied(const Participant& p, const Session& s) {
  auto it = s.network.find(p);
  if (it == s.network.end()) return true;
  bool has_input = false;
  for (const auto& b : it->second->branches) {
    if (b.prefix.kind != ActionKind::Input) continue;
    has_input = true;
    if (auto h = s.queue.head(b.prefix.peer, p); h && *h == b.prefix.tag) return true;
  }
  return !has_input;
}

std::vector<std::set<CommLabel>> coherent_sets(const Session& s) {
  std::vector<std::set<CommLabel>> out;
  auto add = [&out](std::set<CommLabel> set) {
    if (set.empty()) return;
    if (std::find(out.begin(), out.end(), set) == out.end()) out.push_back(std::move(set));
  };
  for (const auto& [p, proc] : s.network)
    if (is_satisfied(p, s)) add(enabled_for(p, s));
  add(enabled_labels(s));
  return out;
}

TraceRun run_trace(const Session& s, const Trace& t) {
  Session current = s;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto next = step(current, t[i]);
    if (!next) return TraceRun{std::nullopt, i};
    current = std::move(*next);
  }
  return TraceRun{std::move(current), t.size()};
}

}  // namespace mps
