#include "mps/generate.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <vector>

namespace mps {

SessionGenerator::SessionGenerator(std::uint64_t seed, GenOptions options)
    : rng_(seed), options_(options) {}

std::size_t SessionGenerator::pick(std::size_t upper) {
  return std::uniform_int_distribution<std::size_t>(0, upper - 1)(rng_);
}

Participant SessionGenerator::participant(std::size_t i) const {
  return Participant{std::string(1, static_cast<char>('p' + i))};
}

Tag SessionGenerator::tag(std::size_t i) const {
  return Tag{"t" + std::to_string(i)};
}

Process SessionGenerator::random_process() {
  auto arena = std::make_shared<TermArena>();
  std::size_t participants = 2 + pick(options_.max_participants - 1);
  std::size_t tags = 1 + pick(options_.max_tags);
  std::vector<ProcessNode*> ancestors;

  std::function<const ProcessNode*(std::size_t)> build =
      [&](std::size_t depth) -> const ProcessNode* {
    if (depth >= options_.max_depth || pick(4) == 0) return arena->terminated();
    if (!ancestors.empty() && pick(4) == 0) return ancestors[pick(ancestors.size())];
    ProcessNode* node = arena->make_process();
    ancestors.push_back(node);
    std::size_t width = 1 + pick(options_.max_width);
    std::set<ActionPrefix> used;
    for (std::size_t i = 0; i < width; ++i) {
      ActionPrefix prefix{pick(2) ? ActionKind::Input : ActionKind::Output,
                          participant(pick(participants)), tag(pick(tags))};
      if (!used.insert(prefix).second) continue;
      node->branches.push_back(ProcessBranch{prefix, build(depth + 1)});
    }
    ancestors.pop_back();
    return node;
  };
  const ProcessNode* root = build(0);
  return Process{std::move(arena), root};
}

Global SessionGenerator::random_global() {
  auto arena = std::make_shared<TermArena>();
  std::size_t participants = 2 + pick(options_.max_participants - 1);
  std::size_t tags = 1 + pick(options_.max_tags);
  std::vector<GlobalNode*> ancestors;

  std::function<const GlobalNode*(std::size_t)> build =
      [&](std::size_t depth) -> const GlobalNode* {
    if (depth >= options_.max_depth || pick(4) == 0) return arena->end_node();
    if (!ancestors.empty() && pick(4) == 0) return ancestors[pick(ancestors.size())];
    GlobalNode* node = arena->make_global();
    ancestors.push_back(node);
    std::size_t width = 1 + pick(options_.max_width);
    std::set<CommLabel> used;
    for (std::size_t i = 0; i < width; ++i) {
      std::size_t a = pick(participants);
      std::size_t b = pick(participants - 1);
      if (b >= a) ++b;
      CommLabel label{pick(2) ? ActionKind::Input : ActionKind::Output, participant(a),
                      participant(b), tag(pick(tags))};
      if (!used.insert(label).second) continue;
      node->branches.push_back(GlobalBranch{label, build(depth + 1)});
    }
    ancestors.pop_back();
    return node;
  };
  const GlobalNode* root = build(0);
  return Global{std::move(arena), root};
}

Session SessionGenerator::random_session() {
  auto arena = std::make_shared<TermArena>();
  std::size_t participants = 2 + pick(options_.max_participants - 1);
  std::size_t tags = 1 + pick(options_.max_tags);

  Session s;
  s.arena = arena;
  for (std::size_t i = 0; i < participants; ++i) {
    std::vector<ProcessNode*> ancestors;
    std::function<const ProcessNode*(std::size_t)> build =
        [&](std::size_t depth) -> const ProcessNode* {
      if (depth >= options_.max_depth || pick(4) == 0) return arena->terminated();
      if (!ancestors.empty() && pick(4) == 0) return ancestors[pick(ancestors.size())];
      ProcessNode* node = arena->make_process();
      ancestors.push_back(node);
      std::size_t width = 1 + pick(options_.max_width);
      std::set<ActionPrefix> used;
      for (std::size_t j = 0; j < width; ++j) {
        std::size_t peer = pick(participants - 1);
        if (peer >= i) ++peer;
        ActionPrefix prefix{pick(2) ? ActionKind::Input : ActionKind::Output, participant(peer),
                            tag(pick(tags))};
        if (!used.insert(prefix).second) continue;
        node->branches.push_back(ProcessBranch{prefix, build(depth + 1)});
      }
      ancestors.pop_back();
      return node;
    };
    const ProcessNode* proc = build(0);
    if (!proc->terminated()) s.network[participant(i)] = proc;
  }
  std::size_t messages = pick(options_.max_queue_messages + 1);
  for (std::size_t i = 0; i < messages; ++i) {
    std::size_t a = pick(participants);
    std::size_t b = pick(participants - 1);
    if (b >= a) ++b;
    s.queue.push(Message{participant(a), tag(pick(tags)), participant(b)});
  }
  return s;
}

Session SessionGenerator::random_choreography_session() {
  auto arena = std::make_shared<TermArena>();
  std::size_t participants = 2 + pick(options_.max_participants - 1);
  std::size_t tags = 1 + pick(options_.max_tags);
  std::size_t length = 1 + pick(options_.max_chain);
  bool loop = pick(3) == 0;

  struct Comm {
    std::size_t from, to;
    Tag tag;
  };
  std::vector<Comm> chain;
  for (std::size_t i = 0; i < length; ++i) {
    std::size_t a = pick(participants);
    std::size_t b = pick(participants - 1);
    if (b >= a) ++b;
    chain.push_back({a, b, tag(pick(tags))});
  }

  Session s;
  s.arena = arena;
  for (std::size_t i = 0; i < participants; ++i) {
    std::vector<ActionPrefix> actions;
    for (const auto& c : chain) {
      if (c.from == i)
        actions.push_back(ActionPrefix{ActionKind::Output, participant(c.to), c.tag});
      if (c.to == i)
        actions.push_back(ActionPrefix{ActionKind::Input, participant(c.from), c.tag});
    }
    if (actions.empty()) continue;
    std::vector<ProcessNode*> nodes;
    for (std::size_t j = 0; j < actions.size(); ++j) nodes.push_back(arena->make_process());
    for (std::size_t j = 0; j < actions.size(); ++j) {
      const ProcessNode* cont;
      if (j + 1 < actions.size())
        cont = nodes[j + 1];
      else
        cont = loop ? nodes.front() : static_cast<const ProcessNode*>(arena->terminated());
      nodes[j]->branches.push_back(ProcessBranch{actions[j], cont});
    }
    s.network[participant(i)] = nodes.front();
  }
  return s;
}

Trace random_schedule(const Session& s, std::size_t steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Trace trace;
  Session current = s;
  for (std::size_t i = 0; i < steps; ++i) {
    auto enabled = enabled_labels(current);
    if (enabled.empty()) break;
    std::vector<CommLabel> labels(enabled.begin(), enabled.end());
    std::size_t idx = std::uniform_int_distribution<std::size_t>(0, labels.size() - 1)(rng);
    auto next = step(current, labels[idx]);
    trace.push_back(labels[idx]);
    current = std::move(*next);
  }
  return trace;
}

}  // namespace mps
