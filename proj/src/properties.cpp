#include "mps/properties.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "mps/generate.hpp"
#include "mps/print.hpp"
#include "mps/type_semantics.hpp"

namespace mps {

std::string to_string(PropertyStatus s) {
  switch (s) {
    case PropertyStatus::Holds: return "holds";
    case PropertyStatus::Fails: return "fails";
    case PropertyStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

Coverage coverage_of(const StateGraph& g) { return {g.states.size(), g.truncated.size()}; }

// States from which some state in `seeds` is reachable (including seeds).
std::vector<bool> backward_closure(const StateGraph& g, const std::vector<bool>& seeds) {
  std::vector<std::vector<std::size_t>> preds(g.states.size());
  for (const auto& e : g.edges) preds[e.to].push_back(e.from);
  std::vector<bool> reached = seeds;
  std::deque<std::size_t> todo;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (seeds[i]) todo.push_back(i);
  while (!todo.empty()) {
    std::size_t cur = todo.front();
    todo.pop_front();
    for (std::size_t p : preds[cur]) {
      if (!reached[p]) {
        reached[p] = true;
        todo.push_back(p);
      }
    }
  }
  return reached;
}

// States whose forward region touches a truncated state; verdicts with a
// witness inside this region are tainted by the exploration bound.
std::vector<bool> tainted_states(const StateGraph& g) {
  std::vector<bool> seeds(g.states.size(), false);
  for (std::size_t i : g.truncated) seeds[i] = true;
  return backward_closure(g, seeds);
}

// Accumulates violations found while scanning states in discovery order. A
// violation whose forward region touches a truncated state may be spurious,
// so a definitive one wins; with only tainted violations (or none, under a
// truncated exploration) the verdict degrades to inconclusive.
class Violations {
 public:
  void add(std::size_t state, std::string obligation, bool tainted) {
    auto& slot = tainted ? tainted_ : definitive_;
    if (!slot) slot = {state, std::move(obligation)};
  }
  bool have_definitive() const { return definitive_.has_value(); }

  PropertyVerdict decide(const StateGraph& g, std::string property) const {
    PropertyVerdict v;
    v.property = std::move(property);
    v.coverage = coverage_of(g);
    if (definitive_) {
      v.status = PropertyStatus::Fails;
      v.counterexample = Counterexample{g.trace_to(definitive_->first),
                                        display(g.states[definitive_->first]),
                                        definitive_->second};
      return v;
    }
    if (tainted_ || !g.truncated.empty()) {
      v.status = PropertyStatus::Inconclusive;
      if (tainted_)
        v.counterexample = Counterexample{g.trace_to(tainted_->first),
                                          display(g.states[tainted_->first]),
                                          tainted_->second + " (within truncated region)"};
      return v;
    }
    v.status = PropertyStatus::Holds;
    return v;
  }

 private:
  std::optional<std::pair<std::size_t, std::string>> definitive_, tainted_;
};

}  // namespace

PropertyVerdict check_lock_freedom(const Session& s, const ExploreBounds& bounds) {
  StateGraph g = explore(s, bounds);
  auto taint = tainted_states(g);

  std::set<Participant> participants;
  for (const auto& state : g.states)
    for (const auto& p : state.plays()) participants.insert(p);

  // For each participant: the states from which one of its communications
  // is still reachable.
  std::map<Participant, std::vector<bool>> can_act;
  for (const auto& p : participants) {
    std::vector<bool> seeds(g.states.size(), false);
    for (const auto& e : g.edges)
      if (e.label.player == p) seeds[e.from] = true;
    can_act[p] = backward_closure(g, seeds);
  }

  Violations found;
  for (std::size_t i = 0; i < g.states.size() && !found.have_definitive(); ++i) {
    for (const auto& p : g.states[i].plays()) {
      if (can_act.at(p)[i]) continue;
      found.add(i, "participant " + p.name + " can never communicate", taint[i]);
      if (found.have_definitive()) break;
    }
  }
  return found.decide(g, "lock-freedom");
}

PropertyVerdict check_orphan_freedom(const Session& s, const ExploreBounds& bounds) {
  StateGraph g = explore(s, bounds);
  Violations found;
  for (std::size_t i = 0; i < g.states.size() && !found.have_definitive(); ++i) {
    // A reached orphan state is a definitive violation regardless of bounds.
    if (g.states[i].final() && !g.states[i].queue.empty())
      found.add(i, "final network with queued messages " + to_string(g.states[i].queue), false);
  }
  return found.decide(g, "orphan-freedom");
}

PropertyVerdict check_eventual_reception(const Session& s, const ExploreBounds& bounds) {
  StateGraph g = explore(s, bounds);
  auto taint = tainted_states(g);

  std::map<CommLabel, std::vector<bool>> consumable;
  auto can_consume = [&](const CommLabel& label) -> const std::vector<bool>& {
    auto it = consumable.find(label);
    if (it == consumable.end()) {
      std::vector<bool> seeds(g.states.size(), false);
      for (const auto& e : g.edges)
        if (e.label == label) seeds[e.from] = true;
      it = consumable.emplace(label, backward_closure(g, seeds)).first;
    }
    return it->second;
  };

  Violations found;
  for (std::size_t i = 0; i < g.states.size() && !found.have_definitive(); ++i) {
    for (const auto& [channel, fifo] : g.states[i].queue.channels()) {
      // The first matching input along any path consumes exactly this head.
      CommLabel consuming = input_label(channel.second, channel.first, fifo.front());
      if (can_consume(consuming)[i]) continue;
      found.add(i,
                "message " + to_string(Message{channel.first, fifo.front(), channel.second}) +
                    " can never be received",
                taint[i]);
      if (found.have_definitive()) break;
    }
  }
  return found.decide(g, "eventual-reception");
}

namespace {

PropertyVerdict lockstep_failure(const StateGraph& g, std::string property, std::size_t state,
                                 const std::string& obligation) {
  PropertyVerdict v;
  v.property = std::move(property);
  v.status = PropertyStatus::Fails;
  v.coverage = coverage_of(g);
  v.counterexample = Counterexample{g.trace_to(state), display(g.states[state]), obligation};
  return v;
}

PropertyVerdict lockstep_inconclusive(std::string property, Coverage coverage,
                                      const std::string& why) {
  PropertyVerdict v;
  v.property = std::move(property);
  v.status = PropertyStatus::Inconclusive;
  v.coverage = coverage;
  v.counterexample = Counterexample{{}, "", why};
  return v;
}

}  // namespace

PropertyVerdict cross_check_subject_reduction(const Global& g, const Session& s,
                                              const CheckBounds& cbounds,
                                              const ExploreBounds& ebounds) {
  const std::string property = "subject-reduction";
  Verdict root = check(g, s, cbounds, false);
  if (!root.accepted())
    return lockstep_inconclusive(property, {}, "precondition: the session is not typed by the type");
  StateGraph graph = explore(s, ebounds);
  if (!graph.truncated.empty())
    return lockstep_inconclusive(property, coverage_of(graph), "exploration truncated");

  auto out = graph.out_edges();
  std::set<std::pair<std::string, std::size_t>> seen;
  std::deque<std::pair<Global, std::size_t>> todo;
  seen.insert({canonical_key(g.node), graph.initial});
  todo.push_back({g, graph.initial});
  std::size_t visited = 0;

  while (!todo.empty()) {
    auto [type, state] = todo.front();
    todo.pop_front();
    if (++visited > cbounds.max_pairs)
      return lockstep_inconclusive(property, coverage_of(graph), "pair budget exhausted");
    TypeConfiguration conf{type, graph.states[state].queue};
    for (std::size_t e : out[state]) {
      const auto& edge = graph.edges[e];
      auto next_type = gt_step(conf, edge.label);
      if (!next_type)
        return lockstep_failure(graph, property, state,
                                "session step " + to_string(edge.label) +
                                    " has no matching type transition from " +
                                    display(type.node));
      auto key = std::make_pair(canonical_key(next_type->node), edge.to);
      if (!seen.insert(key).second) continue;
      Verdict v = check(*next_type, graph.states[edge.to], cbounds, false);
      if (!v.accepted())
        return lockstep_failure(graph, property, edge.to,
                                "successor after " + to_string(edge.label) +
                                    " is not typed by " + display(next_type->node));
      todo.push_back({*next_type, edge.to});
    }
  }

  PropertyVerdict v;
  v.property = property;
  v.status = PropertyStatus::Holds;
  v.coverage = coverage_of(graph);
  return v;
}

PropertyVerdict cross_check_session_fidelity(const Global& g, const Session& s,
                                             const CheckBounds& cbounds,
                                             const ExploreBounds& ebounds) {
  const std::string property = "session-fidelity";
  Verdict root = check(g, s, cbounds, false);
  if (!root.accepted())
    return lockstep_inconclusive(property, {}, "precondition: the session is not typed by the type");
  StateGraph graph = explore(s, ebounds);
  if (!graph.truncated.empty())
    return lockstep_inconclusive(property, coverage_of(graph), "exploration truncated");

  std::map<Session, std::size_t> index;
  for (std::size_t i = 0; i < graph.states.size(); ++i) index.emplace(graph.states[i], i);

  std::set<std::pair<std::string, std::size_t>> seen;
  std::deque<std::pair<Global, std::size_t>> todo;
  seen.insert({canonical_key(g.node), graph.initial});
  todo.push_back({g, graph.initial});
  std::size_t visited = 0;

  while (!todo.empty()) {
    auto [type, state] = todo.front();
    todo.pop_front();
    if (++visited > cbounds.max_pairs)
      return lockstep_inconclusive(property, coverage_of(graph), "pair budget exhausted");
    TypeConfiguration conf{type, graph.states[state].queue};
    for (const auto& label : gt_enabled(conf)) {
      auto next_session = step(graph.states[state], label);
      if (!next_session)
        return lockstep_failure(graph, property, state,
                                "type transition " + to_string(label) +
                                    " is not enabled in the session");
      auto next_type = gt_step(conf, label);
      std::size_t next_state = index.at(*next_session);
      auto key = std::make_pair(canonical_key(next_type->node), next_state);
      if (!seen.insert(key).second) continue;
      Verdict v = check(*next_type, *next_session, cbounds, false);
      if (!v.accepted())
        return lockstep_failure(graph, property, next_state,
                                "successor after " + to_string(label) + " is not typed by " +
                                    display(next_type->node));
      todo.push_back({*next_type, next_state});
    }
  }

  PropertyVerdict v;
  v.property = property;
  v.status = PropertyStatus::Holds;
  v.coverage = coverage_of(graph);
  return v;
}

PropertyVerdict cross_check_type_progress(const Global& g, const Queue& q,
                                          const CheckBounds& bounds) {
  const std::string property = "type-progress";
  PropertyVerdict v;
  v.property = property;

  for (const auto& p : players_of_global(g.node)) {
    std::set<std::pair<std::string, Queue>> seen;
    std::deque<TypeConfiguration> todo;
    todo.push_back({g, q});
    seen.insert({canonical_key(g.node), q});
    bool found = false;
    std::size_t visited = 0;
    while (!todo.empty() && !found) {
      TypeConfiguration conf = std::move(todo.front());
      todo.pop_front();
      if (++visited > bounds.max_pairs)
        return lockstep_inconclusive(property, v.coverage, "pair budget exhausted");
      for (const auto& label : gt_enabled(conf)) {
        if (label.player == p) {
          found = true;
          break;
        }
        auto next = gt_step_config(conf, label);
        if (next->queue.longest_channel() > bounds.max_queue) continue;
        auto key = std::make_pair(canonical_key(next->global.node), next->queue);
        if (seen.insert(key).second) todo.push_back(std::move(*next));
      }
    }
    v.coverage.states = std::max(v.coverage.states, visited);
    if (!found) {
      v.status = PropertyStatus::Fails;
      v.counterexample = Counterexample{
          {}, display(g.node) + " with " + to_string(q),
          "no transition sequence reaches a label played by " + p.name};
      return v;
    }
  }
  v.status = PropertyStatus::Holds;
  return v;
}

PropertyVerdict fuzz_satisfaction_preservation(std::uint64_t seed, std::size_t count) {
  PropertyVerdict v;
  v.property = "satisfaction-preservation";
  SessionGenerator gen(seed);
  for (std::size_t i = 0; i < count; ++i) {
    Session s = gen.random_session();
    v.coverage.states += 1;
    for (const auto& label : enabled_labels(s)) {
      auto next = step(s, label);
      for (const auto& [p, proc] : s.network) {
        if (p == label.player) continue;
        if (is_satisfied(p, s) && !is_satisfied(p, *next)) {
          v.status = PropertyStatus::Fails;
          v.counterexample = Counterexample{
              {label}, display(s),
              "participant " + p.name + " loses satisfaction under " + to_string(label)};
          return v;
        }
      }
    }
  }
  v.status = PropertyStatus::Holds;
  return v;
}

nlohmann::json to_json(const PropertyVerdict& v) {
  nlohmann::json j;
  j["property"] = v.property;
  j["status"] = to_string(v.status);
  if (v.counterexample) {
    nlohmann::json c;
    c["trace"] = nlohmann::json::array();
    for (const auto& l : v.counterexample->trace) c["trace"].push_back(to_string(l));
    c["state"] = v.counterexample->state;
    c["obligation"] = v.counterexample->obligation;
    j["counterexample"] = c;
  }
  j["coverage"] = {{"states", v.coverage.states}, {"truncated", v.coverage.truncated}};
  return j;
}

}  // namespace mps
