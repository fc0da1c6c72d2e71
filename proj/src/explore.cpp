#include "mps/explore.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "mps/print.hpp"

namespace mps {

std::vector<std::vector<std::size_t>> StateGraph::out_edges() const {
  std::vector<std::vector<std::size_t>> out(states.size());
  for (std::size_t i = 0; i < edges.size(); ++i) out[edges[i].from].push_back(i);
  return out;
}

std::vector<std::vector<std::size_t>> StateGraph::in_edges() const {
  std::vector<std::vector<std::size_t>> in(states.size());
  for (std::size_t i = 0; i < edges.size(); ++i) in[edges[i].to].push_back(i);
  return in;
}

Trace StateGraph::trace_to(std::size_t state) const {
  // Parent pointers by BFS over edge order; edges were emitted in discovery
  // order, so the first edge into a state is a shortest-path tree edge.
  std::vector<std::size_t> parent_edge(states.size(), SIZE_MAX);
  std::vector<bool> seen(states.size(), false);
  seen[initial] = true;
  auto out = out_edges();
  std::deque<std::size_t> todo{initial};
  while (!todo.empty()) {
    std::size_t cur = todo.front();
    todo.pop_front();
    for (std::size_t e : out[cur]) {
      std::size_t next = edges[e].to;
      if (seen[next]) continue;
      seen[next] = true;
      parent_edge[next] = e;
      todo.push_back(next);
    }
  }
  Trace trace;
  std::size_t cur = state;
  while (cur != initial) {
    std::size_t e = parent_edge[cur];
    trace.push_back(edges[e].label);
    cur = edges[e].from;
  }
  std::reverse(trace.begin(), trace.end());
  return trace;
}

StateGraph explore(const Session& s, const ExploreBounds& bounds) {
  StateGraph g;
  std::map<Session, std::size_t> index;
  g.states.push_back(s);
  index.emplace(s, 0);
  std::deque<std::size_t> frontier{0};
  while (!frontier.empty()) {
    std::size_t cur = frontier.front();
    frontier.pop_front();
    Session state = g.states[cur];  // copy: states vector may reallocate
    for (const auto& label : enabled_labels(state)) {
      auto next = step(state, label);
      if (!next) continue;
      if (next->queue.longest_channel() > bounds.max_queue) {
        g.truncated.insert(cur);
        continue;
      }
      auto it = index.find(*next);
      if (it == index.end()) {
        if (g.states.size() >= bounds.max_states) {
          g.truncated.insert(cur);
          continue;
        }
        it = index.emplace(*next, g.states.size()).first;
        g.states.push_back(*next);
        frontier.push_back(it->second);
      }
      g.edges.push_back({cur, label, it->second});
    }
  }
  return g;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

std::string dot_label(const CommLabel& l) {
  if (l.is_output()) return l.player.name + "->" + l.partner.name + "!" + l.tag.name;
  return l.player.name + "<-" + l.partner.name + "?" + l.tag.name;
}

}  // namespace

std::string to_dot(const StateGraph& g) {
  std::string out = "digraph session {\n  rankdir=LR;\n  node [shape=box];\n";
  out += "  init [shape=point];\n";
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    out += "  s" + std::to_string(i) + " [label=\"" + dot_escape(display(g.states[i])) + "\"";
    if (g.truncated.count(i)) out += ", style=dashed";
    out += "];\n";
  }
  out += "  init -> s" + std::to_string(g.initial) + ";\n";
  for (const auto& e : g.edges) {
    out += "  s" + std::to_string(e.from) + " -> s" + std::to_string(e.to) + " [label=\"" +
           dot_escape(dot_label(e.label)) + "\"];\n";
  }
  out += "}\n";
  return out;
}

nlohmann::json to_json(const StateGraph& g) {
  nlohmann::json j;
  j["states"] = nlohmann::json::array();
  for (const auto& s : g.states) j["states"].push_back(display(s));
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges)
    j["edges"].push_back({{"from", e.from}, {"label", to_string(e.label)}, {"to", e.to}});
  j["initial"] = g.initial;
  j["truncated"] = g.truncated;
  return j;
}

}  // namespace mps
