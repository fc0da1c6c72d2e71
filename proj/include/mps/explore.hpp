#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "mps/session.hpp"

namespace mps {

struct ExploreBounds {
  std::size_t max_states = 100000;
  std::size_t max_queue = 8;  // per-channel message limit
};

// The reachable fragment of the session transition system, explored
// breadth-first over canonical states. States are stored in discovery
// order, so repeated runs produce identical graphs.
struct StateGraph {
  struct Edge {
    std::size_t from;
    CommLabel label;
    std::size_t to;
    auto operator<=>(const Edge&) const = default;
  };

  std::vector<Session> states;
  std::vector<Edge> edges;
  std::size_t initial = 0;
  std::set<std::size_t> truncated;  // states with successors cut by a bound

  std::vector<std::vector<std::size_t>> out_edges() const;  // edge ids per state
  std::vector<std::vector<std::size_t>> in_edges() const;

  // Shortest label path from the initial state, following the BFS tree.
  Trace trace_to(std::size_t state) const;

  bool same_shape(const StateGraph& other) const {
    return states == other.states && edges == other.edges && initial == other.initial &&
           truncated == other.truncated;
  }
};

StateGraph explore(const Session& s, const ExploreBounds& bounds = {});

std::string to_dot(const StateGraph& g);
nlohmann::json to_json(const StateGraph& g);

}  // namespace mps
