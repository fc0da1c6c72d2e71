#include "mps/print.hpp"

#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace mps {

namespace {

template <class Node>
struct Syntax;

template <>
struct Syntax<ProcessNode> {
  static constexpr const char* keyword = "participant";
  static constexpr const char* end_text = "end";
  static std::string key_text(const ProcessBranch& b) { return to_string(b.prefix); }
  static const ProcessNode* target(const ProcessBranch& b) { return b.target; }
};

template <>
struct Syntax<GlobalNode> {
  static constexpr const char* keyword = "global";
  static constexpr const char* end_text = "End";
  static std::string key_text(const GlobalBranch& b) {
    const auto& l = b.label;
    return l.player.name + " " + l.partner.name + (l.is_output() ? "!" : "?") + l.tag.name;
  }
  static const GlobalNode* target(const GlobalBranch& b) { return b.target; }
};

// Nodes revisited while still on the DFS path; these are the entry points
// of cycles and must be cut, either by a named definition (pretty_print) or
// by a #k marker (display).
template <class Node>
std::set<const Node*> back_edge_targets(const Node* root) {
  std::set<const Node*> targets, visited, on_path;
  std::function<void(const Node*)> dfs = [&](const Node* n) {
    if (visited.count(n)) {
      if (on_path.count(n)) targets.insert(n);
      return;
    }
    visited.insert(n);
    on_path.insert(n);
    for (const auto& b : n->branches) dfs(Syntax<Node>::target(b));
    on_path.erase(n);
  };
  dfs(root);
  return targets;
}

template <class Node>
std::string render_branches(const Node* n, const std::map<const Node*, std::string>& names,
                            bool parenthesize);

template <class Node>
std::string render_cont(const Node* n, const std::map<const Node*, std::string>& names) {
  if (auto it = names.find(n); it != names.end()) return it->second;
  if (n->branches.empty()) return Syntax<Node>::end_text;
  return render_branches(n, names, n->branches.size() > 1);
}

template <class Node>
std::string render_branches(const Node* n, const std::map<const Node*, std::string>& names,
                            bool parenthesize) {
  std::string out;
  if (parenthesize) out += "(";
  bool first = true;
  for (const auto& b : n->branches) {
    if (!first) out += " + ";
    out += Syntax<Node>::key_text(b) + " . " + render_cont(Syntax<Node>::target(b), names);
    first = false;
  }
  if (parenthesize) out += ")";
  return out;
}

template <class Node>
std::string pretty_impl(const Node* root, const std::string& root_name) {
  auto cycles = back_edge_targets(root);
  std::map<const Node*, std::string> names;
  names[root] = root_name;
  std::vector<const Node*> named_order{root};
  std::size_t k = 0;
  for (const Node* n : reachable_nodes(root)) {
    if (n == root || !cycles.count(n)) continue;
    names[n] = root_name + "_" + std::to_string(++k);
    named_order.push_back(n);
  }
  // Body rendering starts below the definition head, so references back to
  // a named node (including the one being defined) print as its name.
  std::string out;
  for (const Node* n : named_order) {
    std::string body = n->branches.empty() ? Syntax<Node>::end_text
                                           : render_branches(n, names, false);
    out += std::string(Syntax<Node>::keyword) + " " + names.at(n) + " = " + body + "\n";
  }
  return out;
}

template <class Node>
std::string display_impl(const Node* root) {
  auto cycles = back_edge_targets(root);
  std::map<const Node*, std::string> markers;
  std::size_t k = 0;
  for (const Node* n : reachable_nodes(root))
    if (cycles.count(n)) markers[n] = "#" + std::to_string(++k);

  std::set<const Node*> opened;
  std::function<std::string(const Node*, bool)> rec = [&](const Node* n,
                                                          bool parens) -> std::string {
    if (n->branches.empty()) return Syntax<Node>::end_text;
    auto it = markers.find(n);
    if (it != markers.end()) {
      if (opened.count(n)) return it->second;
      opened.insert(n);
      std::string out = it->second + ":(";
      bool first = true;
      for (const auto& b : n->branches) {
        if (!first) out += " + ";
        out += Syntax<Node>::key_text(b) + " . " + rec(Syntax<Node>::target(b), true);
        first = false;
      }
      return out + ")";
    }
    std::string out;
    if (parens && n->branches.size() > 1) out += "(";
    bool first = true;
    for (const auto& b : n->branches) {
      if (!first) out += " + ";
      out += Syntax<Node>::key_text(b) + " . " + rec(Syntax<Node>::target(b), true);
      first = false;
    }
    if (parens && n->branches.size() > 1) out += ")";
    return out;
  };
  return rec(root, false);
}

}  // namespace

std::string pretty_print(const ProcessNode* node, const std::string& root_name) {
  return pretty_impl(node, root_name);
}

std::string pretty_print(const GlobalNode* node, const std::string& root_name) {
  return pretty_impl(node, root_name);
}

std::string display(const ProcessNode* node) { return display_impl(node); }
std::string display(const GlobalNode* node) { return display_impl(node); }

std::string display(const Session& s) {
  std::string out;
  if (s.network.empty()) {
    out = "(final)";
  } else {
    bool first = true;
    for (const auto& [p, proc] : s.network) {
      if (!first) out += " || ";
      out += p.name + " :: " + display(proc);
      first = false;
    }
  }
  return out + " with " + to_string(s.queue);
}

std::string render_module(const Module& m) {
  std::string out;
  std::map<const ProcessNode*, std::string> pnames;
  std::map<const GlobalNode*, std::string> gnames;
  for (const auto& name : m.process_order) pnames.try_emplace(m.processes.at(name).node, name);
  for (const auto& name : m.global_order) gnames.try_emplace(m.globals.at(name).node, name);

  for (const auto& name : m.process_order) {
    const ProcessNode* n = m.processes.at(name).node;
    std::string body;
    if (pnames.at(n) != name) {
      body = pnames.at(n);  // alias of an earlier definition
    } else if (n->terminated()) {
      body = "end";
    } else {
      body = render_branches(n, pnames, false);
    }
    out += "participant " + name + " = " + body + "\n";
  }
  for (const auto& name : m.global_order) {
    const GlobalNode* n = m.globals.at(name).node;
    std::string body;
    if (gnames.at(n) != name) {
      body = gnames.at(n);
    } else if (n->is_end()) {
      body = "End";
    } else {
      body = render_branches(n, gnames, false);
    }
    out += "global " + name + " = " + body + "\n";
  }
  for (const auto& name : m.session_order) {
    const Session& s = m.sessions.at(name);
    std::string net;
    if (s.network.empty()) {
      net = "(final)";
    } else {
      bool first = true;
      for (const auto& [p, proc] : s.network) {
        if (!first) net += " || ";
        auto it = pnames.find(proc);
        // Inline processes cannot be cyclic on their own (cycles go through
        // names), so cutting at named nodes always terminates.
        net += p.name + " :: " + (it != pnames.end() ? it->second : render_branches(proc, pnames, false));
        first = false;
      }
    }
    out += "session " + name + " = " + net + " with " + to_string(s.queue) + "\n";
  }
  return out;
}

std::string to_literal(const Trace& t) {
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ",";
    out += to_string(t[i]);
  }
  return out;
}

namespace {

bool valid_ident(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

std::optional<CommLabel> parse_label_literal(const std::string& text) {
  auto out_pos = text.find('>');
  auto in_pos = text.find('<');
  ActionKind kind;
  std::size_t sep;
  char action;
  if (out_pos != std::string::npos && in_pos == std::string::npos) {
    kind = ActionKind::Output;
    sep = out_pos;
    action = '!';
  } else if (in_pos != std::string::npos && out_pos == std::string::npos) {
    kind = ActionKind::Input;
    sep = in_pos;
    action = '?';
  } else {
    return std::nullopt;
  }
  auto act_pos = text.find(action, sep + 1);
  if (act_pos == std::string::npos) return std::nullopt;
  std::string player = text.substr(0, sep);
  std::string partner = text.substr(sep + 1, act_pos - sep - 1);
  std::string tag = text.substr(act_pos + 1);
  if (!valid_ident(player) || !valid_ident(partner) || !valid_ident(tag)) return std::nullopt;
  return CommLabel{kind, Participant{player}, Participant{partner}, Tag{tag}};
}

Trace parse_trace_literal(const std::string& text) {
  Trace trace;
  std::string item;
  std::stringstream in(text);
  while (std::getline(in, item, ',')) {
    auto begin = item.find_first_not_of(" \t");
    auto end = item.find_last_not_of(" \t");
    if (begin == std::string::npos) continue;
    item = item.substr(begin, end - begin + 1);
    auto label = parse_label_literal(item);
    if (!label) throw std::runtime_error("bad label literal '" + item + "'");
    trace.push_back(*label);
  }
  return trace;
}

}  // namespace mps
