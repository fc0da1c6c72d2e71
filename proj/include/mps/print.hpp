#pragma once

#include <map>
#include <optional>
#include <string>

#include "mps/parse.hpp"
#include "mps/session.hpp"
#include "mps/term.hpp"

namespace mps {

// Declaration text whose first definition (named `root_name`) resolves to a
// graph bisimilar to `node`. Cycle entry points become extra definitions
// named `root_name_1`, `root_name_2`, ...
std::string pretty_print(const ProcessNode* node, const std::string& root_name = "X");
std::string pretty_print(const GlobalNode* node, const std::string& root_name = "X");

// One-line inline rendering for diagnostics and state labels. Cycles are cut
// with #k markers; not meant to be parsed back.
std::string display(const ProcessNode* node);
std::string display(const GlobalNode* node);
std::string display(const Session& s);

// The whole module, one declaration per line, in declaration order.
std::string render_module(const Module& m);

// Trace literals as used on the command line: p>q!t for outputs, p<q?t for
// inputs, joined by commas.
std::string to_literal(const Trace& t);
std::optional<CommLabel> parse_label_literal(const std::string& text);
Trace parse_trace_literal(const std::string& text);  // throws std::runtime_error

}  // namespace mps
