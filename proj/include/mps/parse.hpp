#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mps/session.hpp"
#include "mps/term.hpp"

namespace mps {

struct SourcePos {
  int line = 0;
  int column = 0;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, SourcePos pos)
      : std::runtime_error(msg + " at " + std::to_string(pos.line) + ":" +
                           std::to_string(pos.column)),
        pos_(pos) {}
  SourcePos pos() const { return pos_; }

 private:
  SourcePos pos_;
};

enum class ResolveIssue {
  UndefinedName,
  UnguardedRecursion,
  DistinctPrefixViolation,
  DuplicateGlobalLabel,
  DuplicateDefinition,
};

std::string to_string(ResolveIssue issue);

class ResolveError : public std::runtime_error {
 public:
  ResolveError(ResolveIssue issue, const std::string& msg)
      : std::runtime_error(to_string(issue) + ": " + msg), issue_(issue) {}
  ResolveIssue issue() const { return issue_; }

 private:
  ResolveIssue issue_;
};

// Surface terms as written, before names are tied into graphs.
struct ProcExpr;
using ProcExprPtr = std::shared_ptr<const ProcExpr>;

struct ProcBranchExpr {
  ActionPrefix prefix;
  ProcExprPtr cont;
};

struct ProcExpr {
  enum class Kind { End, Name, Sum };
  Kind kind = Kind::End;
  std::string name;                      // Kind::Name
  std::vector<ProcBranchExpr> branches;  // Kind::Sum
  SourcePos pos;
};

struct GlobalExpr;
using GlobalExprPtr = std::shared_ptr<const GlobalExpr>;

struct GlobalBranchExpr {
  CommLabel label;
  GlobalExprPtr cont;
};

struct GlobalExpr {
  enum class Kind { End, Name, Sum };
  Kind kind = Kind::End;
  std::string name;
  std::vector<GlobalBranchExpr> branches;
  SourcePos pos;
};

struct ProcDef {
  std::string name;
  ProcExprPtr body;
  SourcePos pos;
};

struct GlobalDef {
  std::string name;
  GlobalExprPtr body;
  SourcePos pos;
};

struct SessionDef {
  std::string name;
  std::vector<std::pair<std::string, ProcExprPtr>> bindings;
  std::vector<Message> queue;
  SourcePos pos;
};

struct Program {
  std::vector<ProcDef> processes;
  std::vector<GlobalDef> globals;
  std::vector<SessionDef> sessions;
};

// Parses the declaration language. Throws ParseError on malformed input and
// ResolveError{DuplicateDefinition} when a name is declared twice.
Program parse_program(std::string_view text);

// Named graphs obtained by tying all surface references.
struct Module {
  std::shared_ptr<const TermArena> arena;
  std::map<std::string, Process> processes;
  std::map<std::string, Global> globals;
  std::map<std::string, Session> sessions;
  std::vector<std::string> process_order;
  std::vector<std::string> global_order;
  std::vector<std::string> session_order;
};

// Resolves every definition into nodes of one finite cyclic graph and
// validates the term invariants. Throws ResolveError.
Module resolve(const Program& program);

Module load_file(const std::string& path);

struct CorpusDiagnostic {
  std::string file;
  std::string message;
};

struct Corpus {
  std::map<std::string, Module> modules;  // keyed by file name
  std::vector<CorpusDiagnostic> errors;
};

// Parses and resolves every .mps file in a directory, aggregating per-file
// diagnostics instead of failing on the first bad file.
Corpus load_corpus(const std::string& dir);

}  // namespace mps
