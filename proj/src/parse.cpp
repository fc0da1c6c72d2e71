#include "mps/parse.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace mps {

std::string to_string(ResolveIssue issue) {
  switch (issue) {
    case ResolveIssue::UndefinedName: return "UndefinedName";
    case ResolveIssue::UnguardedRecursion: return "UnguardedRecursion";
    case ResolveIssue::DistinctPrefixViolation: return "DistinctPrefixViolation";
    case ResolveIssue::DuplicateGlobalLabel: return "DuplicateGlobalLabel";
    case ResolveIssue::DuplicateDefinition: return "DuplicateDefinition";
  }
  return "UnknownIssue";
}

namespace {

enum class Tok {
  Name,
  KwParticipant,
  KwGlobal,
  KwSession,
  KwWith,
  KwEnd,    // end
  KwEndG,   // End
  Eq,
  Dot,
  Plus,
  Bang,
  Query,
  LParen,
  RParen,
  DoubleColon,
  DoublePipe,
  LBracket,
  RBracket,
  Lt,
  Gt,
  Comma,
  Eof,
};

struct Token {
  Tok type = Tok::Eof;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  Token next() {
    skip_blank();
    SourcePos pos{line_, col_};
    if (at_end()) return {Tok::Eof, "", pos};
    char c = peek();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::string word;
      while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
        word.push_back(take());
      if (word == "participant") return {Tok::KwParticipant, word, pos};
      if (word == "global") return {Tok::KwGlobal, word, pos};
      if (word == "session") return {Tok::KwSession, word, pos};
      if (word == "with") return {Tok::KwWith, word, pos};
      if (word == "end") return {Tok::KwEnd, word, pos};
      if (word == "End") return {Tok::KwEndG, word, pos};
      return {Tok::Name, word, pos};
    }
    take();
    switch (c) {
      case '=': return {Tok::Eq, "=", pos};
      case '.': return {Tok::Dot, ".", pos};
      case '+': return {Tok::Plus, "+", pos};
      case '!': return {Tok::Bang, "!", pos};
      case '?': return {Tok::Query, "?", pos};
      case '(': return {Tok::LParen, "(", pos};
      case ')': return {Tok::RParen, ")", pos};
      case '[': return {Tok::LBracket, "[", pos};
      case ']': return {Tok::RBracket, "]", pos};
      case '<': return {Tok::Lt, "<", pos};
      case '>': return {Tok::Gt, ">", pos};
      case ',': return {Tok::Comma, ",", pos};
      case ':':
        if (!at_end() && peek() == ':') {
          take();
          return {Tok::DoubleColon, "::", pos};
        }
        throw ParseError("expected '::'", pos);
      case '|':
        if (!at_end() && peek() == '|') {
          take();
          return {Tok::DoublePipe, "||", pos};
        }
        throw ParseError("expected '||'", pos);
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }
  }

 private:
  bool at_end() const { return i_ >= text_.size(); }
  char peek() const { return text_[i_]; }
  char take() {
    char c = text_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  void skip_blank() {
    while (!at_end()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        take();
      } else if (peek() == '#') {
        while (!at_end() && peek() != '\n') take();
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) { advance(); }

  Program parse() {
    Program program;
    std::set<std::string> proc_names, global_names, session_names;
    while (cur_.type != Tok::Eof) {
      switch (cur_.type) {
        case Tok::KwParticipant: {
          advance();
          auto pos = cur_.pos;
          std::string name = expect_name();
          expect(Tok::Eq, "'='");
          auto body = parse_proc();
          if (!proc_names.insert(name).second)
            throw ResolveError(ResolveIssue::DuplicateDefinition, "participant " + name);
          program.processes.push_back({name, body, pos});
          break;
        }
        case Tok::KwGlobal: {
          advance();
          auto pos = cur_.pos;
          std::string name = expect_name();
          expect(Tok::Eq, "'='");
          auto body = parse_gtype();
          if (!global_names.insert(name).second)
            throw ResolveError(ResolveIssue::DuplicateDefinition, "global " + name);
          program.globals.push_back({name, body, pos});
          break;
        }
        case Tok::KwSession: {
          advance();
          auto pos = cur_.pos;
          std::string name = expect_name();
          expect(Tok::Eq, "'='");
          SessionDef def;
          def.name = name;
          def.pos = pos;
          def.bindings.push_back(parse_binding());
          while (accept(Tok::DoublePipe)) def.bindings.push_back(parse_binding());
          expect(Tok::KwWith, "'with'");
          def.queue = parse_queue();
          if (!session_names.insert(name).second)
            throw ResolveError(ResolveIssue::DuplicateDefinition, "session " + name);
          program.sessions.push_back(std::move(def));
          break;
        }
        default:
          throw ParseError("expected 'participant', 'global' or 'session'", cur_.pos);
      }
    }
    return program;
  }

 private:
  void advance() { cur_ = lexer_.next(); }

  bool accept(Tok t) {
    if (cur_.type != t) return false;
    advance();
    return true;
  }

  void expect(Tok t, const std::string& what) {
    if (cur_.type != t) throw ParseError("expected " + what, cur_.pos);
    advance();
  }

  std::string expect_name() {
    if (cur_.type != Tok::Name) throw ParseError("expected identifier", cur_.pos);
    std::string name = cur_.text;
    advance();
    return name;
  }

  // proc := "end" | NAME | sum, with parentheses grouping sums and '+'
  // joining prefixed branches only.
  ProcExprPtr parse_proc() {
    auto first = parse_proc_term();
    if (cur_.type != Tok::Plus) return first;
    auto sum = std::make_shared<ProcExpr>();
    sum->kind = ProcExpr::Kind::Sum;
    sum->pos = first->pos;
    sum->branches.push_back(single_branch(*first));
    while (accept(Tok::Plus)) {
      auto term = parse_proc_term();
      sum->branches.push_back(single_branch(*term));
    }
    return sum;
  }

  ProcBranchExpr single_branch(const ProcExpr& e) {
    if (e.kind != ProcExpr::Kind::Sum || e.branches.size() != 1)
      throw ParseError("a summand must be a prefixed branch", e.pos);
    return e.branches.front();
  }

  ProcExprPtr parse_proc_term() {
    SourcePos pos = cur_.pos;
    if (accept(Tok::KwEnd)) {
      auto e = std::make_shared<ProcExpr>();
      e->pos = pos;
      return e;
    }
    if (accept(Tok::LParen)) {
      auto e = parse_proc();
      expect(Tok::RParen, "')'");
      return e;
    }
    std::string name = expect_name();
    if (cur_.type == Tok::Bang || cur_.type == Tok::Query) {
      ActionKind kind = cur_.type == Tok::Bang ? ActionKind::Output : ActionKind::Input;
      advance();
      std::string tag = expect_name();
      expect(Tok::Dot, "'.'");
      auto cont = parse_proc_term();
      auto e = std::make_shared<ProcExpr>();
      e->kind = ProcExpr::Kind::Sum;
      e->pos = pos;
      e->branches.push_back({ActionPrefix{kind, Participant{name}, Tag{tag}}, cont});
      return e;
    }
    auto e = std::make_shared<ProcExpr>();
    e->kind = ProcExpr::Kind::Name;
    e->name = name;
    e->pos = pos;
    return e;
  }

  GlobalExprPtr parse_gtype() {
    auto first = parse_gtype_term();
    if (cur_.type != Tok::Plus) return first;
    auto sum = std::make_shared<GlobalExpr>();
    sum->kind = GlobalExpr::Kind::Sum;
    sum->pos = first->pos;
    sum->branches.push_back(single_gbranch(*first));
    while (accept(Tok::Plus)) {
      auto term = parse_gtype_term();
      sum->branches.push_back(single_gbranch(*term));
    }
    return sum;
  }

  GlobalBranchExpr single_gbranch(const GlobalExpr& e) {
    if (e.kind != GlobalExpr::Kind::Sum || e.branches.size() != 1)
      throw ParseError("a summand must be a labelled branch", e.pos);
    return e.branches.front();
  }

  GlobalExprPtr parse_gtype_term() {
    SourcePos pos = cur_.pos;
    if (accept(Tok::KwEndG)) {
      auto e = std::make_shared<GlobalExpr>();
      e->pos = pos;
      return e;
    }
    if (accept(Tok::LParen)) {
      auto e = parse_gtype();
      expect(Tok::RParen, "')'");
      return e;
    }
    std::string player = expect_name();
    if (cur_.type != Tok::Name) {
      auto e = std::make_shared<GlobalExpr>();
      e->kind = GlobalExpr::Kind::Name;
      e->name = player;
      e->pos = pos;
      return e;
    }
    std::string partner = expect_name();
    ActionKind kind;
    if (accept(Tok::Bang)) {
      kind = ActionKind::Output;
    } else if (accept(Tok::Query)) {
      kind = ActionKind::Input;
    } else {
      throw ParseError("expected '!' or '?'", cur_.pos);
    }
    std::string tag = expect_name();
    expect(Tok::Dot, "'.'");
    auto cont = parse_gtype_term();
    auto e = std::make_shared<GlobalExpr>();
    e->kind = GlobalExpr::Kind::Sum;
    e->pos = pos;
    e->branches.push_back(
        {CommLabel{kind, Participant{player}, Participant{partner}, Tag{tag}}, cont});
    return e;
  }

  std::pair<std::string, ProcExprPtr> parse_binding() {
    std::string participant = expect_name();
    expect(Tok::DoubleColon, "'::'");
    return {participant, parse_proc()};
  }

  std::vector<Message> parse_queue() {
    expect(Tok::LBracket, "'['");
    std::vector<Message> msgs;
    if (accept(Tok::RBracket)) return msgs;
    msgs.push_back(parse_message());
    while (accept(Tok::Comma)) msgs.push_back(parse_message());
    expect(Tok::RBracket, "']'");
    return msgs;
  }

  Message parse_message() {
    expect(Tok::Lt, "'<'");
    std::string sender = expect_name();
    expect(Tok::Comma, "','");
    std::string tag = expect_name();
    expect(Tok::Comma, "','");
    std::string receiver = expect_name();
    expect(Tok::Gt, "'>'");
    return Message{Participant{sender}, Tag{tag}, Participant{receiver}};
  }

  Lexer lexer_;
  Token cur_;
};

// Ties surface definitions into one arena. Named sums get a node up front
// so recursive references can point at it; alias chains (NAME = NAME) are
// followed and must eventually hit a guarded body.
class Resolver {
 public:
  explicit Resolver(const Program& program) : program_(program) {
    for (const auto& d : program.processes) proc_defs_[d.name] = &d;
    for (const auto& d : program.globals) global_defs_[d.name] = &d;
  }

  Module run() {
    Module m;
    auto arena = std::make_shared<TermArena>();
    arena_ = arena.get();

    for (const auto& d : program_.processes)
      if (d.body->kind == ProcExpr::Kind::Sum) proc_placeholders_[d.name] = arena_->make_process();
    for (const auto& d : program_.globals)
      if (d.body->kind == GlobalExpr::Kind::Sum)
        global_placeholders_[d.name] = arena_->make_global();

    for (const auto& d : program_.processes) {
      std::set<std::string> visiting;
      resolve_proc_name(d.name, visiting);
    }
    for (const auto& d : program_.globals) {
      std::set<std::string> visiting;
      resolve_global_name(d.name, visiting);
    }

    for (const auto& d : program_.processes) {
      if (d.body->kind != ProcExpr::Kind::Sum) continue;
      fill_proc(proc_placeholders_.at(d.name), *d.body);
    }
    for (const auto& d : program_.globals) {
      if (d.body->kind != GlobalExpr::Kind::Sum) continue;
      fill_global(global_placeholders_.at(d.name), *d.body);
    }

    for (const auto& d : program_.processes) {
      m.processes[d.name] = Process{arena, proc_resolved_.at(d.name)};
      m.process_order.push_back(d.name);
    }
    for (const auto& d : program_.globals) {
      m.globals[d.name] = Global{arena, global_resolved_.at(d.name)};
      m.global_order.push_back(d.name);
    }
    for (const auto& d : program_.sessions) {
      Session s;
      s.arena = arena;
      std::set<std::string> bound;
      for (const auto& [participant, body] : d.bindings) {
        if (!bound.insert(participant).second)
          throw ResolveError(ResolveIssue::DuplicateDefinition,
                             "participant " + participant + " bound twice in session " + d.name);
        const ProcessNode* node = resolve_proc_expr(*body);
        if (node->terminated()) continue;  // p::0 is dropped by congruence
        s.network[Participant{participant}] = node;
      }
      for (const auto& msg : d.queue) s.queue.push(msg);
      m.sessions[d.name] = std::move(s);
      m.session_order.push_back(d.name);
    }

    validate();
    m.arena = std::move(arena);
    return m;
  }

 private:
  const ProcessNode* resolve_proc_name(const std::string& name, std::set<std::string>& visiting) {
    if (auto it = proc_resolved_.find(name); it != proc_resolved_.end()) return it->second;
    auto def = proc_defs_.find(name);
    if (def == proc_defs_.end())
      throw ResolveError(ResolveIssue::UndefinedName, "participant " + name);
    if (!visiting.insert(name).second)
      throw ResolveError(ResolveIssue::UnguardedRecursion, "participant " + name);
    const ProcessNode* node = nullptr;
    switch (def->second->body->kind) {
      case ProcExpr::Kind::End: node = arena_->terminated(); break;
      case ProcExpr::Kind::Name: node = resolve_proc_name(def->second->body->name, visiting); break;
      case ProcExpr::Kind::Sum: node = proc_placeholders_.at(name); break;
    }
    visiting.erase(name);
    proc_resolved_[name] = node;
    return node;
  }

  const GlobalNode* resolve_global_name(const std::string& name, std::set<std::string>& visiting) {
    if (auto it = global_resolved_.find(name); it != global_resolved_.end()) return it->second;
    auto def = global_defs_.find(name);
    if (def == global_defs_.end()) throw ResolveError(ResolveIssue::UndefinedName, "global " + name);
    if (!visiting.insert(name).second)
      throw ResolveError(ResolveIssue::UnguardedRecursion, "global " + name);
    const GlobalNode* node = nullptr;
    switch (def->second->body->kind) {
      case GlobalExpr::Kind::End: node = arena_->end_node(); break;
      case GlobalExpr::Kind::Name:
        node = resolve_global_name(def->second->body->name, visiting);
        break;
      case GlobalExpr::Kind::Sum: node = global_placeholders_.at(name); break;
    }
    visiting.erase(name);
    global_resolved_[name] = node;
    return node;
  }

  const ProcessNode* resolve_proc_expr(const ProcExpr& e) {
    switch (e.kind) {
      case ProcExpr::Kind::End: return arena_->terminated();
      case ProcExpr::Kind::Name: {
        std::set<std::string> visiting;
        return resolve_proc_name(e.name, visiting);
      }
      case ProcExpr::Kind::Sum: {
        ProcessNode* node = arena_->make_process();
        fill_proc(node, e);
        return node;
      }
    }
    return nullptr;
  }

  const GlobalNode* resolve_global_expr(const GlobalExpr& e) {
    switch (e.kind) {
      case GlobalExpr::Kind::End: return arena_->end_node();
      case GlobalExpr::Kind::Name: {
        std::set<std::string> visiting;
        return resolve_global_name(e.name, visiting);
      }
      case GlobalExpr::Kind::Sum: {
        GlobalNode* node = arena_->make_global();
        fill_global(node, e);
        return node;
      }
    }
    return nullptr;
  }

  void fill_proc(ProcessNode* node, const ProcExpr& e) {
    created_procs_.push_back(node);
    for (const auto& b : e.branches)
      node->branches.push_back(ProcessBranch{b.prefix, resolve_proc_expr(*b.cont)});
  }

  void fill_global(GlobalNode* node, const GlobalExpr& e) {
    created_globals_.push_back(node);
    for (const auto& b : e.branches)
      node->branches.push_back(GlobalBranch{b.label, resolve_global_expr(*b.cont)});
  }

  void validate() const {
    for (const ProcessNode* n : created_procs_) {
      std::set<ActionPrefix> seen;
      for (const auto& b : n->branches)
        if (!seen.insert(b.prefix).second)
          throw ResolveError(ResolveIssue::DistinctPrefixViolation,
                             "prefix " + to_string(b.prefix) + " repeated in one choice");
    }
    for (const GlobalNode* n : created_globals_) {
      std::set<CommLabel> seen;
      for (const auto& b : n->branches)
        if (!seen.insert(b.label).second)
          throw ResolveError(ResolveIssue::DuplicateGlobalLabel,
                             "label " + to_string(b.label) + " repeated in one choice");
    }
  }

  const Program& program_;
  TermArena* arena_ = nullptr;
  std::map<std::string, const ProcDef*> proc_defs_;
  std::map<std::string, const GlobalDef*> global_defs_;
  std::map<std::string, const ProcessNode*> proc_resolved_;
  std::map<std::string, const GlobalNode*> global_resolved_;
  std::map<std::string, ProcessNode*> proc_placeholders_;
  std::map<std::string, GlobalNode*> global_placeholders_;
  std::vector<const ProcessNode*> created_procs_;
  std::vector<const GlobalNode*> created_globals_;
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).parse(); }

Module resolve(const Program& program) { return Resolver(program).run(); }

Module load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return resolve(parse_program(buf.str()));
}

Corpus load_corpus(const std::string& dir) {
  Corpus corpus;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".mps") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    try {
      corpus.modules[path.filename().string()] = load_file(path.string());
    } catch (const std::exception& e) {
      corpus.errors.push_back({path.filename().string(), e.what()});
    }
  }
  return corpus;
}

}  // namespace mps
