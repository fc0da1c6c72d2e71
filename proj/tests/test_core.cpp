#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cstdlib>
#include <map>
#include <random>
#include <set>

#include "doctest.h"
#include "mps/generate.hpp"
#include "mps/parse.hpp"
#include "mps/print.hpp"
#include "mps/term.hpp"

using namespace mps;

namespace {

Module mod(const std::string& text) { return resolve(parse_program(text)); }

// Independent equality oracle: greatest fixpoint by eliminating pairs from
// the full product until only consistent pairs remain.
template <class Node, class KeyOf, class TargetOf>
bool oracle_bisim_impl(const Node* a, const Node* b, KeyOf key_of, TargetOf target_of) {
  std::set<const Node*> nodes;
  for (const Node* n : reachable_nodes(a)) nodes.insert(n);
  for (const Node* n : reachable_nodes(b)) nodes.insert(n);
  std::set<std::pair<const Node*, const Node*>> related;
  for (const Node* x : nodes)
    for (const Node* y : nodes) related.insert({x, y});

  auto consistent = [&](const Node* x, const Node* y) {
    auto xs = x->branches;
    auto ys = y->branches;
    if (xs.size() != ys.size()) return false;
    auto cmp = [&](const auto& l, const auto& r) { return key_of(l) < key_of(r); };
    std::sort(xs.begin(), xs.end(), cmp);
    std::sort(ys.begin(), ys.end(), cmp);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!(key_of(xs[i]) == key_of(ys[i]))) return false;
      if (!related.count({target_of(xs[i]), target_of(ys[i])})) return false;
    }
    return true;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = related.begin(); it != related.end();) {
      if (!consistent(it->first, it->second)) {
        it = related.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  return related.count({a, b}) != 0;
}

bool oracle_bisim(const ProcessNode* a, const ProcessNode* b) {
  return oracle_bisim_impl(
      a, b, [](const ProcessBranch& x) { return x.prefix; },
      [](const ProcessBranch& x) { return x.target; });
}

bool oracle_bisim(const GlobalNode* a, const GlobalNode* b) {
  return oracle_bisim_impl(
      a, b, [](const GlobalBranch& x) { return x.label; },
      [](const GlobalBranch& x) { return x.target; });
}

// Independent fixpoint oracle for capabilities: Kleene iteration over the
// per-node equations instead of an edge scan.
std::set<CommLabel> oracle_capabilities(const GlobalNode* g) {
  auto nodes = reachable_nodes(g);
  std::map<const GlobalNode*, std::set<CommLabel>> cp;
  for (const GlobalNode* n : nodes) cp[n] = {};
  bool changed = true;
  while (changed) {
    changed = false;
    for (const GlobalNode* n : nodes) {
      std::set<CommLabel> next;
      for (const auto& b : n->branches) {
        next.insert(b.label);
        const auto& sub = cp[b.target];
        next.insert(sub.begin(), sub.end());
      }
      if (next != cp[n]) {
        cp[n] = std::move(next);
        changed = true;
      }
    }
  }
  return cp[g];
}

std::set<Participant> oracle_players(const GlobalNode* g) {
  std::set<Participant> out;
  for (const auto& label : oracle_capabilities(g)) out.insert(label.player);
  return out;
}

Process copy_shuffled(const Process& p, std::mt19937_64& rng) {
  auto arena = std::make_shared<TermArena>();
  std::map<const ProcessNode*, ProcessNode*> copy;
  for (const ProcessNode* n : reachable_nodes(p.node))
    if (!n->terminated()) copy[n] = arena->make_process();
  for (auto& [orig, fresh] : copy) {
    for (const auto& b : orig->branches) {
      const ProcessNode* t =
          b.target->terminated() ? arena->terminated() : copy.at(b.target);
      fresh->branches.push_back(ProcessBranch{b.prefix, t});
    }
    std::shuffle(fresh->branches.begin(), fresh->branches.end(), rng);
  }
  const ProcessNode* root = p.node->terminated() ? arena->terminated() : copy.at(p.node);
  return Process{std::move(arena), root};
}

// A copy whose root is duplicated: one unfolding step of the regular term.
Process unroll_root(const Process& p) {
  auto arena = std::make_shared<TermArena>();
  arena->retain(p.arena);
  if (p.node->terminated()) {
    const ProcessNode* t = arena->terminated();
    return Process{std::move(arena), t};
  }
  ProcessNode* root = arena->make_process();
  root->branches = p.node->branches;
  return Process{std::move(arena), root};
}

}  // namespace

TEST_CASE("parsing the surface language") {
  SUBCASE("terminated participant") {
    auto m = mod("participant P = end");
    REQUIRE(m.processes.count("P"));
    CHECK(m.processes.at("P").node->terminated());
  }

  SUBCASE("client of the request/halt protocol") {
    auto m = mod("participant P = s!req . (s?res . P + s?halt . s?res . end)");
    const ProcessNode* p = m.processes.at("P").node;
    REQUIRE(p->branches.size() == 1);
    CHECK(p->branches[0].prefix ==
          ActionPrefix{ActionKind::Output, Participant{"s"}, Tag{"req"}});
    const ProcessNode* inner = p->branches[0].target;
    REQUIRE(inner->branches.size() == 2);
    CHECK(inner->branches[0].target == p);  // loop back to the definition
  }

  SUBCASE("repeated prefix in one choice is rejected") {
    CHECK_THROWS_AS(mod("participant P = s!req . (s?res . P + s?res . end)"), ResolveError);
    try {
      mod("participant P = s!req . (s?res . P + s?res . end)");
    } catch (const ResolveError& e) {
      CHECK(e.issue() == ResolveIssue::DistinctPrefixViolation);
    }
  }

  SUBCASE("duplicate definitions are rejected") {
    try {
      mod("participant P = end participant P = end");
      FAIL("expected an error");
    } catch (const ResolveError& e) {
      CHECK(e.issue() == ResolveIssue::DuplicateDefinition);
    }
  }

  SUBCASE("syntax errors carry a position") {
    try {
      mod("participant P = !");
      FAIL("expected an error");
    } catch (const ParseError& e) {
      CHECK(e.pos().line == 1);
      CHECK(e.pos().column > 0);
    }
  }

  SUBCASE("sessions with queues") {
    auto m = mod("participant P = q!l . end "
                 "session S = p :: P || q :: p?l . end with [<p, l, q>]");
    const Session& s = m.sessions.at("S");
    CHECK(s.network.size() == 2);
    CHECK(s.queue.head(Participant{"p"}, Participant{"q"}) == Tag{"l"});
  }
}

TEST_CASE("resolution of names into graphs") {
  SUBCASE("single-loop regular term") {
    auto m = mod("participant P = q!l . P");
    const ProcessNode* p = m.processes.at("P").node;
    REQUIRE(p->branches.size() == 1);
    CHECK(p->branches[0].target == p);
    CHECK(reachable_nodes(p).size() == 1);
  }

  SUBCASE("unguarded recursion") {
    try {
      mod("participant P = P");
      FAIL("expected an error");
    } catch (const ResolveError& e) {
      CHECK(e.issue() == ResolveIssue::UnguardedRecursion);
    }
    CHECK_THROWS_AS(mod("participant A = B participant B = A"), ResolveError);
  }

  SUBCASE("duplicate global label") {
    try {
      mod("global G = p q!l . G + p q!l . End");
      FAIL("expected an error");
    } catch (const ResolveError& e) {
      CHECK(e.issue() == ResolveIssue::DuplicateGlobalLabel);
    }
  }

  SUBCASE("undefined names") {
    try {
      mod("participant P = q!l . R");
      FAIL("expected an error");
    } catch (const ResolveError& e) {
      CHECK(e.issue() == ResolveIssue::UndefinedName);
    }
  }

  SUBCASE("aliases resolve to the same node") {
    auto m = mod("participant A = B participant B = q!l . B");
    CHECK(m.processes.at("A").node == m.processes.at("B").node);
  }

  SUBCASE("mutual recursion") {
    auto m = mod("participant A = q!l . B participant B = q!m . A");
    const ProcessNode* a = m.processes.at("A").node;
    CHECK(a->branches[0].target->branches[0].target == a);
  }
}

TEST_CASE("bisimulation equality of regular terms") {
  SUBCASE("terminated terms") {
    auto m = mod("participant P = end participant Q = end");
    CHECK(bisim_equal(m.processes.at("P").node, m.processes.at("Q").node));
  }

  SUBCASE("a loop and its unrolling") {
    auto m = mod("participant P = q!l . P participant P2 = q!l . q!l . P2");
    const ProcessNode* a = m.processes.at("P").node;
    const ProcessNode* b = m.processes.at("P2").node;
    CHECK(oracle_bisim(a, b));  // brute-force greatest fixpoint agrees
    CHECK(bisim_equal(a, b));
    CHECK(canonical_key(a) == canonical_key(b));
  }

  SUBCASE("commuted summands") {
    auto m = mod("participant P = q!l . end + r?m . end "
                 "participant Q = r?m . end + q!l . end");
    CHECK(bisim_equal(m.processes.at("P").node, m.processes.at("Q").node));
  }

  SUBCASE("distinct terms are told apart") {
    auto m = mod("participant P = q!l . P participant Q = q!l . end");
    CHECK_FALSE(bisim_equal(m.processes.at("P").node, m.processes.at("Q").node));
    CHECK_FALSE(oracle_bisim(m.processes.at("P").node, m.processes.at("Q").node));
  }

  SUBCASE("equivalence laws and oracle agreement on random terms") {
    SessionGenerator gen(7);
    std::mt19937_64 rng(11);
    for (int i = 0; i < 1000; ++i) {
      Process a = gen.random_process();
      Process b = copy_shuffled(a, rng);
      Process c = unroll_root(b);
      CHECK(bisim_equal(a.node, a.node));  // reflexive
      CHECK(bisim_equal(a.node, b.node));
      CHECK(bisim_equal(b.node, a.node));  // symmetric
      CHECK(bisim_equal(b.node, c.node));
      CHECK(bisim_equal(a.node, c.node));  // transitive across the chain
    }
    // Unrelated pairs: implementation, canonical form and the brute-force
    // oracle must all agree, whatever the answer; same for global types.
    for (int i = 0; i < 200; ++i) {
      Process a = gen.random_process();
      Process b = gen.random_process();
      bool expected = oracle_bisim(a.node, b.node);
      CHECK(bisim_equal(a.node, b.node) == expected);
      CHECK((canonical_key(a.node) == canonical_key(b.node)) == expected);

      Global ga = gen.random_global();
      Global gb = gen.random_global();
      bool gexpected = oracle_bisim(ga.node, gb.node);
      CHECK(bisim_equal(ga.node, gb.node) == gexpected);
      CHECK((canonical_key(ga.node) == canonical_key(gb.node)) == gexpected);
      CHECK(bisim_equal(ga.node, ga.node));
    }
  }
}

TEST_CASE("players of a global type") {
  SUBCASE("End has no players") {
    auto m = mod("global G = End");
    CHECK(players_of_global(m.globals.at("G").node).empty());
  }

  SUBCASE("request/halt protocol") {
    auto m = mod("global G = c s!req . ( s c?req . s c!res . c s?res . G"
                 " + s c!halt . c s?halt . s c?req . s c!res . c s?res . End )");
    auto expected = oracle_players(m.globals.at("G").node);
    CHECK(players_of_global(m.globals.at("G").node) == expected);
    CHECK(expected == std::set<Participant>{Participant{"c"}, Participant{"s"}});
  }

  SUBCASE("two-participant loop") {
    auto m = mod("global G = p q!l . q p?l . G");
    CHECK(players_of_global(m.globals.at("G").node) ==
          std::set<Participant>{Participant{"p"}, Participant{"q"}});
  }
}

TEST_CASE("capabilities of a global type") {
  SUBCASE("End") {
    auto m = mod("global G = End");
    CHECK(capabilities(m.globals.at("G").node).empty());
  }

  SUBCASE("looping exchange") {
    auto m = mod("global G = r s!l2 . s r?l2 . G");
    auto caps = capabilities(m.globals.at("G").node);
    CHECK(caps == std::set<CommLabel>{
                      output_label(Participant{"r"}, Participant{"s"}, Tag{"l2"}),
                      input_label(Participant{"s"}, Participant{"r"}, Tag{"l2"})});
  }

  SUBCASE("loop with an escape input") {
    auto m = mod("global G = p q!l . q p?l . G + p r?l . End");
    auto caps = capabilities(m.globals.at("G").node);
    CHECK(caps == std::set<CommLabel>{
                      output_label(Participant{"p"}, Participant{"q"}, Tag{"l"}),
                      input_label(Participant{"q"}, Participant{"p"}, Tag{"l"}),
                      input_label(Participant{"p"}, Participant{"r"}, Tag{"l"})});
    CHECK(caps == oracle_capabilities(m.globals.at("G").node));
  }

  SUBCASE("monotone over branches on random types") {
    SessionGenerator gen(23);
    for (int i = 0; i < 300; ++i) {
      Global g = gen.random_global();
      auto caps = capabilities(g.node);
      auto players = players_of_global(g.node);
      for (const auto& b : g.node->branches) {
        CHECK(caps.count(b.label));
        CHECK(players.count(b.label.player));
        for (const auto& sub : capabilities(b.target)) CHECK(caps.count(sub));
        for (const auto& sub : players_of_global(b.target)) CHECK(players.count(sub));
      }
      CHECK(caps == oracle_capabilities(g.node));
      CHECK(players == oracle_players(g.node));
    }
  }
}

TEST_CASE("pretty printing round-trips") {
  SUBCASE("terminated") {
    auto m = mod("participant P = end");
    std::string text = pretty_print(m.processes.at("P").node);
    auto m2 = mod(text);
    CHECK(m2.processes.at("X").node->terminated());
  }

  SUBCASE("loop gets a recursive name") {
    auto m = mod("participant P = q!l . P");
    std::string text = pretty_print(m.processes.at("P").node);
    auto m2 = mod(text);
    CHECK(bisim_equal(m.processes.at("P").node, m2.processes.at("X").node));
  }

  SUBCASE("server of the request/halt protocol") {
    auto m = mod("participant Q = c?req . c!res . Q + c!halt . c?req . c!res . end");
    std::string text = pretty_print(m.processes.at("Q").node);
    auto m2 = mod(text);
    CHECK(bisim_equal(m.processes.at("Q").node, m2.processes.at("X").node));
  }

  SUBCASE("global types round-trip too") {
    auto m = mod("global G = c s!req . ( s c?req . s c!res . c s?res . G"
                 " + s c!halt . c s?halt . s c?req . s c!res . c s?res . End )");
    std::string text = pretty_print(m.globals.at("G").node, "H");
    auto m2 = mod(text);
    CHECK(bisim_equal(m.globals.at("G").node, m2.globals.at("H").node));
  }

  SUBCASE("random regular terms round-trip") {
    SessionGenerator gen(41);
    for (int i = 0; i < 300; ++i) {
      Process p = gen.random_process();
      auto m = mod(pretty_print(p.node));
      CHECK(bisim_equal(p.node, m.processes.at("X").node));
      Global g = gen.random_global();
      auto mg = mod(pretty_print(g.node, "G0"));
      CHECK(bisim_equal(g.node, mg.globals.at("G0").node));
    }
  }
}

TEST_CASE("corpus loading") {
  SUBCASE("the shipped corpus resolves completely") {
    Corpus c = load_corpus(MPS_CORPUS_DIR);
    CHECK(c.errors.empty());
    std::size_t sessions = 0, globals = 0;
    for (const auto& [file, module] : c.modules) {
      sessions += module.sessions.size();
      globals += module.globals.size();
    }
    CHECK(sessions + globals >= 6);
  }

  SUBCASE("an empty directory yields an empty corpus") {
    REQUIRE(std::system("rm -rf /tmp/mps_empty_corpus && mkdir -p /tmp/mps_empty_corpus") == 0);
    Corpus c = load_corpus("/tmp/mps_empty_corpus");
    CHECK(c.modules.empty());
    CHECK(c.errors.empty());
  }

  SUBCASE("diagnostics name only the malformed file") {
    REQUIRE(std::system("rm -rf /tmp/mps_mixed_corpus && mkdir -p /tmp/mps_mixed_corpus") == 0);
    REQUIRE(std::system("printf 'participant P = end\\n' > /tmp/mps_mixed_corpus/good.mps") == 0);
    REQUIRE(std::system("printf 'participant = ??\\n' > /tmp/mps_mixed_corpus/bad.mps") == 0);
    Corpus c = load_corpus("/tmp/mps_mixed_corpus");
    CHECK(c.modules.size() == 1);
    CHECK(c.modules.count("good.mps"));
    REQUIRE(c.errors.size() == 1);
    CHECK(c.errors[0].file == "bad.mps");
  }
}

TEST_CASE("duplicating a prefix in a valid program is always rejected") {
  SessionGenerator gen(59);
  std::mt19937_64 rng(61);
  int mutated = 0;
  for (int i = 0; i < 300 && mutated < 100; ++i) {
    Process p = gen.random_process();
    auto nodes = reachable_nodes(p.node);
    std::vector<const ProcessNode*> choices;
    for (const ProcessNode* n : nodes)
      if (!n->terminated()) choices.push_back(n);
    if (choices.empty()) continue;

    // Rebuild the graph with one randomly duplicated branch and re-parse.
    const ProcessNode* victim =
        choices[std::uniform_int_distribution<std::size_t>(0, choices.size() - 1)(rng)];
    auto arena = std::make_shared<TermArena>();
    std::map<const ProcessNode*, ProcessNode*> copy;
    for (const ProcessNode* n : nodes)
      if (!n->terminated()) copy[n] = arena->make_process();
    for (auto& [orig, fresh] : copy) {
      for (const auto& b : orig->branches) {
        const ProcessNode* t = b.target->terminated() ? arena->terminated() : copy.at(b.target);
        fresh->branches.push_back(ProcessBranch{b.prefix, t});
      }
      if (orig == victim) fresh->branches.push_back(fresh->branches.front());
    }
    std::string text = pretty_print(copy.at(victim));
    CHECK_THROWS_AS(mod(text), ResolveError);
    ++mutated;
  }
  CHECK(mutated > 0);
}
