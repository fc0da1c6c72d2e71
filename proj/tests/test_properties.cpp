#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "corpus_fixture.hpp"
#include "doctest.h"
#include "mps/checker.hpp"
#include "mps/generate.hpp"
#include "mps/parse.hpp"
#include "mps/print.hpp"
#include "mps/properties.hpp"

using namespace mps;
using mps::testing::corpus_file;

namespace {

Module mod(const std::string& text) { return resolve(parse_program(text)); }

}  // namespace

TEST_CASE("lock freedom") {
  SUBCASE("client/server holds") {
    const Module& m = corpus_file("client_server.mps");
    CHECK(check_lock_freedom(m.sessions.at("CS")).holds());
  }

  SUBCASE("a stuck reader fails with a replayable counterexample") {
    const Module& m = corpus_file("counterexamples.mps");
    PropertyVerdict v = check_lock_freedom(m.sessions.at("Stuck"));
    CHECK(v.status == PropertyStatus::Fails);
    REQUIRE(v.counterexample.has_value());
    TraceRun run = run_trace(m.sessions.at("Stuck"), v.counterexample->trace);
    REQUIRE(run.result.has_value());
    CHECK(display(*run.result) == v.counterexample->state);
  }

  SUBCASE("final sessions hold vacuously") {
    auto m = mod("session S = p :: end with []");
    CHECK(check_lock_freedom(m.sessions.at("S")).holds());
  }

  SUBCASE("truncated searches are inconclusive") {
    auto m = mod("participant P = q!l . P\nsession S = p :: P with []");
    PropertyVerdict v = check_lock_freedom(m.sessions.at("S"), {100, 3});
    CHECK(v.status == PropertyStatus::Inconclusive);
    CHECK(v.coverage.truncated > 0);
  }
}

TEST_CASE("orphan-message freedom") {
  SUBCASE("client/server/workers holds") {
    const Module& m = corpus_file("client_server_workers.mps");
    CHECK(check_orphan_freedom(m.sessions.at("CSW")).holds());
  }

  SUBCASE("an unconsumed message in a final session fails immediately") {
    const Module& m = corpus_file("counterexamples.mps");
    PropertyVerdict v = check_orphan_freedom(m.sessions.at("Orphan"));
    CHECK(v.status == PropertyStatus::Fails);
    REQUIRE(v.counterexample.has_value());
    CHECK(v.counterexample->trace.empty());  // the initial state violates
  }

  SUBCASE("client/server holds") {
    const Module& m = corpus_file("client_server.mps");
    CHECK(check_orphan_freedom(m.sessions.at("CS")).holds());
  }
}

TEST_CASE("eventual reception") {
  SUBCASE("client/server holds") {
    const Module& m = corpus_file("client_server.mps");
    CHECK(check_eventual_reception(m.sessions.at("CS")).holds());
  }

  SUBCASE("a crossing exchange where every head gets consumed") {
    auto m = mod("session S = p :: q!l . q?m . end"
                 " || q :: p!m . (p?l . end + p?l2 . end) with []");
    CHECK(check_eventual_reception(m.sessions.at("S")).holds());
  }

  SUBCASE("a message without a consumer fails") {
    const Module& m = corpus_file("counterexamples.mps");
    PropertyVerdict v = check_eventual_reception(m.sessions.at("Orphan"));
    CHECK(v.status == PropertyStatus::Fails);
  }

  SUBCASE("failing counterexamples replay") {
    const Module& m = corpus_file("counterexamples.mps");
    for (const char* name : {"Stuck", "Orphan"}) {
      PropertyVerdict v = check_eventual_reception(m.sessions.at(name));
      if (v.status != PropertyStatus::Fails) continue;
      TraceRun run = run_trace(m.sessions.at(name), v.counterexample->trace);
      REQUIRE(run.result.has_value());
      CHECK(display(*run.result) == v.counterexample->state);
    }
  }
}

TEST_CASE("subject reduction cross-check") {
  SUBCASE("client/server") {
    const Module& m = corpus_file("client_server.mps");
    PropertyVerdict v = cross_check_subject_reduction(m.globals.at("G_cs"), m.sessions.at("CS"));
    CHECK(v.holds());
  }

  SUBCASE("client/server/workers") {
    const Module& m = corpus_file("client_server_workers.mps");
    PropertyVerdict v =
        cross_check_subject_reduction(m.globals.at("G_csw"), m.sessions.at("CSW"));
    CHECK(v.holds());
  }

  SUBCASE("End against a final session holds vacuously") {
    auto m = mod("global E = End\nsession S = p :: end with []");
    CHECK(cross_check_subject_reduction(m.globals.at("E"), m.sessions.at("S")).holds());
  }

  SUBCASE("untyped pairs are reported distinctly") {
    const Module& m = corpus_file("counterexamples.mps");
    PropertyVerdict v =
        cross_check_subject_reduction(m.globals.at("G_coh"), m.sessions.at("SCoh"));
    CHECK(v.status == PropertyStatus::Inconclusive);
    REQUIRE(v.counterexample.has_value());
    CHECK(v.counterexample->obligation.find("precondition") != std::string::npos);
  }
}

TEST_CASE("session fidelity cross-check") {
  SUBCASE("client/server") {
    const Module& m = corpus_file("client_server.mps");
    CHECK(cross_check_session_fidelity(m.globals.at("G_cs"), m.sessions.at("CS")).holds());
  }

  SUBCASE("time-out with the branching type") {
    const Module& m = corpus_file("time_out.mps");
    CHECK(cross_check_session_fidelity(m.globals.at("G_to1"), m.sessions.at("TO")).holds());
  }

  SUBCASE("End against a final session holds vacuously") {
    auto m = mod("global E = End\nsession S = p :: end with []");
    CHECK(cross_check_session_fidelity(m.globals.at("E"), m.sessions.at("S")).holds());
  }
}

TEST_CASE("type progress cross-check") {
  SUBCASE("every client/server player eventually acts") {
    const Module& m = corpus_file("client_server.mps");
    CHECK(cross_check_type_progress(m.globals.at("G_cs"), {}).holds());
  }

  SUBCASE("End holds vacuously") {
    auto m = mod("global E = End");
    CHECK(cross_check_type_progress(m.globals.at("E"), {}).holds());
  }

  SUBCASE("time-out players all reach an action") {
    const Module& m = corpus_file("time_out.mps");
    CHECK(cross_check_type_progress(m.globals.at("G_to1"), {}).holds());
  }
}

TEST_CASE("satisfaction preservation fuzzing") {
  SUBCASE("a thousand random sessions") {
    PropertyVerdict v = fuzz_satisfaction_preservation(42, 1000);
    CHECK(v.holds());
    CHECK(v.coverage.states == 1000);
  }

  SUBCASE("zero cases hold vacuously") {
    CHECK(fuzz_satisfaction_preservation(42, 0).holds());
  }

  SUBCASE("one concrete instance") {
    // c reads replies, s fires its halt: c was satisfied and stays satisfied
    const Module& m = corpus_file("client_server.mps");
    const Session& cs = m.sessions.at("CS");
    Participant c{"c"}, s{"s"};
    CHECK(is_satisfied(c, cs));
    auto next = step(cs, output_label(s, c, Tag{"halt"}));
    REQUIRE(next.has_value());
    CHECK(is_satisfied(c, *next));
  }
}

TEST_CASE("typability implies the checked properties on the corpus") {
  for (const auto& [file, module] : mps::testing::corpus().modules) {
    for (const auto& gname : module.global_order) {
      for (const auto& sname : module.session_order) {
        const Global& g = module.globals.at(gname);
        const Session& s = module.sessions.at(sname);
        if (!check(g, s).accepted()) continue;
        INFO(file, ": ", gname, " |- ", sname);
        CHECK(check_lock_freedom(s).holds());
        CHECK(check_orphan_freedom(s).holds());
        CHECK(cross_check_subject_reduction(g, s).holds());
        CHECK(cross_check_session_fidelity(g, s).holds());
        if (check(g, s, {}, true).accepted()) CHECK(check_eventual_reception(s).holds());
      }
    }
  }
}

TEST_CASE("the metatheorems hold on random typable sessions") {
  // Inference produces accepted typings for random choreographies; every
  // accepted typing must satisfy the reduction-mimicking cross-checks and
  // the liveness consequences. Any failure here localizes a defect in one
  // of the transition systems or in the checker.
  SessionGenerator gen(211);
  int typed = 0;
  auto examine = [&](const Session& s) {
    InferResult r = infer(s, {20000, 6});
    if (!r.type) return;
    StateGraph g = explore(s, {20000, 6});
    if (!g.truncated.empty()) return;
    ++typed;
    INFO("session: ", display(s));
    CHECK(cross_check_subject_reduction(*r.type, s, {20000, 6}, {20000, 6}).holds());
    CHECK(cross_check_session_fidelity(*r.type, s, {20000, 6}, {20000, 6}).holds());
    CHECK(check_lock_freedom(s, {20000, 6}).holds());
    CHECK(check_orphan_freedom(s, {20000, 6}).holds());
    if (check(*r.type, s, {20000, 6}, true).accepted())
      CHECK(check_eventual_reception(s, {20000, 6}).holds());
  };
  for (int i = 0; i < 120 && typed < 60; ++i) examine(gen.random_choreography_session());
  // unconstrained sessions are rarely typable, but the few that are bring
  // mixed choices and preloaded queues into the sample
  for (int i = 0; i < 300; ++i) examine(gen.random_session());
  CHECK(typed >= 30);
}

TEST_CASE("eventual reception implies orphan freedom on explored graphs") {
  SessionGenerator gen(103);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    Session s = gen.random_session();
    PropertyVerdict er = check_eventual_reception(s, {500, 3});
    if (er.status != PropertyStatus::Holds) continue;
    ++checked;
    CHECK(check_orphan_freedom(s, {500, 3}).holds());
  }
  CHECK(checked > 0);
}
