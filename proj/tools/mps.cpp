// Command-line front end: parse, check, infer, simulate, verify and export
// over .mps declaration files.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mps/checker.hpp"
#include "mps/explore.hpp"
#include "mps/generate.hpp"
#include "mps/parse.hpp"
#include "mps/print.hpp"
#include "mps/properties.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRejected = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitUsage = 3;

struct Options {
  std::vector<std::string> inputs;
  std::string format = "text";
  std::size_t max_states = 100000;
  std::size_t max_queue = 8;
  std::uint64_t seed = 0;
};

bool json_mode(const Options& o) { return o.format == "json"; }

// Loads every input (file or directory of .mps files) into one namespace.
mps::Module load_inputs(const std::vector<std::string>& inputs) {
  mps::Module merged;
  auto merge = [&merged](mps::Module m, const std::string& origin) {
    for (const auto& name : m.process_order) {
      if (!merged.processes.emplace(name, m.processes.at(name)).second)
        throw std::runtime_error("participant " + name + " defined in several inputs (" + origin +
                                 ")");
      merged.process_order.push_back(name);
    }
    for (const auto& name : m.global_order) {
      if (!merged.globals.emplace(name, m.globals.at(name)).second)
        throw std::runtime_error("global " + name + " defined in several inputs (" + origin + ")");
      merged.global_order.push_back(name);
    }
    for (const auto& name : m.session_order) {
      if (!merged.sessions.emplace(name, m.sessions.at(name)).second)
        throw std::runtime_error("session " + name + " defined in several inputs (" + origin + ")");
      merged.session_order.push_back(name);
    }
  };
  for (const auto& input : inputs) {
    if (std::filesystem::is_directory(input)) {
      mps::Corpus corpus = mps::load_corpus(input);
      if (!corpus.errors.empty()) {
        std::string msg;
        for (const auto& e : corpus.errors) msg += e.file + ": " + e.message + "\n";
        throw std::runtime_error(msg);
      }
      for (auto& [file, module] : corpus.modules) merge(std::move(module), file);
    } else {
      merge(mps::load_file(input), input);
    }
  }
  return merged;
}

const mps::Session& find_session(const mps::Module& m, const std::string& name) {
  auto it = m.sessions.find(name);
  if (it == m.sessions.end()) throw std::runtime_error("unknown session " + name);
  return it->second;
}

const mps::Global& find_global(const mps::Module& m, const std::string& name) {
  auto it = m.globals.find(name);
  if (it == m.globals.end()) throw std::runtime_error("unknown global " + name);
  return it->second;
}

int exit_code(mps::CheckStatus s) {
  switch (s) {
    case mps::CheckStatus::Accepted: return kExitOk;
    case mps::CheckStatus::Rejected: return kExitRejected;
    case mps::CheckStatus::Inconclusive: return kExitInconclusive;
  }
  return kExitUsage;
}

int exit_code(mps::PropertyStatus s) {
  switch (s) {
    case mps::PropertyStatus::Holds: return kExitOk;
    case mps::PropertyStatus::Fails: return kExitRejected;
    case mps::PropertyStatus::Inconclusive: return kExitInconclusive;
  }
  return kExitUsage;
}

void print_property(const Options& o, const mps::PropertyVerdict& v) {
  if (json_mode(o)) {
    std::cout << mps::to_json(v).dump(2) << "\n";
    return;
  }
  std::cout << v.property << ": " << mps::to_string(v.status) << "\n";
  if (v.counterexample) {
    if (!v.counterexample->trace.empty())
      std::cout << "  trace: " << mps::to_literal(v.counterexample->trace) << "\n";
    if (!v.counterexample->state.empty())
      std::cout << "  state: " << v.counterexample->state << "\n";
    std::cout << "  obligation: " << v.counterexample->obligation << "\n";
  }
  std::cout << "  coverage: " << v.coverage.states << " states, " << v.coverage.truncated
            << " truncated\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"verifier for asynchronous multiparty sessions with mixed choice"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("inputs", opt.inputs, ".mps files or directories")->required();
    cmd->add_option("--format", opt.format, "output format: text|json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--max-states", opt.max_states, "exploration state bound")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-queue", opt.max_queue, "per-channel queue bound")
        ->check(CLI::PositiveNumber);
  };

  auto* cmd_parse = app.add_subcommand("parse", "validate inputs and echo them normalized");
  add_common(cmd_parse);

  auto* cmd_check = app.add_subcommand("check", "check a session against a global type");
  std::string check_global, check_session;
  bool check_sound = false;
  cmd_check->add_option("--global", check_global, "global type name")->required();
  cmd_check->add_option("--session", check_session, "session name")->required();
  cmd_check->add_flag("--sound", check_sound, "require sound configurations at every node");
  add_common(cmd_check);

  auto* cmd_infer = app.add_subcommand("infer", "infer a global type for a session");
  std::string infer_session, infer_strategy = "satisfied-first";
  cmd_infer->add_option("--session", infer_session, "session name")->required();
  cmd_infer->add_option("--strategy", infer_strategy, "satisfied-first|full-set-only")
      ->check(CLI::IsMember({"satisfied-first", "full-set-only"}));
  add_common(cmd_infer);

  auto* cmd_sim = app.add_subcommand("simulate", "run a trace or a random schedule");
  std::string sim_session, sim_trace;
  bool sim_random = false;
  std::size_t sim_steps = 0;
  cmd_sim->add_option("--session", sim_session, "session name")->required();
  cmd_sim->add_option("--trace", sim_trace, "comma-separated labels, e.g. c>s!req,s<c?req");
  cmd_sim->add_flag("--random", sim_random, "follow a seeded random schedule");
  cmd_sim->add_option("--steps", sim_steps, "random schedule length");
  cmd_sim->add_option("--seed", opt.seed, "random seed");
  add_common(cmd_sim);

  auto* cmd_verify = app.add_subcommand("verify", "model-check a property of a session");
  std::string verify_session, verify_property, verify_global;
  cmd_verify->add_option("--session", verify_session, "session name")->required();
  cmd_verify
      ->add_option("--property", verify_property,
                   "lock-freedom|orphan-freedom|eventual-reception|subject-reduction|"
                   "session-fidelity")
      ->required()
      ->check(CLI::IsMember({"lock-freedom", "orphan-freedom", "eventual-reception",
                             "subject-reduction", "session-fidelity"}));
  cmd_verify->add_option("--global", verify_global, "global type name (cross-checks only)");
  add_common(cmd_verify);

  auto* cmd_dot = app.add_subcommand("export-dot", "write the reachable state graph as DOT");
  std::string dot_session, dot_out;
  cmd_dot->add_option("--session", dot_session, "session name")->required();
  cmd_dot->add_option("--out", dot_out, "output path (default stdout)");
  add_common(cmd_dot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    mps::Module module = load_inputs(opt.inputs);
    mps::ExploreBounds ebounds{opt.max_states, opt.max_queue};
    mps::CheckBounds cbounds{opt.max_states, opt.max_queue};

    if (cmd_parse->parsed()) {
      if (json_mode(opt)) {
        nlohmann::json j;
        j["processes"] = module.process_order;
        j["globals"] = module.global_order;
        j["sessions"] = module.session_order;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << mps::render_module(module);
      }
      return kExitOk;
    }

    if (cmd_check->parsed()) {
      const auto& g = find_global(module, check_global);
      const auto& s = find_session(module, check_session);
      mps::Verdict v = mps::check(g, s, cbounds, check_sound);
      if (json_mode(opt)) {
        std::cout << mps::check_report(v).dump(2) << "\n";
      } else {
        std::cout << mps::to_string(v.status);
        if (v.reason) std::cout << " (" << mps::to_string(*v.reason) << ")";
        std::cout << "\n";
        if (v.witness) {
          std::cout << "  at: " << mps::display(v.witness->session) << "\n";
          std::cout << "  type: " << mps::display(v.witness->global.node) << "\n";
        }
      }
      return exit_code(v.status);
    }

    if (cmd_infer->parsed()) {
      const auto& s = find_session(module, infer_session);
      auto strategy = infer_strategy == "full-set-only" ? mps::InferStrategy::FullSetOnly
                                                        : mps::InferStrategy::SatisfiedFirst;
      mps::InferResult r = mps::infer(s, cbounds, strategy);
      if (json_mode(opt)) {
        nlohmann::json j = mps::check_report(r.verdict);
        if (r.type) j["type"] = mps::pretty_print(r.type->node, "G");
        std::cout << j.dump(2) << "\n";
      } else if (r.type) {
        std::cout << mps::pretty_print(r.type->node, "G");
      } else {
        std::cout << mps::to_string(r.verdict.status);
        if (r.verdict.reason) std::cout << " (" << mps::to_string(*r.verdict.reason) << ")";
        std::cout << "\n";
      }
      return exit_code(r.verdict.status);
    }

    if (cmd_sim->parsed()) {
      const auto& s = find_session(module, sim_session);
      bool has_trace = !sim_trace.empty();
      if (sim_random == has_trace) {  // exactly one of the two modes
        std::cerr << "simulate needs either --trace or --random\n";
        return kExitUsage;
      }
      mps::Trace trace;
      if (sim_random)
        trace = mps::random_schedule(s, sim_steps, opt.seed);
      else
        trace = mps::parse_trace_literal(sim_trace);
      mps::TraceRun run = mps::run_trace(s, trace);
      if (json_mode(opt)) {
        nlohmann::json j;
        j["trace"] = nlohmann::json::array();
        for (const auto& l : trace) j["trace"].push_back(mps::to_string(l));
        j["steps"] = run.steps_taken;
        if (run.result)
          j["final"] = mps::display(*run.result);
        else
          j["failed_index"] = run.steps_taken;
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "trace: " << mps::to_literal(trace) << "\n";
        if (run.result)
          std::cout << "final: " << mps::display(*run.result) << "\n";
        else
          std::cout << "undefined at index " << run.steps_taken << "\n";
      }
      return run.result ? kExitOk : kExitRejected;
    }

    if (cmd_verify->parsed()) {
      const auto& s = find_session(module, verify_session);
      mps::PropertyVerdict v;
      if (verify_property == "lock-freedom") {
        v = mps::check_lock_freedom(s, ebounds);
      } else if (verify_property == "orphan-freedom") {
        v = mps::check_orphan_freedom(s, ebounds);
      } else if (verify_property == "eventual-reception") {
        v = mps::check_eventual_reception(s, ebounds);
      } else {
        if (verify_global.empty()) {
          std::cerr << verify_property << " needs --global\n";
          return kExitUsage;
        }
        const auto& g = find_global(module, verify_global);
        v = verify_property == "subject-reduction"
                ? mps::cross_check_subject_reduction(g, s, cbounds, ebounds)
                : mps::cross_check_session_fidelity(g, s, cbounds, ebounds);
      }
      print_property(opt, v);
      return exit_code(v.status);
    }

    if (cmd_dot->parsed()) {
      const auto& s = find_session(module, dot_session);
      std::string dot = mps::to_dot(mps::explore(s, ebounds));
      if (dot_out.empty()) {
        std::cout << dot;
      } else {
        std::ofstream out(dot_out);
        if (!out) throw std::runtime_error("cannot write " + dot_out);
        out << dot;
      }
      return kExitOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
